"""Lower bounds on the number of frequencies and on the range.

* clique bound: a clique of size k in the constraint graph needs k distinct
  frequencies; candidate k are screened by iterated degree filtering and
  confirmed by an exact (time-capped) k-clique search.
* Hamiltonian and spanning-tree bounds: sorting any feasible assignment by
  index gives a Hamiltonian path whose weight is at most the index span.
  Pairs without a constraint may sit on the same index, so paths run over
  the completion of the graph in which non-adjacent pairs weigh 0; the
  spanning-tree bound uses the same completion.
* clique range bound: on a clique no pair may share an index, so the
  Hamiltonian path (or spanning tree) of the clique alone is a span bound
  that stays informative on large sparse graphs where the completion
  bounds collapse to 0.

Range bounds are in index units (``max - min``); ``plan.span_to_mhz``
converts them to MHz.  Components of a disconnected constraint graph can
overlap in frequency, so per-component bounds aggregate by maximum.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .graph import ConstraintGraph, from_separation
from .nfd import SeparationMatrix

DEFAULT_EXACT_LIMIT = 16
DEFAULT_CLIQUE_TIME_LIMIT = 2.0


def _as_graph(g):
    return from_separation(g) if isinstance(g, SeparationMatrix) else g


def _live_weights(g):
    """Weight matrix restricted to live vertices, with their link ids."""
    live = np.flatnonzero(g._live)
    w = g._w[np.ix_(live, live)].copy()
    np.fill_diagonal(w, 0)
    return w, [g.link_ids[k] for k in live]


def components(g):
    """Connected components of the live graph as lists of positions into its live weight matrix."""
    w, _ = _live_weights(_as_graph(g))
    n = w.shape[0]
    if n == 0:
        return []
    _, labels = connected_components(csr_matrix(w > 0), directed=False)
    return [list(np.flatnonzero(labels == c)) for c in range(labels.max() + 1)]


# -- clique bound ---------------------------------------------------------
class CliqueBound(NamedTuple):
    size: int
    certified: bool
    members: tuple = ()  # link ids of a confirmed clique of that size


def k_core_filter(adj_sets, k):
    """Iteratively drop vertices with fewer than ``k - 1`` live neighbours."""
    alive = set(adj_sets)
    deg = {v: len(adj_sets[v]) for v in alive}
    stack = [v for v in alive if deg[v] < k - 1]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in adj_sets[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] == k - 2:
                    stack.append(u)
    return alive


class _Timeout(Exception):
    pass


def _find_k_clique(adj_sets, vertices, k, deadline):
    """A k-clique (list of vertices) inside ``vertices``, or None; raises _Timeout."""
    order = sorted(vertices, key=lambda v: len(adj_sets[v] & vertices))
    bit = {v: 1 << i for i, v in enumerate(order)}
    nbits = {v: sum(bit[u] for u in adj_sets[v] & vertices) for v in order}
    by_bit = {i: v for i, v in enumerate(order)}
    calls = 0
    chosen = []

    def expand(cand):
        nonlocal calls
        calls += 1
        if calls & 1023 == 0 and time.monotonic() > deadline:
            raise _Timeout
        if len(chosen) == k:
            return True
        while cand:
            if len(chosen) + bin(cand).count("1") < k:
                return False
            low = cand & -cand
            v = by_bit[low.bit_length() - 1]
            cand ^= low
            chosen.append(v)
            if expand(cand & nbits[v]):
                return True
            chosen.pop()
        return False

    for i, v in enumerate(order):
        higher = nbits[v] >> (i + 1) << (i + 1)
        chosen[:] = [v]
        if expand(higher):
            return list(chosen)
    return None


def clique_bound(g, time_limit=DEFAULT_CLIQUE_TIME_LIMIT):
    """Largest k whose k-clique survives the degree filter and, unless the
    confirmation search timed out, is confirmed by exact search.

    ``certified`` is False when the reported size rests on the filter alone;
    ``members`` holds the largest clique actually found.
    """
    g = _as_graph(g)
    w, ids = _live_weights(g)
    n = len(ids)
    if n == 0:
        return CliqueBound(0, True)
    adj = w > 0
    adj_sets = {v: set(np.flatnonzero(adj[v]).tolist()) for v in range(n)}
    if not adj.any():
        return CliqueBound(1, True, (ids[0],))

    a, b = np.argwhere(adj)[0]
    best = CliqueBound(2, True, (ids[a], ids[b]))
    found = best.members
    lo, hi = 3, int(adj.sum(axis=1).max()) + 1
    while lo <= hi:
        k = (lo + hi) // 2
        core = k_core_filter(adj_sets, k)
        passed, certified = False, True
        if len(core) >= k:
            try:
                clique = _find_k_clique(adj_sets, core, k, time.monotonic() + time_limit)
                passed = clique is not None
                if passed:
                    found = tuple(ids[v] for v in sorted(clique))
            except _Timeout:
                passed, certified = True, False
        if passed:
            best = CliqueBound(k, certified, found)
            lo = k + 1
        else:
            hi = k - 1
    return best


def clique_range_bound(g, members, exact_limit=DEFAULT_EXACT_LIMIT):
    """Span bound from a clique: every pair in it is a real edge, so its
    induced subgraph needs no zero-weight completion.  Exact Hamiltonian
    path up to ``exact_limit`` members, spanning tree above."""
    g = _as_graph(g)
    if len(members) < 2:
        return 0
    pos = [g._pos[m] for m in members]
    sub = g._w[np.ix_(pos, pos)].copy()
    np.fill_diagonal(sub, 0)
    return _held_karp_path(sub) if len(members) <= exact_limit else _prim(sub)


def clique_lower_bound(g, time_limit=DEFAULT_CLIQUE_TIME_LIMIT):
    return clique_bound(g, time_limit).size


# -- spanning tree and Hamiltonian path bounds ---------------------------
def _prim(w):
    """Minimum spanning tree weight of a dense complete graph."""
    n = w.shape[0]
    if n <= 1:
        return 0
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = w[0].astype(np.int64).copy()
    total = 0
    for _ in range(n - 1):
        cand = np.where(in_tree, np.iinfo(np.int64).max, best)
        v = int(np.argmin(cand))
        total += int(cand[v])
        in_tree[v] = True
        best = np.minimum(best, w[v])
    return total


def _held_karp_path(w):
    """Minimum-weight Hamiltonian path (open, any endpoints) by subset DP."""
    n = w.shape[0]
    if n <= 1:
        return 0
    big = np.iinfo(np.int64).max // 4
    size = 1 << n
    dp = np.full((size, n), big, dtype=np.int64)
    for j in range(n):
        dp[1 << j, j] = 0
    masks = np.arange(size)
    popcount = np.zeros(size, dtype=np.int64)
    for j in range(n):
        popcount += (masks >> j) & 1
    w = w.astype(np.int64)
    for p in range(1, n):
        layer = masks[popcount == p]
        cur = dp[layer]  # (m, n)
        for j in range(n):
            sel = ((layer >> j) & 1) == 0
            if not sel.any():
                continue
            src = layer[sel]
            cand = (cur[sel] + w[:, j][None, :]).min(axis=1)
            dst = src | (1 << j)
            dp[dst, j] = np.minimum(dp[dst, j], cand)
    return int(dp[size - 1].min())


def component_bounds(g, exact_limit=DEFAULT_EXACT_LIMIT):
    """Per component: ``(link ids, mst, ham, exact)``, all in index units."""
    g = _as_graph(g)
    w, ids = _live_weights(g)
    out = []
    for comp in components(g):
        sub = w[np.ix_(comp, comp)]
        mst = _prim(sub)
        if len(comp) <= exact_limit:
            ham, exact = _held_karp_path(sub), True
        else:
            ham, exact = mst, False
        out.append(([ids[k] for k in comp], mst, ham, exact))
    return out


def mst_bound(g, aggregate="max"):
    """Spanning-tree range bound in index units.

    ``aggregate="max"`` (default) is the bound on the span of an assignment
    for a possibly disconnected graph; ``"sum"`` adds the per-component
    values.
    """
    vals = [mst for _, mst, _, _ in component_bounds(g, exact_limit=0)]
    if not vals:
        return 0
    return int(sum(vals)) if aggregate == "sum" else int(max(vals))


def hamiltonian_bound(g, exact_limit=DEFAULT_EXACT_LIMIT):
    """``(bound, exact)``: exact minimum Hamiltonian path weight when every
    component has at most ``exact_limit`` vertices, else components above the
    limit contribute their spanning-tree bound and ``exact`` is False.
    """
    comps = component_bounds(g, exact_limit)
    if not comps:
        return 0, True
    return int(max(h for _, _, h, _ in comps)), all(e for _, _, _, e in comps)


def triangle_check(g, completion=True):
    """True when every triangle satisfies the triangle inequality.

    With ``completion=True`` triangles range over all vertex triples, with
    missing edges weighing 0; otherwise only triangles of actual edges count.
    """
    g = _as_graph(g)
    w, _ = _live_weights(g)
    n = w.shape[0]
    adj = w > 0
    for i in range(n):
        # w[j, k] <= w[i, j] + w[i, k] for all j, k
        viol = w > (w[i][:, None] + w[i][None, :])
        if not completion:
            viol &= adj & adj[i][:, None] & adj[i][None, :]
        viol[i, :] = False
        viol[:, i] = False
        if viol.any():
            return False
    return True


@dataclass(frozen=True)
class BoundsReport:
    clique_lb: int
    clique_certified: bool
    mst_lb: int
    mst_lb_mhz: float
    ham_lb: int
    ham_lb_mhz: float
    ham_exact: bool
    triangle_ok: bool
    triangle_ok_edges: bool
    range_optimal_certified: bool
    n_components: int
    disconnected: bool
    clique_range_lb: int = 0
    range_lb: int = 0
    range_lb_mhz: float = 0.0

    def as_dict(self):
        return asdict(self)

    def violations(self, metrics):
        """Bound relations that a feasible solution's metrics break (empty if none)."""
        out = []
        if metrics.used_count and self.clique_certified and self.clique_lb > metrics.used_count:
            out.append(f"clique bound {self.clique_lb} > used {metrics.used_count}")
        if self.mst_lb > self.ham_lb and self.ham_exact:
            out.append(f"mst bound {self.mst_lb} > hamiltonian bound {self.ham_lb}")
        if metrics.used_count and self.mst_lb > metrics.span:
            out.append(f"mst bound {self.mst_lb} > span {metrics.span}")
        if metrics.used_count and self.ham_exact and self.ham_lb > metrics.span:
            out.append(f"hamiltonian bound {self.ham_lb} > span {metrics.span}")
        if metrics.used_count and self.range_lb > metrics.span:
            out.append(f"range bound {self.range_lb} > span {metrics.span}")
        return out


def compute_bounds(sep, plan, exact_limit=DEFAULT_EXACT_LIMIT,
                   clique_time_limit=DEFAULT_CLIQUE_TIME_LIMIT):
    g = _as_graph(sep)
    cb = clique_bound(g, clique_time_limit)
    comps = component_bounds(g, exact_limit)
    mst = max((m for _, m, _, _ in comps), default=0)
    ham = max((h for _, _, h, _ in comps), default=0)
    exact = all(e for _, _, _, e in comps)
    tri = triangle_check(g)
    n_edge_comps = sum(1 for c, _, _, _ in comps if len(c) > 1)
    crl = clique_range_bound(g, cb.members, exact_limit)
    rlb = max(int(mst), int(ham) if exact else 0, int(crl))
    return BoundsReport(
        clique_lb=cb.size,
        clique_certified=cb.certified,
        mst_lb=int(mst),
        mst_lb_mhz=plan.span_to_mhz(mst),
        ham_lb=int(ham),
        ham_lb_mhz=plan.span_to_mhz(ham),
        ham_exact=exact,
        triangle_ok=tri,
        triangle_ok_edges=triangle_check(g, completion=False),
        range_optimal_certified=tri and exact,
        n_components=len(comps),
        disconnected=n_edge_comps > 1,
        clique_range_lb=int(crl),
        range_lb=rlb,
        range_lb_mhz=plan.span_to_mhz(rlb),
    )
