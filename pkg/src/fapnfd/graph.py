"""Undirected constraint graph on links and its degree-ordered selection.

Vertices are link ids; an edge joins two links whose quantized separation is
at least one, weighted by that separation.  Solvers delete vertices as they
assign them and re-insert them on rollback; the live degree of every vertex
is kept up to date incrementally.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import EmptyGraph, InvalidParameters, UnknownVertex
from .nfd import SeparationMatrix


class ConstraintGraph:
    def __init__(self, link_ids, weights, weighted_degree=False):
        self.link_ids = tuple(int(i) for i in link_ids)
        w = np.asarray(weights, dtype=np.int64)
        n = len(self.link_ids)
        if w.shape != (n, n):
            raise InvalidParameters("weight matrix does not match the vertex list")
        self._w = w
        self._adj = w > 0
        np.fill_diagonal(self._adj, False)
        self._pos = {l: k for k, l in enumerate(self.link_ids)}
        self.weighted_degree = weighted_degree
        self._live = np.ones(n, dtype=bool)
        self._deg = self._adj.sum(axis=1).astype(np.int64)
        self._wdeg = np.where(self._adj, w, 0).sum(axis=1).astype(np.int64)

    # -- inspection -------------------------------------------------------
    def __len__(self):
        return int(self._live.sum())

    def __contains__(self, v):
        k = self._pos.get(v)
        return k is not None and bool(self._live[k])

    @property
    def n_vertices(self):
        return len(self.link_ids)

    @property
    def vertices(self):
        return [self.link_ids[k] for k in np.flatnonzero(self._live)]

    def degree(self, v):
        return int(self._deg[self._position(v)])

    def degrees(self):
        return {self.link_ids[k]: int(self._deg[k]) for k in np.flatnonzero(self._live)}

    def neighbors(self, v):
        k = self._position(v)
        return [self.link_ids[j] for j in np.flatnonzero(self._adj[k] & self._live)]

    def weight(self, u, v):
        return int(self._w[self._pos[u], self._pos[v]])

    def edges(self):
        """Live edges as ``(u, v, weight)`` with u < v by link id."""
        live = self._live
        a, b = np.nonzero(np.triu(self._adj & live[:, None] & live[None, :], 1))
        return [(self.link_ids[x], self.link_ids[y], int(self._w[x, y])) for x, y in zip(a, b)]

    @property
    def n_edges(self):
        live = self._live
        return int(np.count_nonzero(np.triu(self._adj & live[:, None] & live[None, :], 1)))

    def weight_matrix(self):
        return self._w.copy()

    def copy(self):
        g = ConstraintGraph.__new__(ConstraintGraph)
        g.link_ids = self.link_ids
        g._w = self._w
        g._adj = self._adj
        g._pos = self._pos
        g.weighted_degree = self.weighted_degree
        g._live = self._live.copy()
        g._deg = self._deg.copy()
        g._wdeg = self._wdeg.copy()
        return g

    def _position(self, v):
        try:
            return self._pos[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v}") from None

    # -- mutation (positional; used by the solvers) -----------------------
    def _remove(self, k):
        nb = self._adj[k] & self._live
        self._live[k] = False
        self._deg[nb] -= 1
        self._wdeg[nb] -= self._w[k, nb]

    def _restore(self, k):
        if self._live[k]:
            return
        nb = self._adj[k] & self._live
        self._deg[nb] += 1
        self._wdeg[nb] += self._w[k, nb]
        self._deg[k] = int(nb.sum())
        self._wdeg[k] = int(self._w[k, nb].sum())
        self._live[k] = True

    def _pick(self, rank=1, rng=None):
        live = np.flatnonzero(self._live)
        if live.size == 0:
            raise EmptyGraph("no live vertices")
        d = (self._wdeg if self.weighted_degree else self._deg)[live]
        top = d.max()
        target = top
        if rank == 2:
            lower = d[d < top]
            if lower.size:
                target = lower.max()
        elif rank != 1:
            raise InvalidParameters("rank must be 1 or 2")
        tier = live[d == target]
        if rng is None or tier.size == 1:
            return int(tier[0])
        return int(tier[rng.integers(tier.size)])

    # -- public vertex-id API ---------------------------------------------
    def remove_vertex(self, v):
        k = self._position(v)
        if not self._live[k]:
            raise UnknownVertex(f"vertex {v} already removed")
        self._remove(k)
        return self

    def restore_vertex(self, v):
        """Re-insert a removed vertex with its edges to the live vertices."""
        self._restore(self._position(v))
        return self

    def highest_degree_vertex(self, rank=1, rng=None):
        return self.link_ids[self._pick(rank, rng)]


def from_separation(sep, weighted_degree=False):
    """Constraint graph with one edge per pair whose separation is >= 1."""
    return ConstraintGraph(sep.link_ids, sep.quantized, weighted_degree)


def highest_degree_vertex(g, rank=1, rng=None):
    """A vertex of maximum live degree (``rank=1``) or of the second-largest
    distinct degree (``rank=2``; falls back to the top tier when all degrees
    are equal).  Ties go to ``rng`` or, without one, to the lowest link id.
    """
    return g.highest_degree_vertex(rank, rng)


def remove_vertex(g, v):
    return g.remove_vertex(v)


_CELAR_LINE = re.compile(r"^\s*(\d+)\s+(\d+)\s+(?:[A-Za-z]\s+)?([<>=])\s+(-?\d+)")


def read_celar(path, n_freqs=None):
    """Read a CELAR-style constraint file (``ctr.txt``).

    A line ``i j D > s`` (the type letter is optional) means ``|f_i - f_j| > s``
    and becomes a quantized separation of ``s + 1`` index units.  ``i j D = s``
    lines are relaxed to ``|f_i - f_j| >= s``.  If a ``var.txt`` sits next
    to the file, every variable listed there becomes a vertex.

    Returns ``(separation_matrix, n_freqs)``; when ``n_freqs`` is not given
    it is taken from ``dom.txt`` (largest domain value) if present, else set
    to the sum of all separations plus one, which always admits a solution.
    """
    path = Path(path)
    pairs = []
    ids = set()
    for line in path.read_text().splitlines():
        m = _CELAR_LINE.match(line)
        if not m:
            continue
        i, j, op, s = int(m[1]), int(m[2]), m[3], int(m[4])
        if op == "<":
            continue  # co-location constraints carry no separation
        sep = s + 1 if op == ">" else s
        ids.update((i, j))
        if sep > 0:
            pairs.append((i, j, sep))
    var = path.with_name("var.txt")
    if var.exists():
        for line in var.read_text().splitlines():
            tok = line.split()
            if tok and tok[0].isdigit():
                ids.add(int(tok[0]))
    sep = SeparationMatrix.from_pairs(sorted(ids), pairs)
    if n_freqs is None:
        dom = path.with_name("dom.txt")
        if dom.exists():
            vals = [int(t) for line in dom.read_text().splitlines() for t in line.split()[2:]]
            n_freqs = max(vals) if vals else None
        if n_freqs is None:
            n_freqs = int(sum(s for _, _, s in sep.pairs())) + 1
    return sep, int(n_freqs)
