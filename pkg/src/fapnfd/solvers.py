"""Greedy frequency assignment heuristics and their randomized replications.

HEDGE assigns links in order of decreasing degree in the constraint graph,
each to the most-used frequency that fits (lowest index on ties), falling
back to the lowest unused one.  COG first colours the graph greedily and
then maps colour classes onto frequencies.  Hybrid runs COG for the first
``n_cog`` links and HEDGE for the rest.

Passing an ``rng`` switches on the ordering randomization used by the
enhanced variants: ties inside a degree tier are broken at random, the
HEDGE phase alternates between the highest-degree tier (odd steps) and the
second-highest tier (even steps), and COG maps its colour classes in a
random order.  Without an ``rng`` every solver is deterministic and ties go
to the lowest link id.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ._seeding import derive_seed
from .check import check_feasibility
from .errors import AllReplicationsInfeasible, InfeasibleInstance, InvalidParameters
from .graph import from_separation
from .model import Assignment

log = logging.getLogger(__name__)

STRATEGIES = ("hedge", "cog", "hybrid")


@dataclass(frozen=True)
class SolverConfig:
    strategy: str = "hedge"
    n_cog: int = 0
    replications: int = 1
    seed: int = 0
    balancing_factor: float = 0.5
    range_cap_mhz: float | None = None
    max_rollbacks: int | None = None  # None: 2 * number of links
    randomize: bool = True
    weighted_degree: bool = False
    time_limit_s: float | None = None
    debug: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidParameters(f"unknown strategy {self.strategy!r}")
        if not 0.0 <= self.balancing_factor <= 1.0:
            raise InvalidParameters("balancing factor must lie in [0, 1]")
        if self.replications < 1:
            raise InvalidParameters("replications must be >= 1")
        if self.n_cog < 0:
            raise InvalidParameters("n_cog must be >= 0")


# -- shared state ---------------------------------------------------------
class _State:
    """Mutable bookkeeping of one solver run, in link positions."""

    def __init__(self, sep, plan, config):
        self.sep = sep
        self.q = sep.quantized
        self.n = sep.n_links
        self.n_f = plan.n_freqs
        self.cap = None
        if config.range_cap_mhz is not None:
            self.cap = plan.mhz_to_span(config.range_cap_mhz)
            if self.cap < 0:
                raise InfeasibleInstance("range cap is narrower than a single band")
        self.assigned = np.zeros(self.n, dtype=np.int64)
        self.usage = np.zeros(self.n_f + 1, dtype=np.int64)
        self.g = from_separation(sep, config.weighted_degree)
        budget = config.max_rollbacks
        self.rollbacks_left = 2 * self.n if budget is None else budget

    def set(self, v, k):
        self.assigned[v] = k
        self.usage[k] += 1

    def unset(self, v):
        self.usage[self.assigned[v]] -= 1
        self.assigned[v] = 0

    def assignment(self):
        ids = self.sep.link_ids
        return Assignment({ids[v]: int(k) for v, k in enumerate(self.assigned)})


def _blocked(n_f, centers, seps):
    """Boolean array over indices 0..n_f; True where some ``|k - c| < s``.

    Index 0 does not exist and is always blocked.
    """
    blocked = np.zeros(n_f + 1, dtype=bool)
    if len(centers):
        lo = np.clip(centers - seps + 1, 1, n_f + 1)
        hi = np.clip(centers + seps - 1, 0, n_f)
        keep = lo <= hi
        lo, hi = lo[keep], hi[keep]
        diff = np.bincount(lo, minlength=n_f + 2) - np.bincount(hi + 1, minlength=n_f + 2)
        blocked = np.cumsum(diff)[: n_f + 1] > 0
    blocked[0] = True
    return blocked


def _apply_cap(blocked, used_idx, cap):
    if cap is None or used_idx.size == 0:
        return blocked
    lo, hi = int(used_idx[0]), int(used_idx[-1])
    blocked[: max(hi - cap, 1)] = True
    blocked[lo + cap + 1:] = True
    return blocked


def _choose_index(st, v):
    """Frequency for position ``v`` given the current partial assignment, or 0."""
    row = st.q[v]
    nb = np.flatnonzero((row > 0) & (st.assigned > 0))
    blocked = _blocked(st.n_f, st.assigned[nb], row[nb])
    used_idx = np.flatnonzero(st.usage)
    blocked = _apply_cap(blocked, used_idx, st.cap)
    if used_idx.size:
        ok = used_idx[~blocked[used_idx]]
        if ok.size:
            counts = st.usage[ok]
            return int(ok[np.lexsort((ok, -counts))[0]])
    free = ~blocked
    free[used_idx] = False
    k = int(np.argmax(free))
    return k if free[k] else 0


def assign_freq_to(link, partial, sep, plan, range_cap_mhz=None):
    """Index that the greedy rule picks for ``link`` given ``partial``, or None.

    Used indices are tried by decreasing usage count (lowest index first on
    ties), then unused indices in increasing order.
    """
    st = _State(sep, plan, SolverConfig(range_cap_mhz=range_cap_mhz))
    for l, k in partial.items():
        st.set(sep.position(l), k)
    k = _choose_index(st, sep.position(link))
    return k or None


# -- HEDGE ----------------------------------------------------------------
def _hedge_phase(st, rng):
    """Assign every live vertex of ``st.g``; rolls back on dead ends."""
    g = st.g
    step = 0
    forced = []
    while len(g) or forced:
        if forced:
            v = forced.pop()
        else:
            step += 1
            rank = 2 if (rng is not None and step % 2 == 0) else 1
            v = g._pick(rank, rng)
        k = _choose_index(st, v)
        if k:
            st.set(v, k)
            if g._live[v]:
                g._remove(v)
            continue
        nbrs = np.flatnonzero((st.q[v] > 0) & (st.assigned > 0))
        if st.rollbacks_left <= 0:
            ids = st.sep.link_ids
            raise InfeasibleInstance(
                f"link {ids[v]} cannot be assigned and the rollback budget is spent",
                link=ids[v],
                neighbors=[ids[u] for u in np.flatnonzero(st.q[v] > 0)],
            )
        st.rollbacks_left -= 1
        for u in nbrs:
            st.unset(u)
            g._restore(u)
        forced.append(v)
    return st


def hedge(sep, plan, config=None, rng=None):
    """Highest-degree-first greedy assignment with rollback."""
    config = config or SolverConfig()
    st = _State(sep, plan, config)
    return _hedge_phase(st, rng).assignment()


# -- COG ------------------------------------------------------------------
def _cog_color(st, rng, limit):
    """Greedy colouring of up to ``limit`` vertices in degree order.

    Each vertex gets the most used colour absent from its coloured
    neighbours (lowest colour id on ties), else a new colour.  Coloured
    vertices are removed from the graph.  Returns the colour classes as
    lists of positions, in first-use order.
    """
    g = st.g
    color = np.full(st.n, -1, dtype=np.int64)
    classes = []
    done = 0
    while len(g) and done < limit:
        v = g._pick(1, rng)
        nb = np.flatnonzero((st.q[v] > 0) & (color >= 0))
        forbidden = set(color[nb].tolist())
        best = -1
        for c, members in enumerate(classes):
            if c in forbidden:
                continue
            if best < 0 or len(members) > len(classes[best]):
                best = c
        if best < 0:
            best = len(classes)
            classes.append([])
        classes[best].append(v)
        color[v] = best
        g._remove(v)
        done += 1
    return classes


def _cog_frequencies(st, classes, rng):
    """Map colour classes onto frequencies, smallest feasible index first."""
    order = sorted(range(len(classes)), key=lambda c: (-len(classes[c]), c))
    if rng is not None and classes:
        order = [int(c) for c in rng.permutation(len(classes))]
    for c in order:
        members = np.asarray(classes[c])
        done = st.assigned > 0
        sub = st.q[np.ix_(members, np.flatnonzero(done))]
        rows, cols = np.nonzero(sub)
        centers = st.assigned[np.flatnonzero(done)][cols]
        blocked = _blocked(st.n_f, centers, sub[rows, cols])
        blocked = _apply_cap(blocked, np.flatnonzero(st.usage), st.cap)
        k = int(np.argmax(~blocked))
        if blocked[k]:
            ids = st.sep.link_ids
            raise InfeasibleInstance(
                f"no frequency fits the colour class of links {[ids[m] for m in members]}",
                link=ids[members[0]],
                neighbors=[ids[m] for m in members[1:]],
            )
        for m in members:
            st.set(m, k)


def cog(sep, plan, config=None, rng=None):
    """Colour first, then assign frequencies to colour classes."""
    config = config or SolverConfig(strategy="cog")
    st = _State(sep, plan, config)
    classes = _cog_color(st, rng, st.n)
    _cog_frequencies(st, classes, rng)
    return st.assignment()


def hybrid(sep, plan, config=None, rng=None):
    """COG on the first ``config.n_cog`` links, HEDGE on the rest."""
    config = config or SolverConfig(strategy="hybrid")
    st = _State(sep, plan, config)
    if config.n_cog > st.n:
        raise InvalidParameters(f"n_cog={config.n_cog} exceeds the {st.n} links")
    classes = _cog_color(st, rng, config.n_cog)
    _cog_frequencies(st, classes, rng)
    return _hedge_phase(st, rng).assignment()


_SOLVERS = {"hedge": hedge, "cog": cog, "hybrid": hybrid}


def run_strategy(strategy, sep, plan, config, rng=None):
    return _SOLVERS[strategy](sep, plan, config, rng)


# -- scoring and pools ----------------------------------------------------
def _normalized(x):
    x = np.asarray(x, dtype=float)
    span = x.max() - x.min() if x.size else 0.0
    if span == 0:
        return np.zeros_like(x)
    return (x - x.min()) / span


def psi(used_counts, ranges, bf):
    """Balanced score of solutions; smaller is better.

    ``bf`` weighs the normalized frequency count against the normalized
    range.  A metric that is constant over the pool contributes 0.
    """
    return bf * _normalized(used_counts) + (1.0 - bf) * _normalized(ranges)


@dataclass(frozen=True)
class PoolEntry:
    assignment: Assignment
    metrics: object
    seed: int | None
    strategy: str
    elapsed: float | None = None  # seconds from the start of the run that found it


@dataclass
class SolutionPool:
    """Distinct feasible solutions with their provenance.

    ``trace`` holds ``(elapsed_s, used_count)`` each time the best frequency
    count improved while the pool was being filled.
    """

    entries: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._keys = {e.assignment.key for e in self.entries}

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, assignment):
        return assignment.key in self._keys

    def __getitem__(self, i):
        return self.entries[i]

    def add(self, assignment, metrics, seed=None, strategy="", elapsed=None):
        if not metrics.feasible:
            raise InvalidParameters("only feasible solutions enter a pool")
        key = assignment.key
        if key in self._keys:
            return False
        self._keys.add(key)
        self.entries.append(PoolEntry(assignment, metrics, seed, strategy, elapsed))
        return True

    def merged(self, other):
        out = SolutionPool(list(self.entries), list(self.trace), dict(self.meta))
        for e in other:
            out.add(e.assignment, e.metrics, e.seed, e.strategy, e.elapsed)
        return out

    @property
    def used_counts(self):
        return np.array([e.metrics.used_count for e in self.entries])

    @property
    def ranges(self):
        return np.array([e.metrics.range_mhz for e in self.entries])

    def scores(self, bf):
        if not self.entries:
            return np.zeros(0)
        return psi(self.used_counts, self.ranges, bf)

    def best_index(self, bf):
        """Smallest score; ties by fewer frequencies, then smaller range, then insertion order."""
        s = self.scores(bf)
        return int(np.lexsort((np.arange(len(s)), self.ranges, self.used_counts, s))[0])

    def best(self, bf):
        return self.entries[self.best_index(bf)]

    @property
    def best_used_count(self):
        return int(self.used_counts.min())

    def pareto_mask(self):
        u, r = self.used_counts, self.ranges
        dominated = (
            (u[None, :] <= u[:, None]) & (r[None, :] <= r[:, None])
            & ((u[None, :] < u[:, None]) | (r[None, :] < r[:, None]))
        ).any(axis=1)
        return ~dominated


def score(pool, i, bf):
    """Score of entry ``i`` relative to the whole pool."""
    return float(pool.scores(bf)[i])


def enhanced_solve(sep, plan, config, base=None):
    """Run ``config.replications`` seeded randomized replications of ``base``.

    Replication ``r`` draws from ``derive_seed(config.seed, r)``.  Infeasible
    runs are dropped, feasible ones verified by the independent checker and
    pooled without duplicates.  With ``config.time_limit_s`` no replication
    starts once the budget is spent (the first one always runs).
    """
    base = base or config.strategy
    if base not in _SOLVERS:
        raise InvalidParameters(f"unknown base strategy {base!r}")
    pool = SolutionPool(meta={"base": base, "seed": config.seed})
    t0 = time.perf_counter()
    best = None
    runs = 0
    for r in range(config.replications):
        elapsed = time.perf_counter() - t0
        if r and config.time_limit_s is not None and elapsed >= config.time_limit_s:
            break
        seed_r = derive_seed(config.seed, r)
        rng = np.random.default_rng(seed_r) if config.randomize else None
        runs += 1
        try:
            a = run_strategy(base, sep, plan, config, rng)
        except InfeasibleInstance:
            continue
        metrics = check_feasibility(a, sep, plan, config.range_cap_mhz)
        if not metrics.feasible:
            msg = f"{base} returned an infeasible assignment (replication {r})"
            if config.debug:
                raise AssertionError(msg)
            log.warning(msg)
            continue
        now = time.perf_counter() - t0
        pool.add(a, metrics, seed_r, base, now)
        if best is None or metrics.used_count < best:
            best = metrics.used_count
            pool.trace.append((now, best))
    pool.meta["runs"] = runs
    if not pool.entries:
        raise AllReplicationsInfeasible(f"all {runs} replications of {base} were infeasible")
    if config.debug:
        _assert_bounds(pool, sep, plan)
    return pool


def _assert_bounds(pool, sep, plan):
    from .bounds import compute_bounds

    report = compute_bounds(sep, plan)
    for e in pool:
        bad = report.violations(e.metrics)
        if bad:
            raise AssertionError("; ".join(bad))
