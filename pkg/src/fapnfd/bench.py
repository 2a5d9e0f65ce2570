"""Time-limited benchmark harness.

Each ``(method, replication)`` pair gets its own seed, derived from the
master seed and independent of the time limit.  By default the pair is run
once, under the largest limit, and the record for every smaller limit ``T``
is the prefix of that run up to ``T``: the best solution found by then and
the best-so-far trace cut at ``T``.  Doubling a limit therefore can never
worsen a replication's final best.  With ``shared_runs=False`` every
limit gets a fresh run instead (same seeds, so the property holds up to
timing noise).

Methods: ``"hedge"``, ``"cog"``, ``"hybrid"`` (enhanced, randomized
replications until the budget is spent) and ``"ga"`` (seeded from the
deterministic HEDGE solution).  Infeasible outcomes are records with
``feasible=False``, not errors.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._seeding import derive_seed
from .errors import InfeasibleInstance, InvalidParameters
from .ga import GaConfig, run_ga
from .solvers import STRATEGIES, SolverConfig, enhanced_solve, hedge

METHODS = STRATEGIES + ("ga",)
WORKERS_ENV = "FAPNFD_WORKERS"
BENCH_HEADER = ("method", "time_limit", "replication", "seed", "used_count", "range_mhz",
                "feasible", "wall_time")


@dataclass(frozen=True)
class BenchmarkRecord:
    method: str
    time_limit: float
    replication: int
    seed: int
    used_count: int | None
    range_mhz: float | None
    feasible: bool
    wall_time: float
    trace: tuple = field(default_factory=tuple)  # (elapsed_s, best used_count)

    def row(self):
        return (self.method, self.time_limit, self.replication, self.seed,
                "" if self.used_count is None else self.used_count,
                "" if self.range_mhz is None else round(self.range_mhz, 9),
                int(self.feasible), round(self.wall_time, 6))


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _run_method(method, sep, plan, limit, seed, config, ga_config):
    """``(pool or None, wall_time)`` for one run; None when nothing feasible was found."""
    budget = None if math.isinf(limit) else limit
    t0 = time.perf_counter()
    try:
        if method == "ga":
            base = hedge(sep, plan, replace(config, strategy="hedge"))
            pool = run_ga(sep, plan, base, replace(ga_config, seed=seed, time_limit_s=budget,
                                                   range_cap_mhz=config.range_cap_mhz))
            if not len(pool):
                pool = None
        else:
            cfg = replace(config, strategy=method, seed=seed, time_limit_s=budget)
            pool = enhanced_solve(sep, plan, cfg)
    except InfeasibleInstance:
        pool = None
    return pool, time.perf_counter() - t0


def _record(method, limit, rep, seed, pool, wall):
    """Record of ``pool`` restricted to what was found within ``limit`` seconds.

    The first solution always counts: a run never stops before its first
    replication (or, for the GA, before its seed solution) is in.
    """
    if pool is None:
        return BenchmarkRecord(method, limit, rep, seed, None, None, False, min(wall, limit))
    entries = [e for i, e in enumerate(pool) if i == 0 or e.elapsed is None or e.elapsed <= limit]
    best = min(entries, key=lambda e: (e.metrics.used_count, e.metrics.range_mhz))
    trace = tuple(p for i, p in enumerate(pool.trace) if i == 0 or p[0] <= limit)
    return BenchmarkRecord(method, limit, rep, seed, best.metrics.used_count,
                           best.metrics.range_mhz, True, min(wall, limit), trace)


def _task(args):
    method, rep, seed, limits, shared, sep, plan, config, ga_config = args
    out = []
    if shared:
        pool, wall = _run_method(method, sep, plan, limits[-1], seed, config, ga_config)
        for T in limits:
            out.append(_record(method, T, rep, seed, pool, wall))
    else:
        for T in limits:
            pool, wall = _run_method(method, sep, plan, T, seed, config, ga_config)
            out.append(_record(method, T, rep, seed, pool, wall))
    return out


def run_benchmark(sep, plan, methods, time_limits, replications, seed=0, config=None,
                  ga_config=None, shared_runs=True, workers=None):
    """Run every method ``replications`` times under every time limit.

    ``config.replications`` caps the number of randomized replications a
    single run may perform (it matters for an infinite limit).  Returns the
    records sorted by method, limit and replication.
    """
    limits = [float(t) for t in time_limits]
    if not limits or any(t <= 0 for t in limits) or limits != sorted(limits):
        raise InvalidParameters("time limits must be positive and ascending")
    for m in methods:
        if m not in METHODS:
            raise InvalidParameters(f"unknown method {m!r}")
    if replications < 1:
        raise InvalidParameters("replications must be >= 1")
    config = config or SolverConfig(replications=10**6)
    ga_config = ga_config or GaConfig(generations=10**6)
    tasks = [
        (m, r, derive_seed(seed, m, r), limits, shared_runs, sep, plan, config, ga_config)
        for m in methods for r in range(replications)
    ]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    records = [rec for res in results for rec in res]
    order = {m: k for k, m in enumerate(methods)}
    return sorted(records, key=lambda r: (order[r.method], r.time_limit, r.replication))


def aggregate(records):
    """Mean, min and max of used count and range per ``(method, time_limit)``,
    over the feasible records; ``n_feasible`` counts them."""
    groups = {}
    for r in records:
        groups.setdefault((r.method, r.time_limit), []).append(r)
    out = []
    for (method, limit), recs in groups.items():
        ok = [r for r in recs if r.feasible]
        row = {"method": method, "time_limit": limit, "n": len(recs), "n_feasible": len(ok)}
        for name in ("used_count", "range_mhz"):
            vals = np.array([getattr(r, name) for r in ok], dtype=float)
            row[f"{name}_mean"] = float(vals.mean()) if ok else None
            row[f"{name}_min"] = float(vals.min()) if ok else None
            row[f"{name}_max"] = float(vals.max()) if ok else None
        out.append(row)
    return out
