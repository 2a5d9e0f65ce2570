"""Command-line pipeline: ``gen``, ``constraints``, ``solve``, ``bound``,
``check`` and ``bench``.

Instances are read from a topology JSON (constraints are then derived with
the default radio parameters unless overridden), a separation CSV, or a
CELAR-style ``ctr.txt`` (or the directory holding it).

Exit codes: 0 success, 2 infeasible outcome, 3 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io as fio
from ._version import __version__
from .bench import BENCH_HEADER, METHODS, aggregate, run_benchmark
from .bounds import compute_bounds
from .check import check_feasibility
from .errors import FapError, InfeasibleInstance
from .ga import GaConfig, run_ga
from .generate import GeneratorConfig, generate_topology
from .graph import read_celar
from .model import build_plan
from .nfd import build_constraints, load_mask
from .propagation import LinkBudgetParams, load_pattern
from .solvers import STRATEGIES, SolutionPool, SolverConfig, enhanced_solve, hedge, run_strategy

EXIT_OK, EXIT_INFEASIBLE, EXIT_BAD_INPUT = 0, 2, 3

# Default band: 600 MHz starting at 7007.5 MHz, 15 MHz channels on a 0.15 MHz grid.
DEFAULT_BAND = dict(f_start=7007.5, f_end=7607.5, bandwidth=15.0, delta_f=0.15)

log = logging.getLogger("fapnfd")


class BadInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors are bad input (exit 3); argparse's own 2 means infeasible here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_INPUT, f"{self.prog}: error: {message}\n")


def _dump(obj):
    print(json.dumps(obj, indent=1, sort_keys=True))


# -- instance loading -----------------------------------------------------
def _radio_args(p):
    g = p.add_argument_group("radio parameters (topology input only)")
    g.add_argument("--tx-power-w", type=float, default=1.0)
    g.add_argument("--sensitivity-dbm", type=float, default=-79.12)
    g.add_argument("--antenna", type=Path, help="two-column angle/attenuation file")
    g.add_argument("--mask", type=Path, help="two-column offset/level transmitter mask")
    g.add_argument("--filter", type=Path, help="two-column offset/level receiver filter")
    g.add_argument("--f-ref", type=float, help="reference frequency in MHz (default mid-band)")
    g.add_argument("--shared-node-separation", type=int)


def _constraints_from_topology(topo, plan, args):
    params = LinkBudgetParams.from_watts(args.tx_power_w, args.sensitivity_dbm)
    pattern = load_pattern(args.antenna) if args.antenna else None
    mask = load_mask(args.mask) if args.mask else None
    filt = load_mask(args.filter) if args.filter else None
    return build_constraints(topo, plan, params, pattern, mask, filt, f_ref=args.f_ref,
                             shared_node_separation=args.shared_node_separation)


def _load_instance(args):
    """``(sep, plan, seeds)`` from whatever file the user passed."""
    path = Path(args.instance)
    if not path.exists():
        raise BadInput(f"{path}: no such file or directory")
    if path.is_dir() or path.name.lower().startswith("ctr"):
        ctr = path / "ctr.txt" if path.is_dir() else path
        sep, n = read_celar(ctr, getattr(args, "n_freqs", None))
        return sep, fio.plan_from_count(n), {}
    if path.suffix.lower() == ".csv":
        sep, plan = fio.read_separation_csv(path, getattr(args, "n_freqs", None))
        meta, _, _ = fio.read_csv(path)
        return sep, plan, meta.get("seeds", {})
    data = fio._load_json(path)
    topo, plan = fio.topology_from_dict(data)
    plan = plan or build_plan(**DEFAULT_BAND)
    sep = _constraints_from_topology(topo, plan, args)
    return sep, plan, data.get("meta", {}).get("seeds", {})


def _instance_args(p):
    p.add_argument("instance", help="topology JSON, separation CSV or CELAR ctr.txt / directory")
    p.add_argument("--n-freqs", type=int, help="plan size for topology-free inputs")
    _radio_args(p)


# -- subcommands ----------------------------------------------------------
def cmd_gen(args):
    cfg = GeneratorConfig(
        n_links=args.n_links, area_km=args.area_km, cluster_radius_km=args.cluster_radius_km,
        max_link_length_km=args.max_link_length_km, n_clusters=args.n_clusters,
        seed=args.seed, bidirectional=args.bidirectional,
    )
    topo = generate_topology(cfg)
    plan = build_plan(args.f_start, args.f_end, args.bandwidth, args.delta_f)
    fio.write_topology(args.output, topo, plan, meta={"seeds": {"topology": args.seed}})
    _dump({"nodes": len(topo.nodes), "links": len(topo.links), "n_freqs": plan.n_freqs,
           "output": str(args.output)})
    return EXIT_OK


def cmd_constraints(args):
    data = fio._load_json(args.topology)
    topo, plan = fio.topology_from_dict(data)
    plan = plan or build_plan(**DEFAULT_BAND)
    sep = _constraints_from_topology(topo, plan, args)
    seeds = data.get("meta", {}).get("seeds", {})
    fio.write_separation_csv(args.output, sep, plan, meta={"seeds": seeds})
    _dump({"links": sep.n_links, "constraints": sep.n_constraints,
           "max_sep": int(sep.quantized.max(initial=0)), "output": str(args.output)})
    return EXIT_OK


def _solve_pool(args, sep, plan):
    cap = args.range_cap_mhz
    if args.strategy == "ga":
        base = hedge(sep, plan, SolverConfig(range_cap_mhz=cap))
        gcfg = GaConfig(population=args.ga_pop, generations=args.ga_gens, modifier=args.ga_modifier,
                        mutation_rate=args.ga_mutation, elite_fraction=args.ga_elite,
                        seed=args.seed, range_cap_mhz=cap, time_limit_s=args.time_limit_s)
        return run_ga(sep, plan, base, gcfg)
    cfg = SolverConfig(strategy=args.strategy, n_cog=args.n_cog, replications=args.replications,
                       seed=args.seed, balancing_factor=args.bf, range_cap_mhz=cap,
                       randomize=not args.deterministic, time_limit_s=args.time_limit_s)
    if args.deterministic:
        a = run_strategy(args.strategy, sep, plan, cfg)
        m = check_feasibility(a, sep, plan, cap)
        pool = SolutionPool(meta={"base": args.strategy, "seed": args.seed})
        if m.feasible:
            pool.add(a, m, args.seed, args.strategy, 0.0)
        return pool
    return enhanced_solve(sep, plan, cfg)


def cmd_solve(args):
    sep, plan, seeds = _load_instance(args)
    try:
        pool = _solve_pool(args, sep, plan)
    except InfeasibleInstance as e:
        _dump({"feasible": False, "error": str(e)})
        return EXIT_INFEASIBLE
    if not len(pool):
        _dump({"feasible": False, "error": "no feasible solution found"})
        return EXIT_INFEASIBLE
    best = pool.best(args.bf)
    meta = {"seeds": {**seeds, "solver": args.seed}, "strategy": args.strategy}
    for target in args.emit or []:
        t = Path(target)
        if t.suffix.lower() == ".csv":
            fio.write_pool_csv(t, pool, args.bf, meta)
        elif t.suffix.lower() == ".json":
            fio.write_assignment(t, best.assignment, best.metrics, meta)
        else:
            raise BadInput(f"--emit {t}: expected a .csv or .json target")
    _dump({"feasible": True, "pool_size": len(pool), "used_count": best.metrics.used_count,
           "range_mhz": round(best.metrics.range_mhz, 9), "span": best.metrics.span,
           "best_used_count": pool.best_used_count})
    return EXIT_OK


def cmd_bound(args):
    sep, plan, seeds = _load_instance(args)
    report = compute_bounds(sep, plan, exact_limit=args.exact_limit,
                            clique_time_limit=args.clique_time_limit)
    meta = {"seeds": seeds}
    for target in args.emit or []:
        t = Path(target)
        if t.suffix.lower() == ".csv":
            fio.write_bounds_csv(t, report, meta)
        elif t.suffix.lower() == ".json":
            fio.write_bounds_json(t, report, meta)
        else:
            raise BadInput(f"--emit {t}: expected a .csv or .json target")
    _dump({k: fio._num(v) for k, v in report.as_dict().items()})
    return EXIT_OK


def cmd_check(args):
    sep, plan, _ = _load_instance(args)
    assignment, _, _ = fio.read_assignment(args.assignment)
    m = check_feasibility(assignment, sep, plan, args.range_cap_mhz)
    _dump(fio.metrics_to_dict(m))
    return EXIT_OK if m.feasible else EXIT_INFEASIBLE


def cmd_bench(args):
    sep, plan, seeds = _load_instance(args)
    cfg = SolverConfig(n_cog=args.n_cog, replications=args.max_replications,
                       balancing_factor=args.bf, range_cap_mhz=args.range_cap_mhz)
    records = run_benchmark(sep, plan, args.methods, args.time_limits, args.replications,
                            seed=args.seed, config=cfg, shared_runs=not args.fresh_runs,
                            workers=args.workers)
    meta = {"seeds": {**seeds, "bench": args.seed}}
    if args.output:
        Path(args.output).write_text(fio._csv_text(meta, BENCH_HEADER, [r.row() for r in records]))
    summary = aggregate(records)
    if args.summary:
        header = tuple(summary[0]) if summary else ("method", "time_limit")
        rows = [tuple(fio._fmt(v) if v is not None else "" for v in s.values()) for s in summary]
        Path(args.summary).write_text(fio._csv_text(meta, header, rows))
    _dump(summary)
    return EXIT_OK if any(r.feasible for r in records) else EXIT_INFEASIBLE


# -- parser ---------------------------------------------------------------
def build_parser():
    p = _Parser(prog="fapnfd", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a clustered topology")
    g.add_argument("-o", "--output", type=Path, required=True)
    g.add_argument("--n-links", type=int, default=150)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--area-km", type=float, default=100.0)
    g.add_argument("--cluster-radius-km", type=float, default=0.5)
    g.add_argument("--max-link-length-km", type=float, default=20.0)
    g.add_argument("--n-clusters", type=int)
    g.add_argument("--bidirectional", action="store_true")
    for name, val in DEFAULT_BAND.items():
        g.add_argument("--" + name.replace("_", "-"), type=float, default=val)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("constraints", help="derive the separation CSV of a topology")
    c.add_argument("topology")
    c.add_argument("-o", "--output", type=Path, required=True)
    _radio_args(c)
    c.set_defaults(func=cmd_constraints)

    s = sub.add_parser("solve", help="assign frequencies")
    _instance_args(s)
    s.add_argument("--strategy", choices=STRATEGIES + ("ga",), default="hedge")
    s.add_argument("--n-cog", type=int, default=0)
    s.add_argument("--replications", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bf", type=float, default=0.5, help="balancing factor of the pool score")
    s.add_argument("--range-cap-mhz", type=float)
    s.add_argument("--time-limit-s", type=float)
    s.add_argument("--deterministic", action="store_true",
                   help="single run with lowest-id tie-breaking instead of randomized replications")
    s.add_argument("--emit", action="append", help="pool .csv or best-solution .json (repeatable)")
    s.add_argument("--ga-pop", type=int, default=50)
    s.add_argument("--ga-gens", type=int, default=200)
    s.add_argument("--ga-modifier", type=float, default=1.0)
    s.add_argument("--ga-mutation", type=float, default=0.2)
    s.add_argument("--ga-elite", type=float, default=0.2)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bound", help="lower bounds on frequency count and range")
    _instance_args(b)
    b.add_argument("--exact-limit", type=int, default=16)
    b.add_argument("--clique-time-limit", type=float, default=2.0)
    b.add_argument("--emit", action="append", help="bounds .csv row or .json (repeatable)")
    b.set_defaults(func=cmd_bound)

    k = sub.add_parser("check", help="verify an assignment")
    _instance_args(k)
    k.add_argument("assignment", type=Path)
    k.add_argument("--range-cap-mhz", type=float)
    k.set_defaults(func=cmd_check)

    h = sub.add_parser("bench", help="time-limited benchmark")
    _instance_args(h)
    h.add_argument("--methods", nargs="+", choices=METHODS, default=["hedge", "hybrid"])
    h.add_argument("--time-limits", nargs="+", type=float, default=[1.0, 2.0])
    h.add_argument("--replications", type=int, default=5)
    h.add_argument("--max-replications", type=int, default=10**6,
                   help="cap on randomized replications inside one run")
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--n-cog", type=int, default=0)
    h.add_argument("--bf", type=float, default=0.5)
    h.add_argument("--range-cap-mhz", type=float)
    h.add_argument("--workers", type=int, help="parallel workers (default: $FAPNFD_WORKERS or 1)")
    h.add_argument("--fresh-runs", action="store_true", help="separate run per time limit")
    h.add_argument("-o", "--output", type=Path, help="per-record CSV")
    h.add_argument("--summary", type=Path, help="mean/min/max CSV per method and limit")
    h.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (BadInput, FapError, OSError, ValueError) as e:
        print(f"fapnfd: error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
