"""Randomized replications against the deterministic heuristics.

Run: python demos/03_enhanced_vs_raw.py   (about half a minute)
"""
from dataclasses import replace

from fapnfd import (
    GeneratorConfig,
    SolverConfig,
    build_constraints,
    build_plan,
    check_feasibility,
    compute_bounds,
    enhanced_solve,
    generate_topology,
    hedge,
    hybrid,
)

BF = 0.4
plan = build_plan(7007.5, 7607.5, 15.0, 0.15)
sep = build_constraints(generate_topology(GeneratorConfig(n_links=150, seed=0)), plan)
cfg = SolverConfig(n_cog=110, replications=200, seed=1, balancing_factor=BF, range_cap_mhz=600)

rep = compute_bounds(sep, plan)
print(f"lower bounds: {rep.clique_lb} frequencies, {rep.range_lb_mhz:.1f} MHz")

rows = []
for name, a in (("HEDGE", hedge(sep, plan, cfg)),
                ("Hybrid", hybrid(sep, plan, replace(cfg, strategy="hybrid")))):
    m = check_feasibility(a, sep, plan, 600)
    rows.append((name, m.used_count, m.range_mhz))
for strategy in ("hedge", "hybrid"):
    pool = enhanced_solve(sep, plan, replace(cfg, strategy=strategy))
    best = pool.best(BF)
    rows.append((f"enhanced {strategy}", best.metrics.used_count, best.metrics.range_mhz))

for name, used, rng_mhz in rows:
    print(f"{name:>16}: {used:3d} frequencies, {rng_mhz:6.1f} MHz")
