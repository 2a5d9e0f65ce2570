"""From a generated topology to a verified frequency assignment.

Run: python demos/01_pipeline.py
"""
from fapnfd import (
    GeneratorConfig,
    SolverConfig,
    build_constraints,
    build_plan,
    check_feasibility,
    generate_topology,
    hedge,
)

# 600 MHz band at 7 GHz, 15 MHz channels on a 0.15 MHz grid
plan = build_plan(7007.5, 7607.5, 15.0, 0.15)
print(f"grid: {plan.n_freqs} overlapping channels")

topo = generate_topology(GeneratorConfig(n_links=40, seed=1))
print(f"topology: {len(topo.nodes)} nodes, {len(topo.links)} links")

# interference margins -> NFD inversion -> separations in grid steps
sep = build_constraints(topo, plan)
pairs = list(sep.pairs())
print(f"constraints: {len(pairs)} constrained pairs, largest separation {max(s for *_, s in pairs)} steps")

a = hedge(sep, plan, SolverConfig(range_cap_mhz=600))
m = check_feasibility(a, sep, plan, range_cap_mhz=600)
print(f"HEDGE: {m.used_count} frequencies over {m.range_mhz:.2f} MHz, feasible={m.feasible}")
