"""Time-limited benchmark: best frequency count against the time budget.

Run: python demos/04_benchmark.py
"""
from fapnfd import (
    GaConfig,
    GeneratorConfig,
    SolverConfig,
    aggregate,
    build_constraints,
    build_plan,
    generate_topology,
    run_benchmark,
)

plan = build_plan(7007.5, 7607.5, 15.0, 0.15)
sep = build_constraints(generate_topology(GeneratorConfig(n_links=80, seed=2)), plan)
records = run_benchmark(
    sep, plan, ["hedge", "hybrid", "ga"], [0.25, 0.5, 1.0], replications=3, seed=0,
    config=SolverConfig(n_cog=55, replications=10**6, range_cap_mhz=600),
    ga_config=GaConfig(population=30, generations=10**6),
)
for row in aggregate(records):
    print(f"{row['method']:>7} T={row['time_limit']:<5} mean |A| {row['used_count_mean']:5.1f} "
          f"(min {row['used_count_min']:.0f}), mean range {row['range_mhz_mean']:6.1f} MHz")
