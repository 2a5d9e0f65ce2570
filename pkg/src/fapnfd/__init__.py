"""Frequency assignment for point-to-point radio links under net filter
discrimination (NFD) constraints.

Pipeline: topology -> pairwise interference margins -> NFD-derived
separations (in index units of an overlapping channel grid) -> greedy,
randomized and genetic solvers, with lower bounds and an independent
feasibility checker.
"""
from ._seeding import derive_seed, make_rng
from ._version import __version__
from .bench import BenchmarkRecord, aggregate, run_benchmark
from .bounds import (
    BoundsReport,
    clique_bound,
    clique_lower_bound,
    compute_bounds,
    hamiltonian_bound,
    mst_bound,
    triangle_check,
)
from .check import check_feasibility, count_violations
from .errors import *  # noqa: F401,F403
from .ga import GaConfig, crossover, fitness, mutate, run_ga
from .generate import GeneratorConfig, generate_topology
from .graph import ConstraintGraph, from_separation, highest_degree_vertex, read_celar, remove_vertex
from .model import (
    Assignment,
    FrequencyPlan,
    Link,
    Node,
    SolutionMetrics,
    Topology,
    build_plan,
    plan_from_count,
    range_of,
)
from .nfd import (
    NfdCurve,
    SeparationMatrix,
    SpectralMask,
    build_constraints,
    build_nfd_curve,
    build_separation_matrix,
    compute_nfd,
    invert_nfd,
    quantize,
)
from .propagation import (
    AntennaPattern,
    InterferenceMatrix,
    LinkBudgetParams,
    antenna_gain,
    build_interference_matrix,
    interference_to_tackle,
    path_loss,
)
from .solvers import (
    SolutionPool,
    SolverConfig,
    assign_freq_to,
    cog,
    enhanced_solve,
    hedge,
    hybrid,
    psi,
    score,
)
