"""Lower bounds, and when the Hamiltonian-path bound is exact.

Run: python demos/02_bounds.py
"""
import numpy as np

from fapnfd import SeparationMatrix, compute_bounds, hedge, plan_from_count

plan = plan_from_count(100)

# separations that respect the triangle inequality: the bound is the optimum
metric = SeparationMatrix.from_pairs(range(3), [(0, 1, 2), (1, 2, 3), (0, 2, 4)])
rep = compute_bounds(metric, plan)
a = hedge(metric, plan)
print(f"metric triangle: ham bound {rep.ham_lb}, certified={rep.range_optimal_certified}, "
      f"HEDGE span {a.span}")

# a path a-b-c: a and c may share a channel, so the completed graph is not metric
path = SeparationMatrix.from_pairs(range(3), [(0, 1, 2), (1, 2, 3)])
rep = compute_bounds(path, plan)
print(f"path: ham bound {rep.ham_lb}, triangle ok={rep.triangle_ok}, "
      f"HEDGE span {hedge(path, plan).span} (bound is not tight here)")

# random instance: clique bound on the frequency count
rng = np.random.default_rng(0)
q = np.triu(rng.integers(1, 4, (12, 12)) * (rng.random((12, 12)) < 0.5), 1)
sep = SeparationMatrix(tuple(range(12)), q + q.T)
rep = compute_bounds(sep, plan)
a = hedge(sep, plan)
print(f"random 12 links: clique bound {rep.clique_lb} <= used {a.used_count}; "
      f"range bound {rep.range_lb} <= span {a.span}")
