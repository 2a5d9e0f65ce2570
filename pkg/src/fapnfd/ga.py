"""Genetic refinement of a greedy solution.

A genome lists the frequency index of every link, in link-id order.
Fitness is ``|A| * (n_fail + modifier)`` where ``n_fail`` counts links
involved in at least one violated separation; smaller is fitter and ties
go to the smaller span.  Infeasible individuals breed but never enter the
returned pool.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ._seeding import make_rng
from .check import check_feasibility
from .errors import InvalidParameters, LengthMismatch
from .model import Assignment
from .solvers import SolutionPool


@dataclass(frozen=True)
class GaConfig:
    population: int = 50
    generations: int = 200
    modifier: float = 1.0
    mutation_rate: float = 0.2
    elite_fraction: float = 0.2
    seed: int = 0
    range_cap_mhz: float | None = None
    time_limit_s: float | None = None

    def __post_init__(self):
        if self.population < 1:
            raise InvalidParameters("population must be >= 1")
        if not self.modifier > 0:
            raise InvalidParameters("modifier must be > 0")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise InvalidParameters("mutation rate must lie in [0, 1]")
        if not 0.0 < self.elite_fraction <= 1.0:
            raise InvalidParameters("elite fraction must lie in (0, 1]")

    @property
    def n_elite(self):
        return max(1, math.ceil(self.elite_fraction * self.population - 1e-9))


@dataclass(frozen=True, eq=False)
class Individual:
    genome: np.ndarray
    fitness: float
    feasible: bool
    n_fail: int
    used_count: int
    span: int

    @property
    def key(self):
        return (self.fitness, self.span)


def failing_links(genome, q):
    """Boolean mask of links with at least one violated separation."""
    g = np.asarray(genome)
    viol = (np.abs(g[:, None] - g[None, :]) < q) & (q > 0)
    return viol.any(axis=1)


def fitness(genome, sep, modifier=1.0):
    """``|A| * (n_fail + modifier)`` for a genome (or Individual) over ``sep``'s links."""
    g = np.asarray(getattr(genome, "genome", genome))
    n_fail = int(failing_links(g, sep.quantized).sum())
    return len(np.unique(g)) * (n_fail + modifier)


def evaluate(genome, sep, modifier):
    g = np.asarray(genome, dtype=np.int64)
    n_fail = int(failing_links(g, sep.quantized).sum())
    used = len(np.unique(g))
    span = int(g.max() - g.min()) if g.size else 0
    return Individual(g, used * (n_fail + modifier), n_fail == 0, n_fail, used, span)


def genome_of(assignment, sep):
    return np.array([assignment[l] for l in sep.link_ids], dtype=np.int64)


def assignment_of(genome, sep):
    return Assignment(dict(zip(sep.link_ids, (int(k) for k in genome))))


# -- initial population operators ----------------------------------------
def swap(genome, rng, pair=None):
    """Exchange the indices of two links."""
    g = np.array(genome)
    if g.size < 2:
        return g
    a, b = pair if pair is not None else rng.choice(g.size, 2, replace=False)
    g[a], g[b] = g[b], g[a]
    return g


def change(genome, rng, to="most"):
    """Re-point a random link to the most- or least-used index."""
    g = np.array(genome)
    vals, counts = np.unique(g, return_counts=True)
    pick = vals[np.argmax(counts)] if to == "most" else vals[np.argmin(counts)]
    g[rng.integers(g.size)] = pick
    return g


def add_frequency(genome, sep, n_freqs, rng):
    """Move a random link to a currently unused index that breaks no constraint.

    Returns an unchanged copy when the chosen link has no such index.
    """
    g = np.array(genome)
    v = int(rng.integers(g.size))
    q = sep.quantized[v]
    others = np.arange(g.size) != v
    cand = np.setdiff1d(np.arange(1, n_freqs + 1), g)
    if cand.size == 0:
        return g
    gaps = np.abs(cand[:, None] - g[None, others])
    ok = (gaps >= q[None, others]).all(axis=1)
    if ok.any():
        g[v] = rng.choice(cand[ok])
    return g


def permute(genome, rng):
    """Shuffle the genome's values over the links."""
    return rng.permutation(np.asarray(genome))


def init_population(seed_solution, config, sep, plan, rng):
    """Seed genome plus variants made by swap/change/add/permute, cycled."""
    base = genome_of(seed_solution, sep)
    ops = (
        lambda g: swap(g, rng),
        lambda g: change(g, rng, "most"),
        lambda g: change(g, rng, "least"),
        lambda g: add_frequency(g, sep, plan.n_freqs, rng),
        lambda g: permute(g, rng),
    )
    pop = [evaluate(base, sep, config.modifier)]
    i = 0
    while len(pop) < config.population:
        pop.append(evaluate(ops[i % len(ops)](base), sep, config.modifier))
        i += 1
    return pop


# -- genetic operators ----------------------------------------------------
def crossover(a, b, rng):
    """Uniform crossover: each gene from ``a`` or ``b`` with probability 1/2."""
    ga, gb = np.asarray(a), np.asarray(b)
    if ga.shape != gb.shape:
        raise LengthMismatch(f"genomes of length {ga.size} and {gb.size}")
    take_a = rng.random(ga.size) < 0.5
    return np.where(take_a, ga, gb)


def mutate(genome, rng):
    """Merge one used index (never the highest) into the next higher used index."""
    g = np.array(genome)
    used = np.unique(g)
    if used.size < 2:
        return g
    k = int(rng.integers(used.size - 1))
    g[g == used[k]] = used[k + 1]
    return g


def _sort(pop):
    return sorted(pop, key=lambda ind: ind.key)


def run_ga(sep, plan, seed_solution, config=None):
    """Evolve from ``seed_solution``; returns the pool of feasible genomes met.

    A feasible seed solution is always in the pool.  ``pool.meta["best_fitness"]``
    lists the population's best fitness after each generation (index 0 is
    the initial population).
    """
    config = config or GaConfig()
    t0 = time.perf_counter()
    pool = SolutionPool(meta={"base": "ga", "seed": config.seed})
    seed_metrics = check_feasibility(seed_solution, sep, plan, config.range_cap_mhz)
    best_used = math.inf
    if seed_metrics.feasible:
        pool.add(seed_solution, seed_metrics, config.seed, "ga", 0.0)
        best_used = seed_metrics.used_count
        pool.trace.append((0.0, best_used))

    def harvest(ind):
        nonlocal best_used
        if not ind.feasible:
            return
        a = assignment_of(ind.genome, sep)
        if a in pool:
            return
        m = check_feasibility(a, sep, plan, config.range_cap_mhz)
        now = time.perf_counter() - t0
        if m.feasible and pool.add(a, m, config.seed, "ga", now) and m.used_count < best_used:
            best_used = m.used_count
            pool.trace.append((now, best_used))

    pop = _sort(init_population(seed_solution, config, sep, plan, make_rng(config.seed, 0, 0)))
    for ind in pop:
        harvest(ind)
    history = [pop[0].fitness]
    n_elite = min(config.n_elite, len(pop))
    for gen in range(1, config.generations + 1):
        if config.time_limit_s is not None and time.perf_counter() - t0 >= config.time_limit_s:
            break
        elites = pop[:n_elite]
        children = []
        for slot in range(config.population - n_elite):
            rng = make_rng(config.seed, gen, slot + 1)
            i, j = rng.integers(n_elite, size=2)
            child = crossover(elites[i].genome, elites[j].genome, rng)
            if rng.random() < config.mutation_rate:
                child = mutate(child, rng)
            ind = evaluate(child, sep, config.modifier)
            harvest(ind)
            children.append(ind)
        pop = _sort(elites + children)
        history.append(pop[0].fitness)
    pool.meta["best_fitness"] = history
    return pool
