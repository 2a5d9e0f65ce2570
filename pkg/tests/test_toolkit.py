import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fapnfd import io as fio
from fapnfd.bench import aggregate, default_workers, run_benchmark
from fapnfd.bounds import compute_bounds
from fapnfd.check import check_feasibility, count_violations
from fapnfd.errors import InvalidParameters, PlacementFailure
from fapnfd.generate import GeneratorConfig, generate_topology
from fapnfd.model import Assignment, build_plan, plan_from_count
from fapnfd.nfd import SeparationMatrix
from fapnfd.solvers import SolverConfig, enhanced_solve, hedge

from instances import random_sep, table1_instance


# -- generator ---------------------------------------------------------------
def test_generator_counts():
    t = generate_topology(GeneratorConfig(n_links=150, seed=0))
    assert len(t.nodes) == 300 and len(t.links) == 150
    t1 = generate_topology(GeneratorConfig(n_links=1, seed=0))
    assert len(t1.nodes) == 2 and len(t1.links) == 1


def test_generator_is_seeded():
    a = generate_topology(GeneratorConfig(n_links=20, seed=4))
    b = generate_topology(GeneratorConfig(n_links=20, seed=4))
    c = generate_topology(GeneratorConfig(n_links=20, seed=5))
    assert a == b and a != c


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 60), st.booleans())
def test_generator_geometry(seed, n, bidir):
    n = n + (n % 2 if bidir else 0)
    cfg = GeneratorConfig(n_links=n, seed=seed, bidirectional=bidir)
    t = generate_topology(cfg)
    pos = {node.id: node.position for node in t.nodes}
    outs = [l.tx for l in t.links]
    ins = [l.rx for l in t.links]
    assert len(set(outs)) == len(outs) and len(set(ins)) == len(ins)
    for l in t.links:
        (x0, y0), (x1, y1) = pos[l.tx], pos[l.rx]
        assert math.hypot(x1 - x0, y1 - y0) <= cfg.max_link_length_km + 1e-9
    for x, y in pos.values():
        r = cfg.cluster_radius_km
        assert -r <= x <= cfg.area_km + r and -r <= y <= cfg.area_km + r


def test_generator_bidirectional_pairs():
    t = generate_topology(GeneratorConfig(n_links=10, seed=1, bidirectional=True))
    pairs = {(l.tx, l.rx) for l in t.links}
    assert all((rx, tx) in pairs for tx, rx in pairs)
    assert len(t.nodes) == 10


def test_generator_placement_failure():
    cfg = GeneratorConfig(n_links=2, area_km=1000, max_link_length_km=5, seed=0, max_retries=3)
    with pytest.raises(PlacementFailure):
        generate_topology(cfg)


def test_generator_config_validation():
    with pytest.raises(InvalidParameters):
        GeneratorConfig(n_links=0)
    with pytest.raises(InvalidParameters):
        GeneratorConfig(area_km=10, max_link_length_km=20)
    assert GeneratorConfig(n_links=150).clusters == 30


# -- checker -----------------------------------------------------------------
def test_checker_flags_both_ends_of_a_boundary_violation():
    sep = SeparationMatrix.from_pairs([1, 2, 3], [(1, 2, 4), (2, 3, 1)])
    plan = plan_from_count(20)
    good = Assignment({1: 1, 2: 5, 3: 9})
    assert check_feasibility(good, sep, plan).feasible
    bad = Assignment({1: 1, 2: 4, 3: 9})
    m = check_feasibility(bad, sep, plan)
    assert not m.feasible and m.fail_count == 2
    assert count_violations(bad, sep) == 1


def test_checker_empty_instance():
    m = check_feasibility(Assignment({}), SeparationMatrix((), np.zeros((0, 0))), plan_from_count(1))
    assert m.feasible and m.fail_count == 0


def test_checker_domain_and_missing_links():
    sep = SeparationMatrix.from_pairs([1, 2], [])
    plan = plan_from_count(5)
    assert check_feasibility(Assignment({1: 1}), sep, plan).fail_count == 1
    assert check_feasibility(Assignment({1: 1, 2: 6}), sep, plan).fail_count == 1
    assert check_feasibility(Assignment({1: 1, 2: 1, 7: 1}), sep, plan).fail_count == 1


def test_checker_range_cap():
    sep = SeparationMatrix.from_pairs([1, 2, 3], [])
    plan = plan_from_count(20, delta_f=1, bandwidth=1)
    a = Assignment({1: 1, 2: 3, 3: 8})
    assert check_feasibility(a, sep, plan, range_cap_mhz=8).feasible
    m = check_feasibility(a, sep, plan, range_cap_mhz=5)
    assert not m.feasible and m.fail_count == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.data())
def test_checker_catches_every_single_corruption(seed, n, data):
    """On instances where every pair is constrained, moving any one link onto
    another link's index is always flagged."""
    rng = np.random.default_rng(seed)
    q = rng.integers(1, 4, (n, n))
    q = np.triu(q, 1)
    sep = SeparationMatrix(tuple(range(n)), q + q.T)
    plan = plan_from_count(60)
    a = hedge(sep, plan)
    v = data.draw(st.integers(0, n - 1))
    u = data.draw(st.integers(0, n - 1).filter(lambda k: k != v))
    corrupt = dict(a.items())
    corrupt[v] = a[u]
    assert not check_feasibility(Assignment(corrupt), sep, plan).feasible


# -- file formats --------------------------------------------------------------
def test_topology_round_trip(tmp_path):
    t = generate_topology(GeneratorConfig(n_links=6, seed=2))
    plan = build_plan(7007.5, 7607.5, 15, 0.15)
    fio.write_topology(tmp_path / "t.json", t, plan, {"seeds": {"topology": 2}})
    t2, plan2 = fio.read_topology(tmp_path / "t.json")
    assert t2 == t and plan2 == plan


def test_assignment_round_trip(tmp_path):
    sep = random_sep(np.random.default_rng(0), 6)
    plan = plan_from_count(30)
    a = hedge(sep, plan)
    m = check_feasibility(a, sep, plan)
    fio.write_assignment(tmp_path / "a.json", a, m, {"seed": 1})
    a2, metrics, meta = fio.read_assignment(tmp_path / "a.json")
    assert a2 == a and metrics["used_count"] == m.used_count and meta["seed"] == 1
    (tmp_path / "bare.json").write_text('{"4": 2, "7": 9}')
    assert fio.read_assignment(tmp_path / "bare.json")[0] == Assignment({4: 2, 7: 9})


def test_separation_csv_round_trip(tmp_path):
    _, plan, sep = table1_instance(20, 1)
    path = tmp_path / "sep.csv"
    fio.write_separation_csv(path, sep, plan, {"seeds": {"topology": 1}})
    text = path.read_text().splitlines()
    assert text[0].startswith("# ") and '"version"' in text[0] and '"seeds"' in text[0]
    assert text[1] == "i,j,S_MHz,sep_quantized"
    sep2, plan2 = fio.read_separation_csv(path)
    assert sep2.link_ids == sep.link_ids
    assert np.array_equal(sep2.quantized, sep.quantized)
    assert plan2 == plan
    rows = [tuple(map(float, r.split(","))) for r in text[2:]]
    assert all(i < j and q > 0 for i, j, _, q in rows)


def test_separation_csv_without_metadata(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("i,j,S_MHz,sep_quantized\n1,2,0.6,4\n2,5,0.3,2\n")
    sep, plan = fio.read_separation_csv(path)
    assert sep.link_ids == (1, 2, 5) and sep.sep(1, 2) == 4
    assert plan.n_freqs == 7
    assert fio.read_separation_csv(path, n_freqs=30)[1].n_freqs == 30


def test_bad_csv_is_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidParameters):
        fio.read_separation_csv(path)
    path.write_text("i,j,S_MHz,sep_quantized\n1,x,0.6,4\n")
    with pytest.raises(InvalidParameters):
        fio.read_separation_csv(path)


def test_pool_csv_is_byte_stable():
    sep = random_sep(np.random.default_rng(1), 12)
    plan = plan_from_count(50)
    cfg = SolverConfig(replications=30, seed=3)
    texts = [fio.pool_csv(enhanced_solve(sep, plan, cfg), 0.5, {"seeds": {"solver": 3}})
             for _ in range(2)]
    assert texts[0] == texts[1]
    lines = texts[0].splitlines()
    assert lines[1] == "seed,strategy,used_count,range_mhz,psi,pareto_flag"
    assert len(lines) - 2 == len(enhanced_solve(sep, plan, cfg))


def test_bounds_csv_row(tmp_path):
    sep = random_sep(np.random.default_rng(1), 8)
    rep = compute_bounds(sep, plan_from_count(50))
    fio.write_bounds_csv(tmp_path / "b.csv", rep, {"seeds": {}})
    meta, header, rows = fio.read_csv(tmp_path / "b.csv")
    assert meta["version"] and len(rows) == 1
    assert dict(zip(header, rows[0]))["clique_lb"] == str(rep.clique_lb)


# -- benchmark -----------------------------------------------------------------
def _bench_instance():
    _, plan, sep = table1_instance(40, 2)
    return sep, plan


def test_benchmark_unlimited_matches_direct_solve():
    sep, plan = _bench_instance()
    cfg = SolverConfig(replications=15)
    rec, = run_benchmark(sep, plan, ["hedge"], [math.inf], 1, seed=4, config=cfg)
    direct = enhanced_solve(sep, plan, SolverConfig(replications=15, seed=rec.seed))
    best = min(direct, key=lambda e: (e.metrics.used_count, e.metrics.range_mhz))
    assert rec.feasible and rec.used_count == best.metrics.used_count
    assert rec.range_mhz == pytest.approx(best.metrics.range_mhz)


def test_benchmark_records_and_nesting():
    sep, plan = _bench_instance()
    recs = run_benchmark(sep, plan, ["hedge", "ga"], [0.05, 0.1, 0.2], 2, seed=1)
    assert len(recs) == 2 * 3 * 2
    for m in ("hedge", "ga"):
        for r in range(2):
            mine = [x for x in recs if x.method == m and x.replication == r]
            assert len({x.seed for x in mine}) == 1
            finals = [x.used_count for x in mine]
            assert finals == sorted(finals, reverse=True)
            for x in mine:
                counts = [u for _, u in x.trace]
                assert counts == sorted(counts, reverse=True)
    agg = aggregate(recs)
    assert len(agg) == 6 and all(a["n"] == 2 for a in agg)
    assert all(a["used_count_min"] <= a["used_count_mean"] <= a["used_count_max"] for a in agg)


def test_benchmark_records_infeasible_outcomes(uniform_sep):
    recs = run_benchmark(uniform_sep(3, 5), plan_from_count(6), ["hedge", "cog", "ga"], [0.05], 2,
                         config=SolverConfig(replications=3))
    assert recs and not any(r.feasible for r in recs)
    assert all(r.used_count is None for r in recs)
    agg = aggregate(recs)
    assert all(a["n_feasible"] == 0 and a["used_count_mean"] is None for a in agg)


def test_benchmark_validation():
    sep, plan = _bench_instance()
    with pytest.raises(InvalidParameters):
        run_benchmark(sep, plan, ["hedge"], [2.0, 1.0], 1)
    with pytest.raises(InvalidParameters):
        run_benchmark(sep, plan, ["tabu"], [1.0], 1)


def test_benchmark_parallel_matches_serial():
    sep, plan = _bench_instance()
    cfg = SolverConfig(replications=5)
    serial = run_benchmark(sep, plan, ["hedge", "hybrid"], [math.inf], 2, seed=2, config=cfg, workers=1)
    parallel = run_benchmark(sep, plan, ["hedge", "hybrid"], [math.inf], 2, seed=2, config=cfg, workers=2)
    key = lambda r: (r.method, r.replication, r.seed, r.used_count, r.range_mhz)
    assert list(map(key, serial)) == list(map(key, parallel))


def test_worker_env(monkeypatch):
    monkeypatch.setenv("FAPNFD_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("FAPNFD_WORKERS", "zero")
    assert default_workers() == 1
