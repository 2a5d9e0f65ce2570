import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fapnfd.errors import EmptyGraph, UnknownVertex
from fapnfd.graph import from_separation, highest_degree_vertex, read_celar, remove_vertex
from fapnfd.nfd import SeparationMatrix

from instances import random_sep


def graph_of(n, edges):
    return from_separation(SeparationMatrix.from_pairs(range(n), edges))


def star(leaves=4):
    return graph_of(leaves + 1, [(0, k, 1) for k in range(1, leaves + 1)])


def test_zero_matrix_gives_isolated_vertices():
    g = from_separation(SeparationMatrix(tuple(range(5)), np.zeros((5, 5), dtype=int)))
    assert len(g) == 5 and g.n_edges == 0


def test_uniform_two_gives_weighted_k4(uniform_sep):
    g = from_separation(uniform_sep(4, 2))
    assert g.n_edges == 6
    assert {w for _, _, w in g.edges()} == {2}


def test_star_ranks():
    g = star()
    assert highest_degree_vertex(g) == 0
    assert highest_degree_vertex(g, rank=2) in {1, 2, 3, 4}


def test_regular_graph_rank_two_falls_back(uniform_sep):
    g = from_separation(uniform_sep(4, 1))
    assert highest_degree_vertex(g, rank=2) == highest_degree_vertex(g, rank=1) == 1


def test_second_distinct_degree():
    # degrees 5, 5, 3, 1 plus padding leaves
    edges = [(0, 1, 1), (0, 2, 1), (0, 4, 1), (0, 5, 1), (0, 6, 1),
             (1, 2, 1), (1, 7, 1), (1, 8, 1), (1, 9, 1), (2, 3, 1)]
    g = graph_of(10, edges)
    assert g.degree(0) == g.degree(1) == 5 and g.degree(2) == 3
    assert highest_degree_vertex(g, rank=2) == 2


def test_random_ties_stay_in_tier():
    g = star(6)
    rng = np.random.default_rng(0)
    picks = {highest_degree_vertex(g, 2, rng) for _ in range(50)}
    assert picks <= {1, 2, 3, 4, 5, 6} and len(picks) > 1


def test_remove_hub():
    g = remove_vertex(star(), 0)
    assert len(g) == 4 and g.n_edges == 0
    assert all(d == 0 for d in g.degrees().values())


def test_remove_from_k4(uniform_sep):
    g = remove_vertex(from_separation(uniform_sep(4, 1)), 1)
    assert len(g) == 3 and g.n_edges == 3
    assert set(g.degrees().values()) == {2}


def test_remove_last_vertex():
    g = remove_vertex(graph_of(1, []), 0)
    assert len(g) == 0
    with pytest.raises(EmptyGraph):
        highest_degree_vertex(g)


def test_unknown_vertex():
    g = star()
    with pytest.raises(UnknownVertex):
        remove_vertex(g, 99)
    remove_vertex(g, 1)
    with pytest.raises(UnknownVertex):
        remove_vertex(g, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_degrees_track_live_subgraph(seed, n):
    rng = np.random.default_rng(seed)
    sep = random_sep(rng, n)
    g = from_separation(sep)
    removed = set()
    for v in rng.permutation(n)[: n // 2]:
        g.remove_vertex(int(v))
        removed.add(int(v))
    if removed:
        back = sorted(removed)[0]
        g.restore_vertex(back)
        removed.discard(back)
    live = [v for v in range(n) if v not in removed]
    for v in live:
        expect = sum(1 for u in live if u != v and sep.quantized[v, u] > 0)
        assert g.degree(v) == expect
        assert sorted(g.neighbors(v)) == [u for u in live if u != v and sep.quantized[v, u] > 0]


def test_weighted_degree_option():
    sep = SeparationMatrix.from_pairs(range(4), [(0, 1, 9), (2, 1, 1), (2, 3, 1), (2, 0, 1)])
    assert highest_degree_vertex(from_separation(sep)) == 2
    assert highest_degree_vertex(from_separation(sep, weighted_degree=True)) == 0


CTR = """\
   1    2 F > 238
   1    3 D = 5
   2    4 D > 10
   3    4 D < 3
   5    6 C > -1
"""


def test_read_celar(tmp_path):
    ctr = tmp_path / "ctr.txt"
    ctr.write_text(CTR)
    (tmp_path / "var.txt").write_text("1 1\n2 1\n3 1\n4 1\n5 1\n6 1\n7 1\n")
    (tmp_path / "dom.txt").write_text("1 4 10 20 300 400\n")
    sep, n_freqs = read_celar(ctr)
    assert sep.link_ids == (1, 2, 3, 4, 5, 6, 7)
    assert sep.sep(1, 2) == 239          # '>' s  ->  s + 1
    assert sep.sep(1, 3) == 5            # '=' s  ->  at least s
    assert sep.sep(2, 4) == 11
    assert sep.sep(3, 4) == 0            # '<' carries no separation
    assert sep.sep(5, 6) == 0            # '> -1' is always satisfied
    assert n_freqs == 400


def test_read_celar_without_side_files(tmp_path):
    ctr = tmp_path / "ctr.txt"
    ctr.write_text("1 2 D > 3\n2 3 D > 1\n")
    sep, n_freqs = read_celar(ctr)
    assert sep.link_ids == (1, 2, 3) and sep.n_constraints == 2
    assert n_freqs == 4 + 2 + 1
    assert read_celar(ctr, n_freqs=50)[1] == 50
