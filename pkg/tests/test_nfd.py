import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fapnfd.errors import InvalidParameters, UnreachableTarget
from fapnfd.nfd import (
    SeparationMatrix,
    SpectralMask,
    build_nfd_curve,
    build_separation_matrix,
    compute_nfd,
    curve_from_table,
    default_mask,
    invert_nfd,
    quantize,
)
from fapnfd.propagation import InterferenceMatrix

from oracles import nfd_numeric


@st.composite
def masks(draw):
    """Valid piecewise-linear masks: offsets increasing from 0, levels <= 0 from 0 dB."""
    n = draw(st.integers(1, 5))
    steps = draw(st.lists(st.floats(0.05, 10), min_size=n, max_size=n))
    levels = draw(st.lists(st.floats(-80, 0), min_size=n, max_size=n))
    return SpectralMask(tuple(np.concatenate([[0.0], np.cumsum(steps)])), (0.0, *levels))


def test_nfd_zero_offset_default():
    m = default_mask()
    assert compute_nfd(m, m, 0.0) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(masks(), masks())
def test_nfd_zero_offset_any_masks(tx, rx):
    assert abs(compute_nfd(tx, rx, 0.0)) <= 1e-9


def test_rectangle_half_overlap():
    w = 15.0
    r = SpectralMask.rectangular(w)
    assert compute_nfd(r, r, w / 2) == pytest.approx(10 * math.log10(2), abs=1e-3)


def test_rectangle_disjoint_hits_floor():
    r = SpectralMask.rectangular(10.0, floor_db=-120)
    # beyond full separation only floor leakage remains: more than 100 dB
    assert compute_nfd(r, r, 12.0) > 100


@settings(max_examples=10, deadline=None)
@given(masks(), st.floats(0, 20))
def test_nfd_matches_numeric_integration(m, df):
    exact = compute_nfd(m, m, df)
    assert exact == pytest.approx(nfd_numeric(m, m, df), abs=0.02)


def test_nfd_negative_offset_rejected():
    with pytest.raises(InvalidParameters):
        compute_nfd(default_mask(), default_mask(), -1.0)


def test_curve_monotone_and_starts_at_zero():
    c = build_nfd_curve(default_mask(), default_mask(), 0.15)
    assert c.values[0] == 0.0
    assert np.all(np.diff(c.values) >= 0)


TABLE = curve_from_table([0, 0.15, 0.3, 0.45, 0.6], [0, 5, 10, 15, 20])


@pytest.mark.parametrize("target, expected", [(-5, 0.0), (0, 0.0), (18, 0.6), (15, 0.45), (20, 0.6)])
def test_invert(target, expected):
    assert invert_nfd(TABLE, target) == pytest.approx(expected)


def test_invert_is_smallest_offset_by_scan():
    c = build_nfd_curve(default_mask(), default_mask(), 0.15)
    for target in np.linspace(0.1, c.max_nfd, 37):
        got = invert_nfd(c, target)
        scan = next(k for k, v in enumerate(c.values) if v >= target) * c.resolution
        assert got == pytest.approx(scan)


def test_invert_unreachable():
    with pytest.raises(UnreachableTarget) as e:
        invert_nfd(TABLE, 25)
    assert e.value.required_db == 25


@pytest.mark.parametrize("s, expected", [(0.6, 4), (0.1500001, 2), (0.15, 1), (0.0, 0), (0.3, 2)])
def test_quantize(s, expected):
    assert int(quantize(s, 0.15)) == expected


@given(st.floats(0, 100), st.floats(0.01, 5))
def test_quantize_covers_separation(s, df):
    q = int(quantize(s, df))
    assert q * df >= s - 1e-6
    assert (q - 1) * df < s + 1e-6


def _imat(values):
    v = np.array(values, dtype=float)
    np.fill_diagonal(v, np.nan)
    return InterferenceMatrix(tuple(range(len(v))), v)


def test_separation_from_curve():
    sep = build_separation_matrix(_imat([[0, 18], [-3, 0]]), TABLE, 0.15)
    assert sep.quantized[0, 1] == sep.quantized[1, 0] == 4
    assert sep.raw_mhz[0, 1] == pytest.approx(0.6)


def test_separation_both_negative_is_unconstrained():
    sep = build_separation_matrix(_imat([[0, -1], [-2, 0]]), TABLE, 0.15)
    assert sep.n_constraints == 0


def test_separation_shared_node_sentinel():
    sep = build_separation_matrix(_imat([[0, np.inf], [2, 0]]), TABLE, 0.15, n_freqs=77)
    assert sep.quantized[0, 1] == 77
    assert sep.shared_node[0, 1] and sep.shared_node[1, 0]
    custom = build_separation_matrix(_imat([[0, np.inf], [2, 0]]), TABLE, 0.15,
                                     shared_node_separation=3)
    assert custom.quantized[0, 1] == 3


def test_separation_unreachable_pair():
    with pytest.raises(UnreachableTarget) as e:
        build_separation_matrix(_imat([[0, 40], [0, 0]]), TABLE, 0.15)
    assert e.value.pair == (0, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_separation_symmetric_and_monotone_in_interference(n, seed):
    rng = np.random.default_rng(seed)
    vals = rng.uniform(-10, 20, size=(n, n))
    sep = build_separation_matrix(_imat(vals), TABLE, 0.15)
    q = sep.quantized
    assert np.array_equal(q, q.T) and np.all(np.diag(q) == 0)
    louder = build_separation_matrix(_imat(np.minimum(vals + 3, 20)), TABLE, 0.15)
    assert np.all(louder.quantized >= q)


def test_separation_matrix_validation():
    with pytest.raises(InvalidParameters):
        SeparationMatrix((0, 1), [[0, 1], [2, 0]])
    with pytest.raises(InvalidParameters):
        SeparationMatrix((0, 0), [[0, 1], [1, 0]])
    s = SeparationMatrix.from_pairs([5, 3, 9], [(3, 5, 2), (5, 3, 4), (9, 3, 1)])
    assert s.link_ids == (3, 5, 9)
    assert s.sep(3, 5) == 4 and s.sep(9, 3) == 1 and s.sep(5, 9) == 0
    assert s.pairs() == [(3, 5, 4), (3, 9, 1)]
