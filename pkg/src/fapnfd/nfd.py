"""Net filter discrimination and the quantized separation matrix.

NFD(Δf) = 10 log10(P_c / P_a), where P_c is the power a receiver filter
passes from a co-channel transmitter and P_a the power passed when the
transmitter is offset by Δf.  Masks are piecewise linear in dB over the
baseband offset, so inside every interval between merged breakpoints the
linear-scale integrand is an exponential and is integrated in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DegenerateMask, InvalidParameters, UnreachableTarget

DEFAULT_FLOOR_DB = -120.0
_LN10_10 = math.log(10.0) / 10.0
_QUANT_EPS = 1e-9


@dataclass(frozen=True)
class SpectralMask:
    """Symmetric mask given by ``(offset_MHz, level_dB)`` samples for offsets >= 0.

    Levels are relative to the peak (``level(0) == 0``).  Two samples may
    share an offset to encode a vertical step.  Beyond the last sample the
    level drops to ``floor_db``.
    """

    offsets: tuple[float, ...]
    levels: tuple[float, ...]
    floor_db: float = DEFAULT_FLOOR_DB

    def __post_init__(self):
        x = np.asarray(self.offsets, dtype=float)
        y = np.asarray(self.levels, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise InvalidParameters("mask needs at least two (offset, level) samples")
        if x[0] != 0.0 or y[0] != 0.0:
            raise InvalidParameters("mask must start at (0 MHz, 0 dB)")
        dx = np.diff(x)
        if np.any(dx < 0) or np.any((dx[:-1] == 0) & (dx[1:] == 0)) or dx[0] == 0:
            raise InvalidParameters("mask offsets must be non-decreasing with single steps only")
        if np.any(y > 0) or not np.all(np.isfinite(y)):
            raise InvalidParameters("mask levels must be finite and <= 0 dB")
        object.__setattr__(self, "offsets", tuple(x.tolist()))
        object.__setattr__(self, "levels", tuple(y.tolist()))

    @property
    def extent(self):
        return self.offsets[-1]

    def full(self):
        """Breakpoints mirrored onto negative offsets."""
        x = np.asarray(self.offsets)
        y = np.asarray(self.levels)
        xs = np.concatenate([-x[:0:-1], x])
        ys = np.concatenate([y[:0:-1], y])
        return xs, ys

    @classmethod
    def rectangular(cls, width, floor_db=DEFAULT_FLOOR_DB):
        h = width / 2.0
        return cls((0.0, h, h), (0.0, 0.0, floor_db), floor_db)


def load_mask(path, floor_db=DEFAULT_FLOOR_DB):
    """Read a two-column ``offset_MHz level_dB`` file (offsets >= 0, mirrored)."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    return SpectralMask(tuple(data[:, 0]), tuple(data[:, 1]), floor_db)


def default_mask():
    """15 MHz channel mask used both as transmitter mask and receiver response."""
    with resources.as_file(resources.files("fapnfd") / "data" / "mask_default.txt") as p:
        return load_mask(p)


def _segment_levels(xs, ys, floor_db, a, b):
    """Linear dB levels at the ends of intervals ``(a, b)`` of a piecewise-linear mask."""
    mid = 0.5 * (a + b)
    k = np.searchsorted(xs, mid, side="right") - 1
    inside = (k >= 0) & (k < len(xs) - 1)
    kc = np.clip(k, 0, len(xs) - 2)
    x0, x1 = xs[kc], xs[kc + 1]
    y0, y1 = ys[kc], ys[kc + 1]
    width = np.where(x1 > x0, x1 - x0, 1.0)
    slope = (y1 - y0) / width
    la = np.where(inside, y0 + (a - x0) * slope, floor_db)
    lb = np.where(inside, y0 + (b - x0) * slope, floor_db)
    return la, lb


def _overlap_power(mask, filt, shift):
    """∫ D(f - shift) |H(f)|^2 df over the joint support (linear units)."""
    xd, yd = mask.full()
    xh, yh = filt.full()
    xd = xd + shift
    lo = min(xd[0], xh[0])
    hi = max(xd[-1], xh[-1])
    grid = np.unique(np.concatenate([xd, xh, [lo, hi]]))
    a, b = grid[:-1], grid[1:]
    da, db = _segment_levels(xd, yd, mask.floor_db, a, b)
    ha, hb = _segment_levels(xh, yh, filt.floor_db, a, b)
    ga, gb = da + ha, db + hb
    length = b - a
    dg = gb - ga
    flat = np.abs(dg) < 1e-12
    safe = np.where(flat, 1.0, dg)
    ea, eb = np.power(10.0, ga / 10.0), np.power(10.0, gb / 10.0)
    seg = np.where(flat, length * ea, length * (eb - ea) / (safe * _LN10_10))
    return float(seg.sum())


def compute_nfd(mask, filt, delta_f):
    """NFD in dB of transmitter ``mask`` through receiver response ``filt`` at offset ``delta_f``."""
    if delta_f < 0:
        raise InvalidParameters("frequency offset must be >= 0")
    p_c = _overlap_power(mask, filt, 0.0)
    if not p_c > 0:
        raise DegenerateMask("co-channel power integrates to zero")
    p_a = _overlap_power(mask, filt, float(delta_f))
    if p_a <= 0:
        return math.inf
    return 10.0 * math.log10(p_c / p_a)


@dataclass(frozen=True, eq=False)
class NfdCurve:
    """NFD tabulated at ``offsets = k * resolution``; non-decreasing, NFD(0) = 0."""

    resolution: float
    values: np.ndarray

    @property
    def offsets(self):
        return np.arange(len(self.values)) * self.resolution

    @property
    def max_nfd(self):
        return float(self.values[-1])

    def __call__(self, delta_f):
        k = int(math.floor(delta_f / self.resolution + _QUANT_EPS))
        return float(self.values[min(k, len(self.values) - 1)])


def build_nfd_curve(mask, filt, resolution, max_offset=None):
    """Tabulate NFD from 0 to ``max_offset`` and take the running maximum.

    The running maximum removes ripples from real masks so that the curve
    has a well-defined inverse; it can only over-separate, never under.
    """
    if not resolution > 0:
        raise InvalidParameters("resolution must be positive")
    if max_offset is None:
        max_offset = mask.extent + filt.extent + resolution
    n = int(math.floor(max_offset / resolution + _QUANT_EPS)) + 1
    raw = np.array([compute_nfd(mask, filt, k * resolution) for k in range(n)])
    raw[0] = 0.0
    vals = np.maximum.accumulate(raw)
    vals.setflags(write=False)
    return NfdCurve(float(resolution), vals)


def curve_from_table(offsets, values):
    """Build a curve from an explicit table on a uniform grid starting at 0."""
    off = np.asarray(offsets, dtype=float)
    if off.size < 1 or off[0] != 0:
        raise InvalidParameters("NFD table must start at offset 0")
    res = float(off[1] - off[0]) if off.size > 1 else 1.0
    if off.size > 1 and not np.allclose(np.diff(off), res):
        raise InvalidParameters("NFD table offsets must be uniformly spaced")
    vals = np.maximum.accumulate(np.asarray(values, dtype=float))
    vals[0] = 0.0
    vals = np.maximum.accumulate(vals)
    vals.setflags(write=False)
    return NfdCurve(res, vals)


def _invert_steps(curve, targets):
    targets = np.asarray(targets, dtype=float)
    steps = np.searchsorted(curve.values, targets, side="left")
    return np.where(targets <= 0, 0, steps)


def invert_nfd(curve, target):
    """Smallest tabulated offset (MHz) whose NFD reaches ``target`` dB."""
    if target <= 0:
        return 0.0
    if target > curve.max_nfd:
        raise UnreachableTarget(
            f"{target:.2f} dB of discrimination exceeds the curve maximum "
            f"{curve.max_nfd:.2f} dB",
            required_db=target,
        )
    return int(_invert_steps(curve, target)) * curve.resolution


def quantize(sep_mhz, delta_f):
    """ceil(S / delta_f) with float slack so exact multiples do not round up."""
    q = np.ceil(np.asarray(sep_mhz, dtype=float) / delta_f - _QUANT_EPS)
    return np.maximum(q, 0).astype(np.int64)


@dataclass(frozen=True, eq=False)
class SeparationMatrix:
    """Symmetric quantized separations between links.

    ``quantized[a, b]`` is the minimum index gap between ``link_ids[a]`` and
    ``link_ids[b]``; ``raw_mhz`` keeps the unquantized separation when it is
    known (``None`` for imported instances).  ``shared_node`` marks pairs
    whose separation is the shared-node stand-in.
    """

    link_ids: tuple[int, ...]
    quantized: np.ndarray
    delta_f: float = 1.0
    raw_mhz: np.ndarray | None = None
    shared_node: np.ndarray | None = None

    def __post_init__(self):
        ids = tuple(int(i) for i in self.link_ids)
        q = np.array(self.quantized, dtype=np.int64)
        n = len(ids)
        if q.shape != (n, n):
            raise InvalidParameters(f"separation matrix must be {n}x{n}, got {q.shape}")
        if len(set(ids)) != n:
            raise InvalidParameters("duplicate link ids in separation matrix")
        if not np.array_equal(q, q.T) or np.any(np.diag(q) != 0) or np.any(q < 0):
            raise InvalidParameters("separation matrix must be symmetric, non-negative, zero-diagonal")
        # keep links sorted by id so position order == id order
        order = np.argsort(ids, kind="stable")
        ids = tuple(ids[k] for k in order)
        q = q[np.ix_(order, order)]
        q.setflags(write=False)
        object.__setattr__(self, "link_ids", ids)
        object.__setattr__(self, "quantized", q)
        if self.raw_mhz is not None:
            raw = np.array(self.raw_mhz, dtype=float)[np.ix_(order, order)]
            raw.setflags(write=False)
            object.__setattr__(self, "raw_mhz", raw)
        sh = (
            np.zeros((n, n), dtype=bool)
            if self.shared_node is None
            else np.array(self.shared_node, dtype=bool)[np.ix_(order, order)]
        )
        sh.setflags(write=False)
        object.__setattr__(self, "shared_node", sh)

    @property
    def n_links(self):
        return len(self.link_ids)

    def position(self, link_id):
        return self.link_ids.index(link_id)

    def sep(self, i, j):
        """Quantized separation between link ids ``i`` and ``j``."""
        return int(self.quantized[self.position(i), self.position(j)])

    def pairs(self):
        """``(i, j, sep)`` for i < j with sep > 0, by link id."""
        a, b = np.nonzero(np.triu(self.quantized, 1))
        return [(self.link_ids[x], self.link_ids[y], int(self.quantized[x, y])) for x, y in zip(a, b)]

    @property
    def n_constraints(self):
        return int(np.count_nonzero(np.triu(self.quantized, 1)))

    @classmethod
    def from_pairs(cls, link_ids, pairs, delta_f=1.0):
        """Build from ``(i, j, sep)`` triples; repeated pairs keep the maximum."""
        ids = sorted(int(i) for i in link_ids)
        pos = {l: k for k, l in enumerate(ids)}
        q = np.zeros((len(ids), len(ids)), dtype=np.int64)
        for i, j, s in pairs:
            a, b = pos[int(i)], pos[int(j)]
            if a == b:
                raise InvalidParameters(f"self-constraint on link {i}")
            s = max(int(q[a, b]), int(s))
            q[a, b] = q[b, a] = s
        return cls(tuple(ids), q, delta_f)


def build_separation_matrix(interference, curve, delta_f, n_freqs=None, shared_node_separation=None):
    """Quantized separations from an interference matrix.

    ``S_ij = max(NFD^-1(ΔI_ij), NFD^-1(ΔI_ji))`` and the quantized value is
    ``ceil(S_ij / delta_f)``.  Pairs sharing a node (ΔI = +inf) get
    ``shared_node_separation``, which defaults to ``n_freqs`` so the two
    links can never fit in the same plan.
    """
    vals = np.asarray(interference.values, dtype=float)
    ids = interference.link_ids
    n = len(ids)
    shared = np.isposinf(vals)
    finite = np.where(shared | np.isnan(vals), -np.inf, vals)

    too_high = finite > curve.max_nfd
    if too_high.any():
        a, b = np.argwhere(too_high)[0]
        raise UnreachableTarget(
            f"links {ids[a]} -> {ids[b]} need {finite[a, b]:.2f} dB of discrimination, "
            f"curve maximum is {curve.max_nfd:.2f} dB",
            required_db=float(finite[a, b]),
            pair=(ids[a], ids[b]),
        )
    steps = _invert_steps(curve, finite)
    s_dir = steps * curve.resolution
    s = np.maximum(s_dir, s_dir.T)
    np.fill_diagonal(s, 0.0)
    q = quantize(s, delta_f)

    shared_pair = shared | shared.T
    if shared_pair.any():
        if shared_node_separation is None:
            if n_freqs is None:
                raise InvalidParameters("n_freqs is required when links share a node")
            shared_node_separation = n_freqs
        q = np.where(shared_pair, int(shared_node_separation), q)
        s = np.where(shared_pair, np.inf, s)
    np.fill_diagonal(q, 0)
    return SeparationMatrix(ids, q, float(delta_f), raw_mhz=s, shared_node=shared_pair)


def build_constraints(topology, plan, params=None, pattern=None, mask=None, filt=None,
                      f_ref=None, shared_node_separation=None):
    """Topology to separation matrix in one call, with the packaged defaults."""
    from . import propagation

    params = params or propagation.LinkBudgetParams()
    pattern = pattern or propagation.default_pattern()
    mask = mask or default_mask()
    filt = filt or mask
    f_ref = plan.mid_frequency if f_ref is None else f_ref
    imat = propagation.build_interference_matrix(topology, f_ref, params, pattern)
    curve = build_nfd_curve(mask, filt, plan.delta_f)
    return build_separation_matrix(
        imat, curve, plan.delta_f, n_freqs=plan.n_freqs,
        shared_node_separation=shared_node_separation,
    )
