"""Free-space interference model between directed links.

The interference to tackle from link ``i`` to link ``j`` is the power that
the transmitter of ``i`` delivers at the receiver of ``j`` minus the receiver
sensitivity.  All powers are in dBm; gains and losses in dB.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import CoLocatedNodes, InvalidParameters

#: Peak antenna gain sum for a tx/rx pair at boresight (dB).
PEAK_GAIN_DB = 58.0

#: Stand-in for the ΔI of link pairs that share a node.
SHARED_NODE = math.inf


def watts_to_dbm(watts):
    return 10.0 * math.log10(watts) + 30.0


def dbw_to_dbm(dbw):
    return dbw + 30.0


@dataclass(frozen=True)
class AntennaPattern:
    """Piecewise-linear attenuation vs off-boresight angle, symmetric in ±angle."""

    angles: tuple[float, ...]
    attenuation: tuple[float, ...]

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        att = np.asarray(self.attenuation, dtype=float)
        if a.ndim != 1 or a.shape != att.shape or a.size < 1:
            raise InvalidParameters("antenna pattern needs matching 1-D angle/attenuation samples")
        if a[0] != 0.0 or att[0] != 0.0:
            raise InvalidParameters("antenna pattern must start at (0 deg, 0 dB)")
        if np.any(np.diff(a) <= 0):
            raise InvalidParameters("antenna pattern angles must be strictly increasing")
        if a[-1] > 180.0 or np.any(att < 0) or not np.all(np.isfinite(att)):
            raise InvalidParameters("antenna pattern must lie in [0, 180] deg with finite attenuation >= 0")
        object.__setattr__(self, "angles", tuple(a.tolist()))
        object.__setattr__(self, "attenuation", tuple(att.tolist()))

    def __call__(self, angle_deg):
        """Attenuation in dB at ``angle_deg`` (any real angle; folded into [0, 180])."""
        folded = fold_angle(angle_deg)
        out = np.interp(folded, self.angles, self.attenuation)
        return float(out) if np.ndim(out) == 0 else out


def fold_angle(angle_deg):
    a = np.mod(np.abs(np.asarray(angle_deg, dtype=float)), 360.0)
    return np.where(a > 180.0, 360.0 - a, a)


def load_pattern(path):
    """Read a two-column ``angle_deg attenuation_dB`` text file."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    return AntennaPattern(tuple(data[:, 0]), tuple(data[:, 1]))


def default_pattern():
    with resources.as_file(resources.files("fapnfd") / "data" / "antenna_default.txt") as p:
        return load_pattern(p)


@dataclass(frozen=True)
class LinkBudgetParams:
    """Transmit power and receiver sensitivity, both in dBm (1 W and -79.12 dBm by default)."""

    tx_power_dbm: float = 30.0
    sensitivity_dbm: float = -79.12

    def __post_init__(self):
        if not (math.isfinite(self.tx_power_dbm) and math.isfinite(self.sensitivity_dbm)):
            raise InvalidParameters("link budget values must be finite")

    @classmethod
    def from_watts(cls, tx_power_w, sensitivity_dbm=-79.12):
        return cls(watts_to_dbm(tx_power_w), sensitivity_dbm)


def path_loss(f_mhz, d_km):
    """Free-space loss ``32.4 + 20 log10(f[MHz]) + 20 log10(d[km])`` in dB."""
    if not f_mhz > 0:
        raise InvalidParameters(f"frequency must be positive, got {f_mhz}")
    if not d_km > 0:
        raise CoLocatedNodes(f"distance must be positive, got {d_km}")
    return 32.4 + 20.0 * math.log10(f_mhz) + 20.0 * math.log10(d_km)


def antenna_gain(pattern, phi_t, phi_r):
    """Pair gain ``58 - A(phi_t) - A(phi_r)`` in dB."""
    return PEAK_GAIN_DB - pattern(phi_t) - pattern(phi_r)


def _angle_between(u, v):
    """Angle in degrees between vectors along the last axis."""
    nu = np.linalg.norm(u, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    cos = np.sum(u * v, axis=-1) / (nu * nv)
    return np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))


def _link_geometry(topology):
    pos = {n.id: (n.x, n.y) for n in topology.nodes}
    tx = np.array([pos[l.tx] for l in topology.links], dtype=float).reshape(-1, 2)
    rx = np.array([pos[l.rx] for l in topology.links], dtype=float).reshape(-1, 2)
    for l, a, b in zip(topology.links, tx, rx):
        if np.array_equal(a, b):
            raise CoLocatedNodes(f"link {l.id}: tx and rx are co-located", pair=(l.id, l.id))
    return tx, rx


def interference_to_tackle(topology, i, j, f_ref, params, pattern):
    """ΔI from the transmitter of link ``i`` to the receiver of link ``j`` (dB).

    Returns :data:`SHARED_NODE` when the two links share a node.
    """
    if i == j:
        raise InvalidParameters("interference of a link onto itself is undefined")
    li, lj = topology.link(i), topology.link(j)
    if li.tx == lj.rx or li.rx == lj.tx:
        return SHARED_NODE
    t_i = np.array(topology.node(li.tx).position)
    r_i = np.array(topology.node(li.rx).position)
    t_j = np.array(topology.node(lj.tx).position)
    r_j = np.array(topology.node(lj.rx).position)
    if np.array_equal(t_i, r_i) or np.array_equal(t_j, r_j):
        raise CoLocatedNodes("link with co-located tx and rx", pair=(i, j))
    d = float(np.hypot(*(r_j - t_i)))
    if d == 0.0:
        raise CoLocatedNodes(f"tx of link {i} and rx of link {j} are co-located", pair=(i, j))
    phi_t = float(_angle_between(r_i - t_i, r_j - t_i))
    phi_r = float(_angle_between(t_j - r_j, t_i - r_j))
    p_rx = params.tx_power_dbm + antenna_gain(pattern, phi_t, phi_r) - path_loss(f_ref, d)
    return p_rx - params.sensitivity_dbm


@dataclass(frozen=True, eq=False)
class InterferenceMatrix:
    """ΔI[i, j] in dB from link ``link_ids[i]`` onto link ``link_ids[j]``.

    The diagonal is NaN.  Entries equal to ``+inf`` mark pairs sharing a node.
    """

    link_ids: tuple[int, ...]
    values: np.ndarray

    @property
    def shared_node_pairs(self):
        idx = np.argwhere(np.isposinf(self.values))
        return [(self.link_ids[a], self.link_ids[b]) for a, b in idx]


def build_interference_matrix(topology, f_ref, params, pattern):
    """ΔI for all ordered link pairs, vectorised over the topology."""
    if not f_ref > 0:
        raise InvalidParameters("reference frequency must be positive")
    n = len(topology.links)
    ids = topology.link_ids
    if n == 0:
        return InterferenceMatrix(ids, np.zeros((0, 0)))
    tx, rx = _link_geometry(topology)
    tx_id = np.array([l.tx for l in topology.links])
    rx_id = np.array([l.rx for l in topology.links])

    # v[i, j]: vector from tx(i) to rx(j)
    v = rx[None, :, :] - tx[:, None, :]
    d = np.hypot(v[..., 0], v[..., 1])
    shared = (tx_id[:, None] == rx_id[None, :]) | (rx_id[:, None] == tx_id[None, :])
    off_diag = ~np.eye(n, dtype=bool)

    bad = off_diag & ~shared & (d == 0.0)
    if bad.any():
        a, b = np.argwhere(bad)[0]
        raise CoLocatedNodes(
            f"tx of link {ids[a]} and rx of link {ids[b]} are co-located", pair=(ids[a], ids[b])
        )

    with np.errstate(invalid="ignore", divide="ignore"):
        boresight_t = (rx - tx)[:, None, :]
        phi_t = _angle_between(np.broadcast_to(boresight_t, v.shape), v)
        boresight_r = (tx - rx)[None, :, :]
        phi_r = _angle_between(np.broadcast_to(boresight_r, v.shape), -v)
        gain = PEAK_GAIN_DB - pattern(phi_t) - pattern(phi_r)
        pl = 32.4 + 20.0 * np.log10(f_ref) + 20.0 * np.log10(d)
        vals = params.tx_power_dbm + gain - pl - params.sensitivity_dbm

    vals = np.where(shared, SHARED_NODE, vals)
    vals[~off_diag] = np.nan
    vals.setflags(write=False)
    return InterferenceMatrix(ids, vals)
