"""Core value types: topology, frequency plan, assignment and metrics.

Frequency indices are 1-based throughout the package; index ``i`` of a plan
has center frequency ``f_start + B/2 + (i - 1) * delta_f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .errors import EmptyAssignment, InvalidParameters

# Relative slack for floor/ceil on float MHz quantities (7015 + 3900 * 0.15
# is not exactly representable).
_EPS = 1e-9


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float

    def __post_init__(self):
        if self.id < 0:
            raise InvalidParameters(f"node id must be >= 0, got {self.id}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidParameters(f"node {self.id} has non-finite coordinates")

    @property
    def position(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Link:
    """Directed communication link ``tx -> rx``."""

    id: int
    tx: int
    rx: int

    def __post_init__(self):
        if self.id < 0:
            raise InvalidParameters(f"link id must be >= 0, got {self.id}")
        if self.tx == self.rx:
            raise InvalidParameters(f"link {self.id} has tx == rx")


@dataclass(frozen=True)
class Topology:
    """Nodes and directed links of a connection graph.

    Every node has at most one outgoing and at most one incoming link.
    """

    nodes: tuple[Node, ...]
    links: tuple[Link, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))
        node_ids = [n.id for n in self.nodes]
        if len(set(node_ids)) != len(node_ids):
            raise InvalidParameters("duplicate node ids")
        link_ids = [l.id for l in self.links]
        if len(set(link_ids)) != len(link_ids):
            raise InvalidParameters("duplicate link ids")
        known = set(node_ids)
        out_seen, in_seen = set(), set()
        for l in self.links:
            if l.tx not in known or l.rx not in known:
                raise InvalidParameters(f"link {l.id} references an unknown node")
            if l.tx in out_seen:
                raise InvalidParameters(f"node {l.tx} has more than one outgoing link")
            if l.rx in in_seen:
                raise InvalidParameters(f"node {l.rx} has more than one incoming link")
            out_seen.add(l.tx)
            in_seen.add(l.rx)

    def node(self, node_id):
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def link(self, link_id):
        for l in self.links:
            if l.id == link_id:
                return l
        raise KeyError(link_id)

    @property
    def link_ids(self):
        return tuple(l.id for l in self.links)


@dataclass(frozen=True)
class FrequencyPlan:
    """Grid of overlapping bands of width ``bandwidth`` spaced ``delta_f`` apart."""

    f_start: float
    f_end: float
    bandwidth: float
    delta_f: float
    n_freqs: int

    def center_frequency(self, index):
        if not 1 <= index <= self.n_freqs:
            raise InvalidParameters(f"index {index} outside [1, {self.n_freqs}]")
        return self.f_start + self.bandwidth / 2 + (index - 1) * self.delta_f

    @property
    def mid_frequency(self):
        return self.f_start + self.bandwidth / 2 + (self.n_freqs - 1) * self.delta_f / 2

    def span_to_mhz(self, span):
        """Occupied width in MHz of an index span ``max - min``."""
        return span * self.delta_f + self.bandwidth

    def mhz_to_span(self, range_mhz):
        """Largest index span whose range fits within ``range_mhz``."""
        return math.floor((range_mhz - self.bandwidth) / self.delta_f + _EPS)


def build_plan(f_start, f_end, bandwidth, delta_f):
    """Build the band grid for ``[f_start, f_end]``.

    ``n_freqs`` is the largest count with the last band's upper edge not
    exceeding ``f_end``.

    >>> build_plan(7007.5, 7023.0, 15, 0.15).n_freqs
    4
    """
    if not (delta_f > 0 and bandwidth > 0):
        raise InvalidParameters("delta_f and bandwidth must be positive")
    room = f_end - f_start - bandwidth
    if room < -_EPS * max(1.0, abs(f_end)):
        raise InvalidParameters(
            f"no band of width {bandwidth} MHz fits in [{f_start}, {f_end}] MHz"
        )
    n = math.floor(max(room, 0.0) / delta_f + _EPS) + 1
    return FrequencyPlan(float(f_start), float(f_end), float(bandwidth), float(delta_f), n)


def plan_from_count(n_freqs, delta_f=1.0, bandwidth=1.0, f_start=0.0):
    """Plan with exactly ``n_freqs`` indices (topology-free instances)."""
    if n_freqs < 1:
        raise InvalidParameters("n_freqs must be >= 1")
    f_end = f_start + bandwidth + (n_freqs - 1) * delta_f
    return FrequencyPlan(float(f_start), float(f_end), float(bandwidth), float(delta_f), int(n_freqs))


@dataclass(frozen=True, eq=False)
class Assignment:
    """Map from link id to 1-based frequency index."""

    freq_index: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        data = {int(k): int(v) for k, v in dict(self.freq_index).items()}
        object.__setattr__(self, "freq_index", MappingProxyType(data))

    def __len__(self):
        return len(self.freq_index)

    def __getitem__(self, link_id):
        return self.freq_index[link_id]

    def __iter__(self):
        return iter(self.freq_index)

    def items(self):
        return self.freq_index.items()

    @property
    def key(self):
        return tuple(sorted(self.freq_index.items()))

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def used(self):
        """Sorted distinct indices in use."""
        return tuple(sorted(set(self.freq_index.values())))

    @property
    def used_count(self):
        return len(set(self.freq_index.values()))

    @property
    def span(self):
        if not self.freq_index:
            raise EmptyAssignment("span of an empty assignment")
        vals = self.freq_index.values()
        return max(vals) - min(vals)

    def __repr__(self):
        return f"Assignment({dict(self.freq_index)!r})"


def range_of(assignment, plan):
    """Occupied spectrum ``(max - min) * delta_f + B`` in MHz."""
    if len(assignment) == 0:
        raise EmptyAssignment("range of an empty assignment is undefined")
    return plan.span_to_mhz(assignment.span)


@dataclass(frozen=True)
class SolutionMetrics:
    used_count: int
    range_mhz: float
    feasible: bool
    fail_count: int
    span: int = 0
