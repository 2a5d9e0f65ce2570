"""Synthetic clustered topologies.

Cluster centres are uniform over a square area; nodes are uniform inside
discs of ``cluster_radius`` around them.  Each link joins a transmitter in
one cluster to a receiver in another cluster whose centre is close enough
that any two of their nodes are at most ``max_link_length`` apart.  Every
node carries exactly one link unless ``bidirectional`` is set, in which
case each drawn pair also gets its reverse link (and then each node has
one outgoing and one incoming link).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._seeding import make_rng
from .errors import InvalidParameters, PlacementFailure
from .model import Link, Node, Topology


@dataclass(frozen=True)
class GeneratorConfig:
    n_links: int = 150
    area_km: float = 100.0
    cluster_radius_km: float = 0.5
    max_link_length_km: float = 20.0
    n_clusters: int | None = None  # None: max(2, n_links // 5)
    seed: int = 0
    bidirectional: bool = False
    max_retries: int = 1000

    def __post_init__(self):
        if self.n_links < 1:
            raise InvalidParameters("n_links must be >= 1")
        if self.bidirectional and self.n_links % 2:
            raise InvalidParameters("bidirectional topologies need an even link count")
        if self.max_link_length_km > self.area_km * math.sqrt(2):
            raise InvalidParameters("max link length exceeds the area diagonal")
        if self.max_link_length_km <= 2 * self.cluster_radius_km:
            raise InvalidParameters("max link length must exceed the cluster diameter")

    @property
    def clusters(self):
        if self.n_clusters is not None:
            return self.n_clusters
        return max(2, self.n_links // 5)


def _point_in_disc(rng, center, radius):
    r = radius * math.sqrt(rng.random())
    t = 2 * math.pi * rng.random()
    return center[0] + r * math.cos(t), center[1] + r * math.sin(t)


def generate_topology(config):
    """Draw a topology; identical configs (seed included) give identical topologies."""
    rng = make_rng(config.seed, "topology")
    k = config.clusters
    reach = config.max_link_length_km - 2 * config.cluster_radius_km
    centers = None
    for _ in range(config.max_retries):
        centers = rng.random((k, 2)) * config.area_km
        d = np.hypot(*(centers[:, None, :] - centers[None, :, :]).transpose(2, 0, 1))
        partners = (d <= reach) & ~np.eye(k, dtype=bool)
        if k == 1 or partners.any(axis=1).all():
            break
    else:
        raise PlacementFailure(
            f"could not place {k} clusters so that each has a partner within {reach:.1f} km"
        )
    if k == 1:
        partners = np.ones((1, 1), dtype=bool)

    n_pairs = config.n_links // 2 if config.bidirectional else config.n_links
    nodes, links = [], []

    def new_node(cluster):
        x, y = _point_in_disc(rng, centers[cluster], config.cluster_radius_km)
        nodes.append(Node(len(nodes), x, y))
        return nodes[-1].id

    for _ in range(n_pairs):
        a = int(rng.integers(k))
        choices = np.flatnonzero(partners[a])
        b = int(choices[rng.integers(choices.size)])
        tx, rx = new_node(a), new_node(b)
        links.append(Link(len(links), tx, rx))
        if config.bidirectional:
            links.append(Link(len(links), rx, tx))
    return Topology(tuple(nodes), tuple(links))
