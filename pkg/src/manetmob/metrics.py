"""Mobility metrics over velocities, position sets and traces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Position, Trace


class UndefinedCorrelation(ValueError):
    """Raised when a correlation involves a zero-magnitude velocity."""


def _vec(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {a.shape}")
    return a


def cosine_similarity(v1, v2) -> float:
    """Bounded diagnostic: the direction term of the speed correlation alone."""
    a, b = _vec(v1), _vec(v2)
    na, nb = np.hypot(*a), np.hypot(*b)
    if na == 0 or nb == 0:
        raise UndefinedCorrelation("cosine undefined for a zero velocity")
    return float(a @ b / (na * nb))


def speed_correlation(v1, v2, v1_next) -> float:
    """Speed correlation between two nodes.

    ``(v1 . v2) / (|v1| |v2|) * |v1_next| / |v2|`` where ``v1`` and ``v2`` are
    velocity vectors at time t and ``v1_next`` is the first node's velocity
    at t + lag. Not bounded by 1: the magnitude ratio scales freely.
    """
    a, b, c = _vec(v1), _vec(v2), _vec(v1_next)
    na, nb = np.hypot(*a), np.hypot(*b)
    if na == 0 or nb == 0:
        raise UndefinedCorrelation("speed correlation undefined for zero-speed node")
    return float((a @ b) / (na * nb) * np.hypot(*c) / nb)


@dataclass(frozen=True)
class SpeedCorrelationSummary:
    mean: float
    pairs: int
    skipped: int


def mean_speed_correlation(trace: Trace, lag: int = 1) -> SpeedCorrelationSummary:
    """Average pairwise speed correlation over ordered node pairs and time origins.

    Pairs where either node has zero speed at the origin are skipped and
    counted in ``skipped``.
    """
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if len(trace) <= lag:
        raise ValueError(f"trace of length {len(trace)} too short for lag {lag}")
    vel = trace.velocities()
    n_times, n_nodes, _ = vel.shape
    v_now = vel[: n_times - lag]
    norms = np.hypot(v_now[..., 0], v_now[..., 1])
    next_norm = np.hypot(vel[lag:, :, 0], vel[lag:, :, 1])

    dots = np.einsum("tid,tjd->tij", v_now, v_now)
    ni = norms[:, :, None]
    nj = norms[:, None, :]
    offdiag = ~np.eye(n_nodes, dtype=bool)[None, :, :]
    defined = (ni > 0) & (nj > 0) & offdiag
    total_pairs = int(offdiag.sum()) * v_now.shape[0]
    count = int(defined.sum())
    if count == 0:
        raise UndefinedCorrelation("no node pair has non-zero speeds")
    with np.errstate(divide="ignore", invalid="ignore"):
        values = dots / (ni * nj) * next_norm[:, :, None] / nj
    return SpeedCorrelationSummary(
        mean=float(values[defined].mean()), pairs=count, skipped=total_pairs - count
    )


@dataclass(frozen=True)
class NeighborGraph:
    ids: tuple[int, ...]
    adjacency: dict[int, frozenset[int]]
    radio_range: float

    def neighbors(self, node: int) -> frozenset[int]:
        try:
            return self.adjacency[node]
        except KeyError:
            raise KeyError(f"unknown node id {node}") from None

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.neighbors(a)

    @property
    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.adjacency.values()) // 2


def neighbor_graph(positions: Iterable[tuple[int, Position]], radio_range: float = 250.0) -> NeighborGraph:
    """Unit-disk graph: an edge wherever two nodes are within ``radio_range``."""
    if not radio_range > 0:
        raise ValueError(f"radio_range must be > 0, got {radio_range}")
    items = list(positions)
    ids = tuple(i for i, _ in items)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids")
    if not items:
        return NeighborGraph((), {}, radio_range)
    xy = np.array([(p.x, p.y) for _, p in items], dtype=float)
    diff = xy[:, None, :] - xy[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    adj = dist <= radio_range
    np.fill_diagonal(adj, False)
    adjacency = {
        ids[i]: frozenset(ids[j] for j in np.flatnonzero(adj[i])) for i in range(len(ids))
    }
    return NeighborGraph(ids, adjacency, radio_range)


def clustering_coefficient(g: NeighborGraph, node: int) -> float:
    """Local clustering: realized links among the node's neighbours over possible links.

    Nodes with fewer than two neighbours get 0.
    """
    nbrs = g.neighbors(node)
    deg = len(nbrs)
    if deg < 2:
        return 0.0
    links = sum(len(g.adjacency[u] & nbrs) for u in nbrs) // 2
    return links / (deg * (deg - 1) / 2)


def mean_clustering(g: NeighborGraph) -> float:
    if not g.ids:
        raise ValueError("empty graph")
    return sum(clustering_coefficient(g, i) for i in g.ids) / len(g.ids)


def distance_correlation(trace: Trace, lag: int = 1, k: float = 1.0) -> float:
    """k times the per-node displacement over ``lag`` steps, normalised by the
    largest inter-node distance at the origin, summed over nodes and averaged
    over time origins."""
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if len(trace) <= lag:
        raise ValueError(f"trace of length {len(trace)} too short for lag {lag}")
    pos = trace.positions()
    if pos.shape[1] < 2:
        raise ValueError("distance correlation needs at least 2 nodes")
    origins = pos[:-lag]
    disp = np.hypot(*(pos[lag:] - origins).transpose(2, 0, 1))
    diff = origins[:, :, None, :] - origins[:, None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1]).max(axis=(1, 2))
    if np.any(d == 0):
        raise ValueError("all nodes coincide at some time origin; maximum distance is 0")
    return float(k * np.mean(disp.sum(axis=1) / d))


def speed_ratio(speed: float, n: int) -> float:
    if n <= 0:
        raise ValueError(f"node count must be > 0, got {n}")
    if not speed > 0:
        raise ValueError(f"speed must be > 0, got {speed}")
    return speed / n


def k_factor(ratios: Sequence[float]) -> float:
    """Spread |max - min| of a list of speed ratios."""
    if len(ratios) == 0:
        raise ValueError("k_factor of an empty list")
    return abs(max(ratios) - min(ratios))


@dataclass(frozen=True)
class SpeedRatioGrid:
    node_counts: tuple[int, ...]
    speeds: tuple[float, ...]
    ratio: tuple[tuple[float, ...], ...]  # ratio[i][j] for node_counts[i], speeds[j]

    def column(self, speed_index: int) -> list[float]:
        return [row[speed_index] for row in self.ratio]


@dataclass(frozen=True)
class KFactorRow:
    n: int
    y_min: float
    y_max: float
    k: float

    def __post_init__(self):
        if self.y_min > self.y_max:
            raise ValueError("y_min exceeds y_max")
        if not math.isclose(self.k, abs(self.y_max - self.y_min), rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError("k must equal |y_max - y_min|")
