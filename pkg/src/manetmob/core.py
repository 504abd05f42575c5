"""Domain types, kinematics, boundary handling and trace recording."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


def normalize_heading(heading: float) -> float:
    h = heading % TWO_PI
    # -tiny % 2pi rounds up to exactly 2pi
    return 0.0 if h >= TWO_PI else h


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self):
        _require_finite("position", self.x, self.y)

    def distance_to(self, other: Position) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


@dataclass(frozen=True)
class Velocity:
    speed: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        _require_finite("velocity", self.speed, self.heading)
        if self.speed < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "heading", normalize_heading(self.heading))

    @classmethod
    def from_vector(cls, vx: float, vy: float) -> Velocity:
        speed = math.hypot(vx, vy)
        heading = math.atan2(vy, vx) if speed > 0 else 0.0
        return cls(speed, heading)

    @property
    def vector(self) -> tuple[float, float]:
        return (self.speed * math.cos(self.heading), self.speed * math.sin(self.heading))


class Phase(enum.Enum):
    MOVING = "moving"
    PAUSED = "paused"


@dataclass(frozen=True)
class NodeState:
    """State of one mobile node at a time step.

    The model-specific memory lives in plain fields: ``waypoint`` for random
    waypoint, ``leg_remaining`` (seconds or meters, depending on the leg mode)
    for the random walk, and ``axis_state`` for the probabilistic walk.
    """

    id: int
    position: Position
    velocity: Velocity = field(default_factory=Velocity)
    phase: Phase = Phase.MOVING
    pause_remaining: float = 0.0
    waypoint: Position | None = None
    leg_remaining: float = 0.0
    axis_state: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"node id must be >= 0, got {self.id}")
        if self.phase is Phase.PAUSED and self.pause_remaining < 0:
            raise ValueError("paused node needs pause_remaining >= 0")

    @property
    def paused(self) -> bool:
        return self.phase is Phase.PAUSED


class BoundaryPolicy(enum.Enum):
    REFLECT = "reflect"
    WRAP = "wrap"
    CLAMP = "clamp"


@dataclass(frozen=True)
class Area:
    width: float = 1000.0
    height: float = 1000.0
    boundary: BoundaryPolicy = BoundaryPolicy.REFLECT

    def __post_init__(self):
        _require_finite("area", self.width, self.height)
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"area dimensions must be > 0, got {self.width}x{self.height}")

    def contains(self, p: Position) -> bool:
        return 0.0 <= p.x <= self.width and 0.0 <= p.y <= self.height


@dataclass(frozen=True)
class SimulationClock:
    dt: float = 1.0
    steps: int = 900

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.steps <= 0:
            raise ValueError(f"steps must be > 0, got {self.steps}")

    def time_at(self, step_index: int) -> float:
        return step_index * self.dt

    @property
    def duration(self) -> float:
        return self.steps * self.dt


def advance(state: NodeState, dt: float) -> NodeState:
    """Translate the node along its heading for ``dt`` seconds (no boundary)."""
    _require_finite("dt", dt)
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    vx, vy = state.velocity.vector
    p = state.position
    return replace(state, position=Position(p.x + vx * dt, p.y + vy * dt))


def _reflect_axis(v: float, length: float) -> tuple[float, bool]:
    if 0.0 <= v <= length:
        return v, False
    folds = math.floor(v / length)
    m = v % (2.0 * length)
    if m > length:
        m = 2.0 * length - m
    return m, folds % 2 == 1


def apply_boundary(position: Position, area: Area, heading: float = 0.0) -> tuple[Position, float]:
    """Bring ``position`` back inside ``area``.

    Returns the corrected position and the (possibly adjusted) heading.
    Reflect mirrors the coordinate and negates the matching velocity
    component; Wrap and Clamp leave the heading unchanged.
    """
    x, y = position.x, position.y
    policy = area.boundary
    if policy is BoundaryPolicy.REFLECT:
        x, flip_x = _reflect_axis(x, area.width)
        y, flip_y = _reflect_axis(y, area.height)
        if flip_x:
            heading = math.pi - heading
        if flip_y:
            heading = -heading
        return Position(x, y), normalize_heading(heading)
    if policy is BoundaryPolicy.WRAP:
        if not 0.0 <= x <= area.width:
            x %= area.width
        if not 0.0 <= y <= area.height:
            y %= area.height
        return Position(x, y), heading
    return Position(min(max(x, 0.0), area.width), min(max(y, 0.0), area.height)), heading


@dataclass
class Trace:
    """Time-indexed snapshots of the whole network.

    ``record`` appends in place (and returns the trace for chaining); a
    snapshot is never modified after it is recorded.
    """

    clock: SimulationClock
    snapshots: list[tuple[float, tuple[NodeState, ...]]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.snapshots)

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.snapshots]

    @property
    def node_ids(self) -> list[int]:
        if not self.snapshots:
            return []
        return [s.id for s in self.snapshots[0][1]]

    def record(self, t: float, states: Sequence[NodeState]) -> Trace:
        return record(self, t, states)

    def positions(self) -> np.ndarray:
        """Array of shape (snapshots, nodes, 2)."""
        return np.array(
            [[(s.position.x, s.position.y) for s in states] for _, states in self.snapshots],
            dtype=float,
        ).reshape(len(self.snapshots), -1, 2)

    def velocities(self) -> np.ndarray:
        """Velocity vectors, shape (snapshots, nodes, 2)."""
        return np.array(
            [[s.velocity.vector for s in states] for _, states in self.snapshots],
            dtype=float,
        ).reshape(len(self.snapshots), -1, 2)

    def speeds(self) -> np.ndarray:
        return np.array(
            [[s.velocity.speed for s in states] for _, states in self.snapshots], dtype=float
        ).reshape(len(self.snapshots), -1)


def record(trace: Trace, t: float, states: Sequence[NodeState]) -> Trace:
    _require_finite("t", t)
    states = tuple(states)
    if trace.snapshots:
        last_t, last_states = trace.snapshots[-1]
        if not t > last_t:
            raise ValueError(f"snapshot time {t} is not after last recorded time {last_t}")
        if sorted(s.id for s in states) != sorted(s.id for s in last_states):
            raise ValueError("snapshot node-id set differs from previous snapshot")
    elif len({s.id for s in states}) != len(states):
        raise ValueError("duplicate node ids in snapshot")
    trace.snapshots.append((t, states))
    return trace
