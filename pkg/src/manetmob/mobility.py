"""Entity and group mobility models behind a common one-tick step interface.

Every step function takes the node's current state, the model parameters,
the area, the time step and a ``numpy.random.Generator``, and returns the
node's next state with its position already brought back inside the area.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import (
    TWO_PI,
    Area,
    NodeState,
    Phase,
    Position,
    Velocity,
    advance,
    apply_boundary,
)


class LegMode(enum.Enum):
    DURATION = "duration"
    DISTANCE = "distance"


class ModelKind(enum.Enum):
    RANDOM_WALK = "random_walk"
    RANDOM_WAYPOINT = "random_waypoint"
    PROBABILISTIC = "probabilistic"
    PURSUE = "pursue"


class AxisState(enum.IntEnum):
    CURRENT = 0
    PREVIOUS = 1
    NEXT = 2


# displacement sign per axis state, in units of step_magnitude
AXIS_MOVES = {AxisState.CURRENT: 0, AxisState.PREVIOUS: -1, AxisState.NEXT: 1}


@dataclass(frozen=True)
class MobilityParams:
    v_min: float = 0.1
    v_max: float = 1.0
    pause_time_max: float = 10.0
    leg_mode: LegMode = LegMode.DURATION
    leg_length: float = 10.0
    step_magnitude: float | None = None
    pursue_gain: float = 0.5
    pursue_noise_max: float = 1.0

    def __post_init__(self):
        if self.v_min < 0:
            raise ValueError(f"v_min must be >= 0, got {self.v_min}")
        if self.v_max <= 0:
            raise ValueError(f"v_max must be > 0, got {self.v_max}")
        if self.v_min > self.v_max:
            raise ValueError(f"v_min ({self.v_min}) exceeds v_max ({self.v_max})")
        if self.pause_time_max < 0:
            raise ValueError("pause_time_max must be >= 0")
        if self.leg_length <= 0:
            raise ValueError("leg_length must be > 0")
        if self.step_magnitude is not None and self.step_magnitude <= 0:
            raise ValueError("step_magnitude must be > 0")
        if not 0 < self.pursue_gain <= 1:
            raise ValueError(f"pursue_gain must be in (0, 1], got {self.pursue_gain}")
        if self.pursue_noise_max < 0:
            raise ValueError("pursue_noise_max must be >= 0")

    def axis_step(self, dt: float) -> float:
        """Per-axis displacement of the probabilistic walk (mean speed x dt by default)."""
        if self.step_magnitude is not None:
            return self.step_magnitude
        return 0.5 * (self.v_min + self.v_max) * dt


class TransitionMatrixError(ValueError):
    def __init__(self, message: str, row: int, col: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class TransitionMatrix:
    """3x3 row-stochastic matrix over :class:`AxisState` values."""

    p: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.p)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise TransitionMatrixError("transition matrix must be 3x3", row=0)
        for a, row in enumerate(rows):
            for b, v in enumerate(row):
                if not (0.0 <= v <= 1.0):
                    raise TransitionMatrixError(
                        f"entry P({a},{b}) = {v} outside [0, 1]", row=a, col=b
                    )
            total = math.fsum(row)
            if abs(total - 1.0) > 1e-12:
                raise TransitionMatrixError(f"row {a} sums to {total!r}, expected 1", row=a)
        object.__setattr__(self, "p", rows)

    def as_array(self) -> np.ndarray:
        return np.array(self.p)

    def next_state(self, state: int, rng: np.random.Generator) -> AxisState:
        row = self.p[state]
        u = rng.random()
        acc = 0.0
        for b, prob in enumerate(row):
            acc += prob
            if u < acc:
                return AxisState(b)
        # rounding slack: fall back to the last reachable state
        return AxisState(max(b for b, prob in enumerate(row) if prob > 0))


def validate_transition_matrix(p) -> TransitionMatrix:
    return TransitionMatrix(tuple(tuple(row) for row in p))


P1 = TransitionMatrix(((0.0, 0.5, 0.5), (0.3, 0.7, 0.0), (0.3, 0.0, 0.7)))


def draw_leg(params: MobilityParams, rng: np.random.Generator) -> Velocity:
    """Fresh random-walk leg: speed uniform on [v_min, v_max], heading uniform on [0, 2pi)."""
    speed = rng.uniform(params.v_min, params.v_max)
    heading = rng.uniform(0.0, TWO_PI)
    return Velocity(speed, heading)


def random_walk_step(
    node: NodeState, params: MobilityParams, area: Area, dt: float, rng: np.random.Generator
) -> NodeState:
    velocity = node.velocity
    remaining = node.leg_remaining
    if remaining <= 0:
        velocity = draw_leg(params, rng)
        remaining = params.leg_length
    moved = advance(replace(node, velocity=velocity), dt)
    position, heading = apply_boundary(moved.position, area, velocity.heading)
    if params.leg_mode is LegMode.DURATION:
        remaining -= dt
    elif velocity.speed > 0:
        remaining -= velocity.speed * dt
    else:
        remaining = 0.0
    return replace(
        node,
        position=position,
        velocity=Velocity(velocity.speed, heading),
        phase=Phase.MOVING,
        leg_remaining=remaining,
    )


def start_waypoint_leg(
    node: NodeState, params: MobilityParams, area: Area, rng: np.random.Generator
) -> NodeState:
    waypoint = Position(rng.uniform(0.0, area.width), rng.uniform(0.0, area.height))
    # 1 - U with U in [0, 1) gives (0, 1]; a zero speed would strand the node
    speed = params.v_max * (1.0 - rng.random())
    p = node.position
    heading = math.atan2(waypoint.y - p.y, waypoint.x - p.x)
    return replace(
        node,
        velocity=Velocity(speed, heading),
        phase=Phase.MOVING,
        pause_remaining=0.0,
        waypoint=waypoint,
    )


def random_waypoint_step(
    node: NodeState, params: MobilityParams, area: Area, dt: float, rng: np.random.Generator
) -> NodeState:
    if node.paused:
        remaining = node.pause_remaining - dt
        if remaining > 0:
            return replace(node, pause_remaining=remaining)
        return start_waypoint_leg(node, params, area, rng)

    if node.waypoint is None:
        node = start_waypoint_leg(node, params, area, rng)

    p, wp = node.position, node.waypoint
    speed = node.velocity.speed
    dist = p.distance_to(wp)
    if dist <= speed * dt:
        pause = rng.uniform(0.0, params.pause_time_max) if params.pause_time_max > 0 else 0.0
        arrived = replace(node, position=wp)
        if pause > 0:
            return replace(
                arrived,
                velocity=Velocity(0.0, node.velocity.heading),
                phase=Phase.PAUSED,
                pause_remaining=pause,
                waypoint=None,
            )
        return start_waypoint_leg(arrived, params, area, rng)

    heading = math.atan2(wp.y - p.y, wp.x - p.x)
    frac = speed * dt / dist
    raw = Position(p.x + (wp.x - p.x) * frac, p.y + (wp.y - p.y) * frac)
    position, _ = apply_boundary(raw, area)
    return replace(node, position=position, velocity=Velocity(speed, heading))


def probabilistic_walk_step(
    node: NodeState,
    matrix: TransitionMatrix,
    params: MobilityParams,
    area: Area,
    dt: float,
    rng: np.random.Generator,
) -> NodeState:
    """One tick of the three-state probabilistic walk, x and y axes independent."""
    sx = matrix.next_state(node.axis_state[0], rng)
    sy = matrix.next_state(node.axis_state[1], rng)
    step = params.axis_step(dt)
    dx = AXIS_MOVES[sx] * step
    dy = AXIS_MOVES[sy] * step
    p = node.position
    velocity = Velocity.from_vector(dx / dt, dy / dt)
    position, heading = apply_boundary(Position(p.x + dx, p.y + dy), area, velocity.heading)
    return replace(
        node,
        position=position,
        velocity=Velocity(velocity.speed, heading),
        phase=Phase.MOVING,
        axis_state=(int(sx), int(sy)),
    )


def pursue_update(
    old: Position, target: Position, gain: float, noise: tuple[float, float] = (0.0, 0.0)
) -> Position:
    """old + gain * (target - old) + noise, without boundary handling."""
    return Position(
        old.x + gain * (target.x - old.x) + noise[0],
        old.y + gain * (target.y - old.y) + noise[1],
    )


def pursue_step(
    node: NodeState,
    target: Position,
    params: MobilityParams,
    area: Area,
    dt: float,
    rng: np.random.Generator,
) -> NodeState:
    m = params.pursue_noise_max
    noise = (rng.uniform(-m, m), rng.uniform(-m, m)) if m > 0 else (0.0, 0.0)
    p = node.position
    raw = pursue_update(p, target, params.pursue_gain, noise)
    velocity = Velocity.from_vector((raw.x - p.x) / dt, (raw.y - p.y) / dt)
    position, heading = apply_boundary(raw, area, velocity.heading)
    return replace(
        node, position=position, velocity=Velocity(velocity.speed, heading), phase=Phase.MOVING
    )


@dataclass(frozen=True)
class MobilityModel:
    """Model choice plus its parameters.

    For ``PURSUE`` the node ``target_id`` (first node when ``None``) runs a
    random walk and every other node chases its position from the previous
    tick.
    """

    kind: ModelKind = ModelKind.RANDOM_WALK
    params: MobilityParams = field(default_factory=MobilityParams)
    matrix: TransitionMatrix = P1
    target_id: int | None = None


def step_network(
    states: Sequence[NodeState],
    model: MobilityModel,
    area: Area,
    dt: float,
    rng: np.random.Generator,
) -> list[NodeState]:
    if not states:
        raise ValueError("cannot step an empty network")
    params = model.params
    kind = model.kind
    if kind is ModelKind.RANDOM_WALK:
        return [random_walk_step(s, params, area, dt, rng) for s in states]
    if kind is ModelKind.RANDOM_WAYPOINT:
        return [random_waypoint_step(s, params, area, dt, rng) for s in states]
    if kind is ModelKind.PROBABILISTIC:
        return [probabilistic_walk_step(s, model.matrix, params, area, dt, rng) for s in states]

    target_id = states[0].id if model.target_id is None else model.target_id
    targets = [s for s in states if s.id == target_id]
    if not targets:
        raise ValueError(f"pursue target id {target_id} not in network")
    target_pos = targets[0].position
    out = []
    for s in states:
        if s.id == target_id:
            out.append(random_walk_step(s, params, area, dt, rng))
        else:
            out.append(pursue_step(s, target_pos, params, area, dt, rng))
    return out
