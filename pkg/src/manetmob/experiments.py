"""Scenario orchestration: simulation runs, the speed/node-count sweep, the
k-factor table and the Pareto/decay report built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .core import Area, NodeState, Position, SimulationClock, Trace, Velocity, record
from .metrics import KFactorRow, SpeedRatioGrid
from .mobility import MobilityModel, ModelKind, start_waypoint_leg, step_network
from .stats import (
    DEFAULT_SCALING,
    DecayFit,
    DecayModel,
    ParetoFit,
    TruncatedGaussianSpec,
    decay_fit,
    pareto_pdf,
    sample_truncated_gaussian,
)

DEFAULT_NODE_COUNTS = (50, 100, 150, 200, 250, 300)
DEFAULT_SPEEDS = tuple(round(0.1 * i, 10) for i in range(1, 11))
HUMAN_WALKING_SPEED = 1.34

# (N, y_min, y_max, k) as printed in the published table
PUBLISHED_TABLE2 = (
    (50, 0.002, 0.02, 0.018),
    (100, 0.001, 0.01, 0.009),
    (150, 0.00067, 0.0067, 0.00603),
    (200, 0.0005, 0.005, 0.0045),
    (250, 0.0004, 0.004, 0.0036),
    (300, 0.00033, 0.0033, 0.00297),
)


@dataclass(frozen=True)
class ScenarioConfig:
    node_counts: tuple[int, ...] = DEFAULT_NODE_COUNTS
    speeds: tuple[float, ...] = DEFAULT_SPEEDS
    model: MobilityModel = field(default_factory=MobilityModel)
    area: Area = field(default_factory=Area)
    clock: SimulationClock = field(default_factory=SimulationClock)
    seed: int = 0
    radio_range: float = 250.0
    sigma: float = 0.5
    scaling: float = DEFAULT_SCALING

    def __post_init__(self):
        object.__setattr__(self, "node_counts", tuple(int(n) for n in self.node_counts))
        object.__setattr__(self, "speeds", tuple(float(v) for v in self.speeds))
        if not self.node_counts:
            raise ValueError("node_counts must be non-empty")
        if not self.speeds:
            raise ValueError("speeds must be non-empty")
        if any(n <= 0 for n in self.node_counts):
            raise ValueError("node counts must be positive")
        if any(v <= 0 for v in self.speeds):
            raise ValueError("speeds must be positive")
        if any(b <= a for a, b in zip(self.speeds, self.speeds[1:])):
            raise ValueError("speeds must be strictly increasing")
        if not self.radio_range > 0:
            raise ValueError("radio_range must be > 0")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if not self.scaling > 0:
            raise ValueError("scaling must be > 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def speed_spec(self) -> TruncatedGaussianSpec:
        p = self.model.params
        return TruncatedGaussianSpec(HUMAN_WALKING_SPEED, self.sigma, p.v_min, p.v_max)


def _initial_random_walk_velocity(config: ScenarioConfig, rng: np.random.Generator) -> Velocity:
    p = config.model.params
    if p.v_max > p.v_min:
        speed = sample_truncated_gaussian(config.speed_spec(), rng)
    else:
        speed = p.v_min
    return Velocity(speed, rng.uniform(0.0, 2.0 * math.pi))


def initial_states(config: ScenarioConfig, n_nodes: int, rng: np.random.Generator) -> list[NodeState]:
    """Nodes placed uniformly over the area, with model-appropriate starting memory."""
    area, model = config.area, config.model
    xy = rng.uniform((0.0, 0.0), (area.width, area.height), size=(n_nodes, 2))
    states = [NodeState(i, Position(float(x), float(y))) for i, (x, y) in enumerate(xy)]
    kind = model.kind
    target_id = states[0].id if model.target_id is None else model.target_id
    out = []
    for s in states:
        if kind is ModelKind.RANDOM_WALK or (kind is ModelKind.PURSUE and s.id == target_id):
            s = replace(
                s,
                velocity=_initial_random_walk_velocity(config, rng),
                leg_remaining=model.params.leg_length,
            )
        elif kind is ModelKind.RANDOM_WAYPOINT:
            s = start_waypoint_leg(s, model.params, area, rng)
        out.append(s)
    return out


def run_simulation(config: ScenarioConfig, n_nodes: int | None = None) -> Trace:
    """Run one scenario; the trace holds ``clock.steps + 1`` snapshots (t = 0 included).

    ``n_nodes`` defaults to the first configured node count.
    """
    n = config.node_counts[0] if n_nodes is None else n_nodes
    if n <= 0:
        raise ValueError("need at least one node")
    rng = np.random.default_rng(config.seed)
    clock = config.clock
    states = initial_states(config, n, rng)
    trace = record(Trace(clock), 0.0, states)
    for i in range(1, clock.steps + 1):
        states = step_network(states, config.model, config.area, clock.dt, rng)
        record(trace, clock.time_at(i), states)
    return trace


@dataclass(frozen=True)
class SweepTable:
    grid: SpeedRatioGrid
    rows: tuple[KFactorRow, ...]

    @property
    def k_values(self) -> list[float]:
        return [r.k for r in self.rows]


def _rows_from_grid(grid: SpeedRatioGrid) -> tuple[KFactorRow, ...]:
    rows = []
    for n, ratios in zip(grid.node_counts, grid.ratio):
        lo, hi = min(ratios), max(ratios)
        rows.append(KFactorRow(n, lo, hi, metrics.k_factor(ratios)))
    return tuple(sorted(rows, key=lambda r: r.n))


def run_speed_sweep(config: ScenarioConfig) -> SweepTable:
    """Speed ratio v/N over the (node count x speed) grid, plus per-N k rows."""
    counts = tuple(sorted(config.node_counts))
    ratio = tuple(tuple(metrics.speed_ratio(v, n) for v in config.speeds) for n in counts)
    grid = SpeedRatioGrid(counts, config.speeds, ratio)
    return SweepTable(grid, _rows_from_grid(grid))


def compute_table2(sweep: SweepTable) -> list[KFactorRow]:
    if not sweep.grid.node_counts:
        raise ValueError("empty sweep")
    return list(_rows_from_grid(sweep.grid))


@dataclass(frozen=True)
class ExperimentReport:
    sweep: SweepTable
    fit: ParetoFit
    decay: dict[DecayModel, DecayFit]
    x_grid: tuple[float, ...]
    pdf_curves: dict[str, tuple[float, ...]]  # "alpha_mean" / "alpha_median" -> f(x) on x_grid
    preferred: str = "alpha_median"

    @property
    def hyperbolic_beats_exponential(self) -> bool:
        return (
            self.decay[DecayModel.HYPERBOLIC].residual_norm
            < self.decay[DecayModel.EXPONENTIAL].residual_norm
        )


DEFAULT_X_GRID = tuple(round(0.1 * i, 10) for i in range(100))


def fit_report(
    sweep: SweepTable, x_grid=DEFAULT_X_GRID, scaling: float = DEFAULT_SCALING
) -> ExperimentReport:
    if len(sweep.rows) < 3:
        raise ValueError("fit report needs at least 3 node counts")
    ks = sweep.k_values
    fit = ParetoFit.from_k(ks, scaling)
    points = [(r.n, r.k) for r in sweep.rows]
    decay = {m: decay_fit(points, m) for m in DecayModel}
    xs = tuple(float(x) for x in x_grid)
    curves = {
        "alpha_mean": tuple(float(v) for v in pareto_pdf(xs, fit.alpha_mean)),
        "alpha_median": tuple(float(v) for v in pareto_pdf(xs, fit.alpha_median)),
    }
    return ExperimentReport(sweep, fit, decay, xs, curves)


def empirical_speed_ratio(trace: Trace, n: int) -> list[float]:
    """Per-node time-averaged recorded speed divided by ``n``."""
    if not trace.snapshots:
        raise ValueError("empty trace")
    count = len(trace.node_ids)
    if n != count:
        raise ValueError(f"n={n} does not match trace node count {count}")
    mean_speed = trace.speeds().mean(axis=0)
    return [float(s) / n for s in mean_speed]


def empirical_speed_grid(config: ScenarioConfig, steps: int = 50) -> SpeedRatioGrid:
    """Trace-based counterpart of the analytic sweep.

    Each (N, v) cell runs a constant-speed random walk (v_min = v_max = v)
    and averages the per-node empirical ratio.
    """
    counts = tuple(sorted(config.node_counts))
    rows = []
    for n in counts:
        row = []
        for v in config.speeds:
            params = replace(config.model.params, v_min=v, v_max=v)
            cell = replace(
                config,
                model=MobilityModel(ModelKind.RANDOM_WALK, params),
                clock=SimulationClock(config.clock.dt, steps),
            )
            ratios = empirical_speed_ratio(run_simulation(cell, n), n)
            row.append(float(np.mean(ratios)))
        rows.append(tuple(row))
    return SpeedRatioGrid(counts, config.speeds, tuple(rows))
