"""Scenario config files, CSV tables and movement-trace formats."""

from __future__ import annotations

import enum
import math
import os
import re
import tempfile
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

from .core import Area, BoundaryPolicy, NodeState, Position, SimulationClock, Trace, Velocity, record
from .experiments import ExperimentReport, ScenarioConfig
from .metrics import KFactorRow, SpeedRatioGrid
from .mobility import LegMode, MobilityModel, MobilityParams, ModelKind
from .stats import DecayModel


class ConfigError(ValueError):
    pass


# accepted keys, in emit order
CONFIG_KEYS = (
    "nodes",
    "speeds",
    "model",
    "area_width",
    "area_height",
    "boundary",
    "dt",
    "steps",
    "seed",
    "radio_range",
    "v_min",
    "v_max",
    "pause_max",
    "pursue_gain",
    "pursue_noise",
    "sigma",
    "scaling",
    "leg_mode",
    "leg_length",
    "step_magnitude",
)
_INT_KEYS = {"steps", "seed"}
_ENUM_KEYS = {"model": ModelKind, "boundary": BoundaryPolicy, "leg_mode": LegMode}


def _parse_float(key: str, raw: str, lineno: int) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: malformed number {raw!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"line {lineno}: {key}: value must be finite")
    return v


def _parse_int(key: str, raw: str, lineno: int) -> int:
    try:
        return int(raw, 0)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: malformed integer {raw!r}") from None


def _parse_speeds(raw: str, lineno: int) -> tuple[float, ...]:
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: speeds: range form is start:stop:step")
        start, stop, step = (_parse_float("speeds", p.strip(), lineno) for p in parts)
        if step <= 0:
            raise ConfigError(f"line {lineno}: speeds: step must be > 0")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(_parse_float("speeds", p.strip(), lineno) for p in raw.split(",") if p.strip())


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``key = value`` lines into a validated :class:`ScenarioConfig`.

    ``#`` starts a comment; ``[section]`` headers are accepted and ignored.
    Missing keys take the defaults of :class:`ScenarioConfig`.
    """
    values: dict[str, object] = {}
    where: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line or re.fullmatch(r"\[[^\]]*\]", line):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {where[key]})")
        where[key] = lineno
        if key == "nodes":
            values[key] = tuple(_parse_int(key, p.strip(), lineno) for p in raw.split(",") if p.strip())
        elif key == "speeds":
            values[key] = _parse_speeds(raw, lineno)
        elif key in _ENUM_KEYS:
            try:
                values[key] = _ENUM_KEYS[key](raw.lower())
            except ValueError:
                choices = ", ".join(m.value for m in _ENUM_KEYS[key])
                raise ConfigError(f"line {lineno}: {key}: {raw!r} not one of {choices}") from None
        elif key in _INT_KEYS:
            values[key] = _parse_int(key, raw, lineno)
        elif key == "step_magnitude" and raw.lower() == "auto":
            values[key] = None
        else:
            values[key] = _parse_float(key, raw, lineno)

    base = ScenarioConfig()
    bp = base.model.params
    v_min = values.get("v_min", bp.v_min)
    v_max = values.get("v_max", bp.v_max)
    if v_min > v_max:
        raise ConfigError(
            f"v_min = {v_min} (line {where.get('v_min', '-')}) exceeds "
            f"v_max = {v_max} (line {where.get('v_max', '-')})"
        )

    def build():
        params = MobilityParams(
            v_min=v_min,
            v_max=v_max,
            pause_time_max=values.get("pause_max", bp.pause_time_max),
            leg_mode=values.get("leg_mode", bp.leg_mode),
            leg_length=values.get("leg_length", bp.leg_length),
            step_magnitude=values.get("step_magnitude", bp.step_magnitude),
            pursue_gain=values.get("pursue_gain", bp.pursue_gain),
            pursue_noise_max=values.get("pursue_noise", bp.pursue_noise_max),
        )
        return ScenarioConfig(
            node_counts=values.get("nodes", base.node_counts),
            speeds=values.get("speeds", base.speeds),
            model=MobilityModel(values.get("model", base.model.kind), params),
            area=Area(
                values.get("area_width", base.area.width),
                values.get("area_height", base.area.height),
                values.get("boundary", base.area.boundary),
            ),
            clock=SimulationClock(values.get("dt", base.clock.dt), values.get("steps", base.clock.steps)),
            seed=values.get("seed", base.seed),
            radio_range=values.get("radio_range", base.radio_range),
            sigma=values.get("sigma", base.sigma),
            scaling=values.get("scaling", base.scaling),
        )

    try:
        return build()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def emit_config(config: ScenarioConfig) -> str:
    """Inverse of :func:`parse_config`; values are written losslessly."""
    p = config.model.params
    items = {
        "nodes": ", ".join(str(n) for n in config.node_counts),
        "speeds": ", ".join(repr(v) for v in config.speeds),
        "model": config.model.kind.value,
        "area_width": repr(config.area.width),
        "area_height": repr(config.area.height),
        "boundary": config.area.boundary.value,
        "dt": repr(config.clock.dt),
        "steps": str(config.clock.steps),
        "seed": str(config.seed),
        "radio_range": repr(config.radio_range),
        "v_min": repr(p.v_min),
        "v_max": repr(p.v_max),
        "pause_max": repr(p.pause_time_max),
        "pursue_gain": repr(p.pursue_gain),
        "pursue_noise": repr(p.pursue_noise_max),
        "sigma": repr(config.sigma),
        "scaling": repr(config.scaling),
        "leg_mode": p.leg_mode.value,
        "leg_length": repr(p.leg_length),
        "step_magnitude": "auto" if p.step_magnitude is None else repr(p.step_magnitude),
    }
    return "[scenario]\n" + "".join(f"{k} = {items[k]}\n" for k in CONFIG_KEYS)


def format_number(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def emit_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines += [",".join(format_number(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def table2_csv(rows: Sequence[KFactorRow]) -> str:
    return emit_csv(("N", "ymin", "ymax", "k"), ((r.n, r.y_min, r.y_max, r.k) for r in rows))


def sweep_csv(grid: SpeedRatioGrid) -> str:
    rows = (
        (n, v, grid.ratio[i][j])
        for i, n in enumerate(grid.node_counts)
        for j, v in enumerate(grid.speeds)
    )
    return emit_csv(("N", "speed", "ratio"), rows)


def curves_csv(report: ExperimentReport) -> str:
    rows = zip(report.x_grid, report.pdf_curves["alpha_mean"], report.pdf_curves["alpha_median"])
    return emit_csv(("x", "f_alpha_mean", "f_alpha_median"), rows)


def metrics_csv(values: dict[str, float]) -> str:
    return emit_csv(("metric", "value"), values.items())


def fit_report_text(report: ExperimentReport) -> str:
    hyp = report.decay[DecayModel.HYPERBOLIC]
    exp = report.decay[DecayModel.EXPONENTIAL]
    f = format_number
    lines = [
        "# pareto shape factor and k-decay report",
        "speed_ratio=v/N (inferred from the k-table pattern ymin=0.1/N, ymax=1.0/N)",
        f"node_counts={' '.join(str(r.n) for r in report.sweep.rows)}",
        f"k={' '.join(f(r.k) for r in report.sweep.rows)}",
        f"scaling={f(report.fit.scaling)}",
        f"alpha_mean={f(report.fit.alpha_mean)}",
        f"alpha_median={f(report.fit.alpha_median)}",
        f"preferred={report.preferred}",
        f"hyperbolic_c={f(hyp.coefficients['c'])}",
        f"hyperbolic_residual={f(hyp.residual_norm)}",
        f"exponential_a={f(exp.coefficients['a'])}",
        f"exponential_b={f(exp.coefficients['b'])}",
        f"exponential_residual={f(exp.residual_norm)}",
        f"hyperbolic_beats_exponential={f(report.hyperbolic_beats_exponential)}",
    ]
    return "\n".join(lines) + "\n"


class TraceFormat(enum.Enum):
    CSV = "csv"
    NS2 = "ns2"


CSV_TRACE_HEADER = "t,id,x,y,speed,heading"


def export_trace(trace: Trace, fmt: TraceFormat = TraceFormat.CSV) -> str:
    if not trace.snapshots:
        raise ValueError("cannot export an empty trace")
    if fmt is TraceFormat.CSV:
        lines = [CSV_TRACE_HEADER]
        for t, states in trace.snapshots:
            for s in states:
                lines.append(
                    f"{t!r},{s.id},{s.position.x!r},{s.position.y!r},"
                    f"{s.velocity.speed!r},{s.velocity.heading!r}"
                )
        return "\n".join(lines) + "\n"

    clock = trace.clock
    lines = [f"# manetmob ns2 trace dt={clock.dt!r} steps={len(trace) - 1}"]
    for s in trace.snapshots[0][1]:
        lines.append(f"$node_({s.id}) set X_ {s.position.x!r}")
        lines.append(f"$node_({s.id}) set Y_ {s.position.y!r}")
        lines.append(f"$node_({s.id}) set Z_ 0.0")
    for (t0, before), (t1, after) in zip(trace.snapshots, trace.snapshots[1:]):
        prev = {s.id: s.position for s in before}
        for s in after:
            speed = prev[s.id].distance_to(s.position) / (t1 - t0)
            lines.append(
                f'$ns_ at {t0!r} "$node_({s.id}) setdest {s.position.x!r} {s.position.y!r} {speed!r}"'
            )
    return "\n".join(lines) + "\n"


def _clock_for(times: Sequence[float], dt_hint: float | None = None) -> SimulationClock:
    if dt_hint is not None:
        dt = dt_hint
    elif len(times) > 1:
        dt = times[1] - times[0]
    else:
        dt = 1.0
    return SimulationClock(dt, max(1, len(times) - 1))


def _parse_csv_trace(text: str) -> Trace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CSV_TRACE_HEADER:
        raise ValueError(f"CSV trace must start with header {CSV_TRACE_HEADER!r}")
    by_time: dict[float, list[NodeState]] = defaultdict(list)
    order: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 6:
            raise ValueError(f"line {lineno}: expected 6 fields, got {len(fields)}")
        try:
            t, x, y, speed, heading = (float(fields[i]) for i in (0, 2, 3, 4, 5))
            node_id = int(fields[1])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed number") from None
        if t not in by_time:
            order.append(t)
        by_time[t].append(NodeState(node_id, Position(x, y), Velocity(speed, heading)))
    trace = Trace(_clock_for(order))
    for t in order:
        record(trace, t, by_time[t])
    return trace


_NS2_SET = re.compile(r"^\$node_\((\d+)\)\s+set\s+([XYZ])_\s+(\S+)$")
_NS2_DEST = re.compile(r'^\$ns_\s+at\s+(\S+)\s+"\$node_\((\d+)\)\s+setdest\s+(\S+)\s+(\S+)\s+(\S+)"$')
_NS2_HEADER = re.compile(r"dt=(\S+)")


def _parse_ns2_trace(text: str) -> Trace:
    dt_hint = None
    initial: dict[int, dict[str, float]] = {}
    legs: dict[float, dict[int, tuple[float, float, float]]] = defaultdict(dict)
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _NS2_HEADER.search(line)
            if m:
                dt_hint = float(m.group(1))
            continue
        if m := _NS2_SET.match(line):
            initial.setdefault(int(m.group(1)), {})[m.group(2)] = float(m.group(3))
        elif m := _NS2_DEST.match(line):
            t, node_id = float(m.group(1)), int(m.group(2))
            legs[t][node_id] = (float(m.group(3)), float(m.group(4)), float(m.group(5)))
        else:
            raise ValueError(f"line {lineno}: unrecognised ns-2 movement line")
    if not initial:
        raise ValueError("ns-2 trace has no initial positions")
    start_times = sorted(legs)
    if dt_hint is None and len(start_times) > 1:
        dt_hint = start_times[1] - start_times[0]
    dt = dt_hint if dt_hint is not None else 1.0

    positions = {i: Position(c["X"], c["Y"]) for i, c in initial.items()}
    ids = sorted(positions)
    velocities = {i: Velocity() for i in ids}
    snapshots = []
    for t in start_times:
        nxt = dict(positions)
        for i, (x, y, speed) in legs[t].items():
            p = positions[i]
            heading = math.atan2(y - p.y, x - p.x) if (x, y) != (p.x, p.y) else 0.0
            velocities[i] = Velocity(speed, heading)
            nxt[i] = Position(x, y)
        snapshots.append((t + dt, nxt, dict(velocities)))
        positions = nxt

    t0 = start_times[0] if start_times else 0.0
    first_vel = snapshots[0][2] if snapshots else velocities
    trace = Trace(SimulationClock(dt, max(1, len(snapshots))))
    record(trace, t0, [NodeState(i, Position(initial[i]["X"], initial[i]["Y"]), first_vel[i]) for i in ids])
    for t, pos, vel in snapshots:
        record(trace, t, [NodeState(i, pos[i], vel[i]) for i in ids])
    return trace


def detect_trace_format(text: str) -> TraceFormat:
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("t,id"):
            return TraceFormat.CSV
        return TraceFormat.NS2
    raise ValueError("empty trace file")


def parse_trace(text: str, fmt: TraceFormat | None = None) -> Trace:
    fmt = detect_trace_format(text) if fmt is None else fmt
    return _parse_csv_trace(text) if fmt is TraceFormat.CSV else _parse_ns2_trace(text)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
