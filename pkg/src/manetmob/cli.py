"""Command-line entry point.

Subcommands: simulate, sweep, table2, fit, metrics, export. Output goes to
``--out`` when given, else into ``$MANETMOB_OUT_DIR`` under a default file
name when that variable is set, else to stdout.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import metrics
from .experiments import (
    ScenarioConfig,
    compute_table2,
    fit_report,
    run_simulation,
    run_speed_sweep,
)
from .fileio import (
    ConfigError,
    TraceFormat,
    curves_csv,
    export_trace,
    fit_report_text,
    metrics_csv,
    parse_config,
    parse_trace,
    sweep_csv,
    table2_csv,
    write_atomic,
)

OUT_DIR_ENV = "MANETMOB_OUT_DIR"
PROG = "manetmob"


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=default, help="scenario config file (key = value lines)")
    p.add_argument("--seed", type=int, default=default, help="override the config seed")
    p.add_argument("--out", default=default, help="output file")
    p.add_argument(
        "--format",
        choices=[f.value for f in TraceFormat],
        default=default,
        help="trace format for simulate/export (default csv)",
    )
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="MANET mobility models, speed-ratio sweep and Pareto shape fit",
        parents=[_global_flags(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    flags = [_global_flags(suppress=True)]

    p = sub.add_parser("simulate", parents=flags, help="run one scenario and write its trace")
    p.add_argument("--nodes", type=int, help="node count (default: first configured count)")
    sub.add_parser("sweep", parents=flags, help="speed-ratio grid over node counts and speeds")
    sub.add_parser("table2", parents=flags, help="per-N ymin, ymax and k table")
    p = sub.add_parser("fit", parents=flags, help="Pareto shape factors, decay fits, pdf curves")
    p.add_argument("--curves", help="pdf-curve CSV path (default: <out>.curves.csv when --out is set)")
    p = sub.add_parser("metrics", parents=flags, help="mobility metrics over a trace file")
    p.add_argument("trace", help="trace file (csv or ns2, auto-detected)")
    p.add_argument("--lag", type=int, default=1, help="time lag in steps")
    p.add_argument("--k", type=float, help="distance-correlation factor (default: k-factor for the node count)")
    p.add_argument("--radio-range", type=float, help="neighbour radius in meters")
    p = sub.add_parser("export", parents=flags, help="convert a trace file to --format")
    p.add_argument("trace", help="input trace file")
    return parser


def _load_config(args) -> ScenarioConfig:
    if args.config:
        config = parse_config(Path(args.config).read_text())
    else:
        config = ScenarioConfig()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def _emit(args, text: str, default_name: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    elif os.environ.get(OUT_DIR_ENV):
        write_atomic(Path(os.environ[OUT_DIR_ENV]) / default_name, text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args, config: ScenarioConfig) -> None:
    fmt = TraceFormat(args.format or "csv")
    trace = run_simulation(config, args.nodes)
    _emit(args, export_trace(trace, fmt), f"trace.{fmt.value}")


def _cmd_sweep(args, config):
    _emit(args, sweep_csv(run_speed_sweep(config).grid), "sweep.csv")


def _cmd_table2(args, config):
    _emit(args, table2_csv(compute_table2(run_speed_sweep(config))), "table2.csv")


def _cmd_fit(args, config):
    report = fit_report(run_speed_sweep(config), scaling=config.scaling)
    _emit(args, fit_report_text(report), "fit.txt")
    curves = args.curves
    if curves is None and args.out:
        curves = f"{args.out}.curves.csv"
    elif curves is None and os.environ.get(OUT_DIR_ENV):
        curves = str(Path(os.environ[OUT_DIR_ENV]) / "fit.curves.csv")
    if curves:
        write_atomic(curves, curves_csv(report))


def _cmd_metrics(args, config):
    trace = parse_trace(Path(args.trace).read_text())
    n = len(trace.node_ids)
    if args.k is not None:
        k = args.k
    else:
        k = metrics.k_factor([metrics.speed_ratio(v, n) for v in config.speeds])
    radio = args.radio_range if args.radio_range is not None else config.radio_range
    values: dict[str, float] = {"nodes": n, "snapshots": len(trace)}
    try:
        sc = metrics.mean_speed_correlation(trace, args.lag)
        values.update(speed_correlation=sc.mean, speed_pairs=sc.pairs, speed_pairs_skipped=sc.skipped)
    except metrics.UndefinedCorrelation:
        values.update(speed_correlation=float("nan"), speed_pairs=0)
    clustering = [
        metrics.mean_clustering(
            metrics.neighbor_graph([(s.id, s.position) for s in states], radio)
        )
        for _, states in trace.snapshots
    ]
    values["clustering_coefficient"] = sum(clustering) / len(clustering)
    values["k"] = k
    values["distance_correlation"] = metrics.distance_correlation(trace, args.lag, k)
    _emit(args, metrics_csv(values), "metrics.csv")


def _cmd_export(args, config):
    fmt = TraceFormat(args.format or "csv")
    trace = parse_trace(Path(args.trace).read_text())
    _emit(args, export_trace(trace, fmt), f"trace.{fmt.value}")


COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "table2": _cmd_table2,
    "fit": _cmd_fit,
    "metrics": _cmd_metrics,
    "export": _cmd_export,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print(f"{PROG}: error: a subcommand is required", file=sys.stderr)
        return 2
    try:
        config = _load_config(args)
        COMMANDS[args.command](args, config)
    except (ConfigError, ValueError, OSError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"{PROG}: error: {msg}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
