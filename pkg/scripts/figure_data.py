"""Write CSV series for plotting: speed-ratio grid, k against N with both
decay fits, and the two shape-factor density curves."""

import argparse
from pathlib import Path

from manetmob.experiments import ScenarioConfig, fit_report, run_speed_sweep
from manetmob.fileio import curves_csv, emit_csv, parse_config, sweep_csv, write_atomic
from manetmob.stats import DecayModel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out-dir", type=Path, default=Path("figures"))
    args = ap.parse_args()
    config = parse_config(args.config.read_text()) if args.config else ScenarioConfig()

    sweep = run_speed_sweep(config)
    report = fit_report(sweep, scaling=config.scaling)
    hyp = report.decay[DecayModel.HYPERBOLIC]
    exp = report.decay[DecayModel.EXPONENTIAL]
    decay_rows = [(r.n, r.k, hyp.predict(r.n), exp.predict(r.n)) for r in sweep.rows]

    outputs = {
        "speed_ratio_grid.csv": sweep_csv(sweep.grid),
        "k_vs_n.csv": emit_csv(("N", "k", "k_hyperbolic", "k_exponential"), decay_rows),
        "pdf_curves.csv": curves_csv(report),
    }
    for name, text in outputs.items():
        write_atomic(args.out_dir / name, text)
        print(args.out_dir / name)


if __name__ == "__main__":
    main()
