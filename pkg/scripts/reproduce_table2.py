"""Print the speed-ratio k-factor table, the shape factors and the decay audit."""

import argparse
from pathlib import Path

from manetmob.experiments import PUBLISHED_TABLE2, ScenarioConfig, fit_report, run_speed_sweep
from manetmob.fileio import fit_report_text, parse_config, table2_csv
from manetmob.stats import DecayModel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, help="scenario config file")
    args = ap.parse_args()
    config = parse_config(args.config.read_text()) if args.config else ScenarioConfig()

    sweep = run_speed_sweep(config)
    print(table2_csv(sweep.rows), end="")
    if config == ScenarioConfig():
        print("\nrelative deviation from the published rows (N, ymin, ymax, k):")
        for row, (n, ymin, ymax, k) in zip(sweep.rows, PUBLISHED_TABLE2):
            devs = [abs(got - want) / want for got, want in ((row.y_min, ymin), (row.y_max, ymax), (row.k, k))]
            print(f"  {n:>4d}  " + "  ".join(f"{d:.4%}" for d in devs))
    report = fit_report(sweep, scaling=config.scaling)
    print()
    print(fit_report_text(report), end="")
    hyp = report.decay[DecayModel.HYPERBOLIC]
    print(f"\nk * N = {hyp.coefficients['c']:.6g} for every row")


if __name__ == "__main__":
    main()
