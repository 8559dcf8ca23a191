"""Run both synthetic scenarios and write raw and summary CSVs."""

import argparse
from pathlib import Path

from fmeasure import simulate as S


def main():
    defaults = S.ScenarioConfig()
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--m", type=int, default=defaults.m)
    parser.add_argument("--models", type=int, default=defaults.n_models)
    parser.add_argument("--replicates", type=int, default=defaults.n_replicates)
    parser.add_argument("--test-size", type=int, default=defaults.test_size)
    parser.add_argument("--seed", type=int, default=defaults.seed)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--paper-scale", action="store_true",
                        help="m=25, 30 models, 50 replicates, 100k test observations")
    args = parser.parse_args()

    if args.paper_scale:
        args.m, args.models, args.replicates, args.test_size = 25, 30, 50, 100_000

    out = Path(args.out_dir)
    for scenario in S.Scenario:
        cfg = S.ScenarioConfig(scenario=scenario, m=args.m, n_models=args.models,
                               n_replicates=args.replicates, test_size=args.test_size, seed=args.seed)
        rows = S.run_experiment(cfg, workers=args.workers)
        summary = S.summarize(rows)
        name = scenario.value.lower()
        S.write_rows(rows, out / f"{name}.csv")
        S.write_summary(summary, out / f"{name}_summary.csv")

        largest = cfg.train_sizes[-1]
        print(f"{scenario.value}, n = {largest}")
        table = S.summary_lookup(summary)
        for metric in S.METRICS:
            cells = "  ".join(
                f"{m}={table[scenario.value, largest, m, metric].mean:.4f}" for m in S.METHODS)
            print(f"  {metric:9s} {cells}")


if __name__ == "__main__":
    main()
