"""Print numeric regret against the closed form for every witness family."""

import argparse
import warnings

import numpy as np

from fmeasure import regret as R


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eps", type=float, default=R.DEFAULT_EPS)
    args = parser.parse_args()

    specs = [R.WitnessSpec(R.Theorem.HAMMING, m, eps=args.eps) for m in range(3, 9)]
    specs += [R.WitnessSpec(R.Theorem.SUBSET01, m) for m in range(3, 9)]
    specs += [R.WitnessSpec(R.Theorem.INDEPENDENCE, m, q=q) for m in (4, 6, 8) for q in (0.6, 0.8, 0.9)]
    specs += [R.WitnessSpec(R.Theorem.THRESHOLD, m, eps=args.eps) for m in range(6, 15, 2)]

    print(R.WITNESS_CSV_HEADER + ",h_method,h_oracle")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for spec in specs:
            report = R.verify_witness(spec)
            print(f"{R.witness_csv_row(spec, report)},{report.h_method},{report.h_oracle}")

    print()
    print("m,q,delta,bound_2q_minus_1")
    for q_rule, name in ((lambda m: 1 - 1 / m, "q = 1 - 1/m"),
                         (lambda m: 1 - 2 / m, "q = 1 - 2/m")):
        print(f"# {name}")
        for m, q, d, b in R.bound_trend([20, 50, 100, 200], q_rule):
            print(f"{m},{q:.6g},{d:.6g},{b:.6g}")
    print("# largest q on a 0.005 grid with a positive gap")
    grid = np.round(np.arange(0.5, 1.0, 0.005), 3)
    for m in (6, 20, 50, 100, 200):
        q = max(q for q in grid if R.independence_delta(q, m) > 0)
        print(f"{m},{q:.6g},{R.independence_delta(q, m):.6g},{2 * q - 1:.6g}")


if __name__ == "__main__":
    main()
