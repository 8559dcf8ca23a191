"""Command-line entry point.

Exit codes: 0 success, 1 failed bench assertion, 2 bad input (parse errors,
dimension mismatches, invalid parameter values), 3 usage error (bad flags or
a method that cannot run on the given input), 4 exhaustive-search cap.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import distributions as D
from . import oracle
from . import regret as R
from . import simulate as S
from .gfm import delta_from_joint, delta_from_p, gfm_maximize, PMatrix
from .inference import (
    categorical_maximize,
    expected_f_independent,
    fm_maximize,
    jm_predict,
    mm_predict,
    threshold_maximize,
)
from .metrics import DimensionMismatch, MetricKind

EXIT_OK, EXIT_BENCH, EXIT_INPUT, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3, 4

METHODS = ("gfm", "fm", "mm", "jm", "threshold", "categorical")
MARGINAL_METHODS = {"fm", "mm", "categorical"}
TARGETS = {"f": MetricKind.FMEASURE, "hamming": MetricKind.HAMMING,
           "subset01": MetricKind.SUBSET_ZERO_ONE, "jaccard": MetricKind.JACCARD}
BENCH_SIZES = (50, 100, 200, 400)
BENCH_MAX_EXPONENT = 2.6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


# -- prediction routing ---------------------------------------------------

def predict(method: str, model):
    """Prediction of ``method`` on a joint/sample, or on a marginal vector."""
    if isinstance(model, np.ndarray):
        if method not in MARGINAL_METHODS:
            raise UsageError(f"method {method!r} needs a joint distribution or samples, not marginals")
        if method == "fm":
            return fm_maximize(model).h
        if method == "categorical":
            return categorical_maximize(model)
        return D.ProductBernoulli(model).marginal_modes()
    if method == "gfm":
        return gfm_maximize(delta_from_joint(model)).h
    if method == "fm":
        return fm_maximize(D.marginals(model)).h
    if method == "mm":
        return mm_predict(model)
    if method == "jm":
        return jm_predict(model)
    if method == "threshold":
        return threshold_maximize(model).h
    return categorical_maximize(D.marginals(model))


def _load_model(args):
    if args.dist:
        return D.read_distribution(args.dist), "joint"
    if args.samples:
        return D.read_samples(args.samples).as_joint(), "empirical"
    return D.read_marginals(args.marginals), "independent"


# -- subcommands ----------------------------------------------------------

def cmd_infer(args) -> int:
    model, kind = _load_model(args)
    h = predict(args.method, model)
    if kind == "independent":
        value = expected_f_independent(model, h)
    else:
        value = oracle.expected_metric(model, h, MetricKind.FMEASURE)
    print(h)
    print(f"expected_f: {_fmt(value)}")
    print(f"method: {args.method}")
    print(f"model: {kind}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    model, _ = _load_model(args)
    metric = TARGETS[args.metric]
    result = oracle.maximize_exhaustive(model, metric, args.cap)
    print(result.best)
    print(f"value: {_fmt(result.value)}")
    print(f"metric: {args.metric}")
    print(f"evaluated: {result.evaluated}")
    return EXIT_OK


REGRET_HEADER = "method,target,h_method,h_oracle,value_method,value_oracle,regret"


def cmd_regret(args) -> int:
    model, _ = _load_model(args)
    metric = TARGETS[args.target]
    h = predict(args.method, model)
    best = oracle.maximize_exhaustive(model, metric, args.cap)
    value = oracle.expected_metric(model, h, metric)
    gap = best.value - value if metric.is_utility else value - best.value
    print(REGRET_HEADER)
    print(",".join([args.method, args.target, str(h), str(best.best),
                    _fmt(value), _fmt(best.value), _fmt(gap)]))
    return EXIT_OK


def cmd_witness(args) -> int:
    spec = R.WitnessSpec(R.Theorem.parse(args.theorem), args.m, args.q, args.eps)
    if args.verify:
        report = R.verify_witness(spec, args.cap)
        print(R.WITNESS_CSV_HEADER)
        print(R.witness_csv_row(spec, report))
        return EXIT_OK
    dist = R.build_witness(spec)
    if spec.theorem is R.Theorem.INDEPENDENCE:
        product, dist = dist
        print("# product model with marginals " + " ".join(_fmt(p) for p in product.p))
    print(D.format_distribution(dist))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = S.ScenarioConfig(
        scenario=args.scenario, m=args.m, train_sizes=args.train_sizes, n_models=args.models,
        n_replicates=args.replicates, test_size=args.test_size, seed=args.seed,
    )
    rows = S.run_experiment(cfg, workers=args.workers)
    S.write_rows(rows, args.out)
    if args.summary:
        S.write_summary(S.summarize(rows), args.summary)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def growth_exponent(sizes, seconds) -> float:
    """Least-squares slope of log(time) against log(m)."""
    return float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])


def run_bench(sizes=BENCH_SIZES, repeats: int = 5, seed: int = 0) -> dict[str, list[float]]:
    rng = np.random.default_rng(seed)
    times = {"gfm_maximize": [], "delta_from_p": []}
    for m in sizes:
        p = rng.random((m, m))
        p /= p.sum() * 1.01
        P = PMatrix(m, p)
        delta = delta_from_p(P, 0.01)
        times["gfm_maximize"].append(_best_time(lambda: gfm_maximize(delta), repeats))
        times["delta_from_p"].append(_best_time(lambda: delta_from_p(P, 0.01), repeats))
    return times


def cmd_bench(args) -> int:
    sizes = args.sizes
    times = run_bench(sizes, args.repeats, args.seed)
    print("operation,m,seconds")
    for name, secs in times.items():
        for m, t in zip(sizes, secs):
            print(f"{name},{m},{_fmt(t)}")
    print("operation,exponent")
    exponents = {name: growth_exponent(sizes, secs) for name, secs in times.items()}
    for name, e in exponents.items():
        print(f"{name},{e:.3f}")
    if exponents["gfm_maximize"] >= BENCH_MAX_EXPONENT:
        print(f"gfm_maximize growth exponent {exponents['gfm_maximize']:.3f} >= {BENCH_MAX_EXPONENT}",
              file=sys.stderr)
        return EXIT_BENCH
    return EXIT_OK


# -- parser ---------------------------------------------------------------

def _add_inputs(p, marginals: bool = True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dist", help="distribution file: 'm <int>' then '<bitstring> <prob>' lines")
    src.add_argument("--samples", help="one bitstring per line")
    if marginals:
        src.add_argument("--marginals", help="one line of m space-separated probabilities")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fmeasure", description="Exact and approximate F-measure inference.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("infer", help="predict a label vector")
    _add_inputs(p)
    p.add_argument("--method", choices=METHODS, required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("oracle", help="exhaustive optimum over all 2^m predictions")
    _add_inputs(p, marginals=False)
    p.add_argument("--metric", choices=sorted(TARGETS), default="f")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("regret", help="regret of a method against the exhaustive optimum")
    _add_inputs(p, marginals=False)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--target", choices=sorted(TARGETS), default="f")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)
    p.set_defaults(func=cmd_regret)

    p = sub.add_parser("witness", help="worst-case witness distributions")
    p.add_argument("--theorem", choices=[t.value for t in R.Theorem], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=float)
    p.add_argument("--eps", type=float, default=R.DEFAULT_EPS)
    p.add_argument("--verify", action="store_true", help="print the regret CSV row instead")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)
    p.set_defaults(func=cmd_witness)

    defaults = S.ScenarioConfig()
    p = sub.add_parser("simulate", help="synthetic plug-in experiments")
    p.add_argument("--scenario", choices=[s.value for s in S.Scenario], type=lambda t: S.Scenario.parse(t).value,
                   default=defaults.scenario.value)
    p.add_argument("--m", type=int, default=defaults.m)
    p.add_argument("--train-sizes", type=_int_list, default=defaults.train_sizes)
    p.add_argument("--models", type=int, default=defaults.n_models)
    p.add_argument("--replicates", type=int, default=defaults.n_replicates)
    p.add_argument("--test-size", type=int, default=defaults.test_size)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="also write per-cell mean and standard error here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="growth exponent of GFM running time")
    p.add_argument("--sizes", type=_int_list, default=BENCH_SIZES)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fmeasure: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except oracle.OracleCapExceeded as exc:
        print(f"fmeasure: error: {exc} (raise --cap to override)", file=sys.stderr)
        return EXIT_CAP
    except D.UnsupportedDistribution as exc:
        print(f"fmeasure: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (D.FormatError, DimensionMismatch, ValueError, OSError) as exc:
        print(f"fmeasure: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
