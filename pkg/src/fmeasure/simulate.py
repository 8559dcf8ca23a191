"""Synthetic plug-in experiments.

For every model, train size and replicate a training sample is drawn, each
method fits its parameters by counting and predicts a single label vector,
and the prediction is scored by the empirical mean of each metric over one
large test sample per model.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
import tempfile
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import distributions as D
from .gfm import delta_from_sample, gfm_maximize
from .inference import fm_maximize
from .metrics import MetricKind, metric_table

CSV_HEADER = ("scenario", "model_id", "train_size", "replicate", "method", "metric", "value")
SUMMARY_HEADER = ("scenario", "train_size", "method", "metric", "mean", "stderr", "n")

METHODS = ("MM", "JM", "FM", "GFM")
METRICS = {
    "Hamming": MetricKind.HAMMING,
    "Subset01": MetricKind.SUBSET_ZERO_ONE,
    "FMeasure": MetricKind.FMEASURE,
    "Jaccard": MetricKind.JACCARD,
}
LOWER_IS_BETTER = {"Hamming", "Subset01"}

# N(mu, 3) with 3 read as the variance
WEIGHT_SCALE = math.sqrt(3.0)

# stream tags keep model, test and training draws apart
_MODEL, _TEST, _TRAIN = 0, 1, 2


class Scenario(enum.Enum):
    INDEPENDENT = "Independent"
    CHAIN = "Chain"

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        key = str(text).strip().lower()
        for s in cls:
            if s.value.lower() == key:
                return s
        raise ValueError(f"unknown scenario {text!r}; choose Independent or Chain")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario = Scenario.INDEPENDENT
    m: int = 10
    train_sizes: tuple[int, ...] = (10, 50, 100, 500, 2000)
    n_models: int = 5
    n_replicates: int = 5
    test_size: int = 20000
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.scenario, Scenario):
            object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        object.__setattr__(self, "train_sizes", tuple(int(n) for n in self.train_sizes))
        for name in ("m", "n_models", "n_replicates", "test_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if not self.train_sizes or min(self.train_sizes) < 1:
            raise ValueError("train sizes must be positive")
        if any(b <= a for a, b in zip(self.train_sizes, self.train_sizes[1:])):
            raise ValueError("train sizes must be strictly increasing")
        if self.m > 62:
            raise ValueError("label vectors are packed into 64-bit codes; m must be <= 62")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class ExperimentRow:
    scenario: str
    model_id: int
    train_size: int
    replicate: int
    method: str
    metric: str
    value: float

    def sort_key(self):
        return (self.scenario, self.model_id, self.train_size, self.replicate,
                METHODS.index(self.method), list(METRICS).index(self.metric))


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    train_size: int
    method: str
    metric: str
    mean: float
    stderr: float
    n: int


def derive_seed(*keys: int) -> int:
    """A 64-bit seed that depends only on ``keys``."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, dtype=np.uint64)[0])


def make_independent_model(m: int, seed: int) -> D.ProductBernoulli:
    if m < 1:
        raise ValueError("m must be positive")
    w = np.random.default_rng(seed).normal(0.0, WEIGHT_SCALE, size=m)
    return D.ProductBernoulli(D._sigmoid(w))


def make_chain_model(m: int, seed: int) -> D.ChainLogistic:
    if m < 1:
        raise ValueError("m must be positive")
    rng = np.random.default_rng(seed)
    weights = rng.normal(1.0, WEIGHT_SCALE, size=(m, m))
    intercepts = rng.normal(1.0, WEIGHT_SCALE, size=m)
    return D.ChainLogistic(weights, intercepts)


def make_model(scenario: Scenario, m: int, seed: int):
    if scenario is Scenario.INDEPENDENT:
        return make_independent_model(m, seed)
    return make_chain_model(m, seed)


def predict_all(train: D.EmpiricalSample) -> dict:
    """One prediction per method from plug-in estimates on ``train``."""
    return {
        "MM": train.marginal_modes(),
        "JM": train.joint_mode(),
        "FM": fm_maximize(train.marginals()).h,
        "GFM": gfm_maximize(delta_from_sample(train)).h,
    }


def score(predictions: dict, test: D.EmpiricalSample) -> dict:
    """Mean of each metric over the test sample for every prediction."""
    joint = test.as_joint()
    h_codes = [predictions[name].bits for name in METHODS]
    out = {}
    for metric_name, kind in METRICS.items():
        values = metric_table(kind, joint.codes, h_codes, joint.m) @ joint.probs
        for name, v in zip(METHODS, values):
            out[name, metric_name] = float(v)
    return out


def _run_model(cfg: ScenarioConfig, model_id: int) -> list[ExperimentRow]:
    scen = cfg.scenario
    model = make_model(scen, cfg.m, derive_seed(cfg.seed, model_id, _MODEL))
    test = model.sample(cfg.test_size, derive_seed(cfg.seed, model_id, _TEST))
    rows = []
    for n in cfg.train_sizes:
        for rep in range(cfg.n_replicates):
            train = model.sample(n, derive_seed(cfg.seed, model_id, _TRAIN, n, rep))
            for (method, metric), value in score(predict_all(train), test).items():
                rows.append(ExperimentRow(scen.value, model_id, n, rep, method, metric, value))
    return rows


def run_experiment(cfg: ScenarioConfig, workers: int = 1) -> list[ExperimentRow]:
    """All rows for ``cfg`` in canonical order, independent of ``workers``."""
    ids = range(cfg.n_models)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_model, [cfg] * cfg.n_models, ids))
    else:
        chunks = [_run_model(cfg, i) for i in ids]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=ExperimentRow.sort_key)
    return rows


def mean_and_stderr(values) -> tuple[float, float]:
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValueError("no values")
    if x.size == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def summarize(rows) -> list[SummaryRow]:
    """Mean and standard error per (scenario, train size, method, metric)."""
    rows = list(rows)
    if not rows:
        raise ValueError("nothing to summarize")
    groups: dict[tuple, list[float]] = defaultdict(list)
    for r in rows:
        groups[r.scenario, r.train_size, r.method, r.metric].append(r.value)

    def key(g):
        scen, n, method, metric = g
        return scen, n, METHODS.index(method), list(METRICS).index(metric)

    out = []
    for g in sorted(groups, key=key):
        mean, se = mean_and_stderr(groups[g])
        out.append(SummaryRow(*g, mean, se, len(groups[g])))
    return out


def summary_lookup(summary) -> dict:
    return {(s.scenario, s.train_size, s.method, s.metric): s for s in summary}


def _fmt(x) -> str:
    return f"{x:.12g}" if isinstance(x, float) else str(x)


def rows_to_csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(getattr(r, f)) for f in _fields(r)])
    return buf.getvalue()


def _fields(row) -> tuple[str, ...]:
    return tuple(row.__dataclass_fields__)


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_rows(rows, path) -> None:
    write_atomic(path, rows_to_csv(rows, CSV_HEADER))


def write_summary(summary, path) -> None:
    write_atomic(path, rows_to_csv(summary, SUMMARY_HEADER))
