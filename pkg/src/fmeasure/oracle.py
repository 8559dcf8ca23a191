"""Exhaustive ground truth over all 2^m predictions.

Expectations iterate over the support only, so a scan costs
``O(2^m * |support|)`` popcounts.  Candidates are processed in ascending code
order in fixed-size blocks; the reduction keeps the first (smallest) code
within ``TIE_TOL`` of the best value, which makes the result independent of
block size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import distributions as D
from .metrics import DimensionMismatch, LabelVector, MetricKind, metric_table

DEFAULT_CAP = 14
TIE_TOL = 1e-12
_BLOCK = 1 << 12


class OracleCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best: LabelVector
    value: float
    evaluated: int


def expected_metric(dist, h: LabelVector, metric: MetricKind) -> float:
    joint = D.as_joint(dist)
    if h.m != joint.m:
        raise DimensionMismatch(f"prediction has {h.m} labels, distribution {joint.m}")
    row = metric_table(metric, joint.codes, [h.bits], joint.m)[0]
    return float(row @ joint.probs)


def expected_metric_all(dist, metric: MetricKind, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Expected metric of every prediction, indexed by packed code."""
    joint = D.as_joint(dist)
    _check_cap(joint.m, cap)
    n = 1 << joint.m
    out = np.empty(n)
    for start in range(0, n, _BLOCK):
        block = np.arange(start, min(start + _BLOCK, n), dtype=np.int64)
        out[start:start + len(block)] = metric_table(metric, joint.codes, block, joint.m) @ joint.probs
    return out


def _check_cap(m: int, cap: int) -> None:
    if m > cap:
        raise OracleCapExceeded(f"m={m} exceeds the exhaustive-search cap of {cap}")


def best_index(values: np.ndarray, maximize: bool) -> int:
    """Smallest index whose value is within TIE_TOL of the optimum."""
    target = values.max() if maximize else values.min()
    close = np.abs(values - target) <= TIE_TOL
    return int(np.argmax(close))


def maximize_exhaustive(dist, metric: MetricKind = MetricKind.FMEASURE, cap: int = DEFAULT_CAP) -> OracleResult:
    """Optimal prediction for ``metric``: utilities maximized, losses minimized."""
    joint = D.as_joint(dist)
    values = expected_metric_all(joint, metric, cap)
    i = best_index(values, metric.is_utility)
    return OracleResult(LabelVector(i, joint.m), float(values[i]), len(values))


def regret(dist, h: LabelVector, metric: MetricKind = MetricKind.FMEASURE, cap: int = DEFAULT_CAP) -> float:
    joint = D.as_joint(dist)
    best = maximize_exhaustive(joint, metric, cap)
    value = expected_metric(joint, h, metric)
    return best.value - value if metric.is_utility else value - best.value


def hamming_minimizer(dist) -> LabelVector:
    return D.marginal_modes(dist)


def subset_minimizer(dist) -> LabelVector:
    return D.joint_mode(dist)
