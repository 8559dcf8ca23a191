"""Inference rules that compete with the general maximizer.

MM and JM target Hamming and subset 0/1 loss.  FM maximizes expected F under
label independence.  The categorical and thresholding rules restrict the
candidate set using marginal order.  Everywhere labels are ranked by
decreasing marginal with the lower index first on ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as D
from .gfm import delta_from_joint, expected_f_via_delta
from .metrics import DimensionMismatch, LabelVector

TIE_TOL = 1e-12
CATEGORICAL_SUM_TOL = 1e-6


@dataclass(frozen=True)
class IndepFResult:
    h: LabelVector
    expected_f_under_independence: float
    per_k: tuple[float, ...]


@dataclass(frozen=True)
class ThresholdResult:
    h: LabelVector
    theta: float
    expected_f: float


def rank_labels(p) -> np.ndarray:
    """Label indices by decreasing marginal, lower index first on ties."""
    p = np.asarray(p, dtype=np.float64)
    return np.lexsort((np.arange(len(p)), -p))


def count_pmf_step(pmf: np.ndarray, q: float) -> np.ndarray:
    nxt = np.zeros(len(pmf) + 1)
    nxt[:-1] = pmf * (1.0 - q)
    nxt[1:] += pmf * q
    return nxt


def count_pmf(p) -> np.ndarray:
    """Distribution of the number of successes among independent Bernoullis."""
    pmf = np.ones(1)
    for q in np.asarray(p, dtype=np.float64):
        pmf = count_pmf_step(pmf, q)
    return pmf


def _expected_f_split(selected: np.ndarray, rest: np.ndarray, k: int) -> float:
    # a hits among the k predicted labels, b positives elsewhere: F = 2a/(a+b+k)
    a = np.arange(len(selected))[:, None]
    b = np.arange(len(rest))[None, :]
    return float((selected[:, None] * rest[None, :] * (2.0 * a / (a + b + k))).sum())


def fm_expected_f_independent(p_sorted, k: int) -> float:
    """Exact E[F] of predicting the first ``k`` labels under independence.

    ``p_sorted`` must be in nonincreasing order.
    """
    p = np.asarray(p_sorted, dtype=np.float64)
    m = len(p)
    if not 1 <= k <= m:
        raise ValueError(f"k must be in 1..{m}, got {k}")
    if np.any(np.diff(p) > 0):
        raise ValueError("marginals must be sorted in nonincreasing order")
    return _expected_f_split(count_pmf(p[:k]), count_pmf(p[k:]), k)


def expected_f_independent(p, h: LabelVector) -> float:
    """Exact E[F(Y, h)] when the labels are independent with marginals ``p``."""
    p = np.asarray(p, dtype=np.float64)
    if len(p) != h.m:
        raise DimensionMismatch(f"{len(p)} marginals for a {h.m}-label prediction")
    mask = h.to_array().astype(bool)
    k = int(mask.sum())
    if k == 0:
        return float(np.prod(1.0 - p))
    return _expected_f_split(count_pmf(p[mask]), count_pmf(p[~mask]), k)


def fm_maximize(p) -> IndepFResult:
    """Best prediction under independence among the m + 1 top-k candidates."""
    p = np.asarray(p, dtype=np.float64)
    m = len(p)
    order = rank_labels(p)
    ps = p[order]
    # prefix[k] = count pmf of the top k labels, suffix[k] = of the remaining ones
    prefix = [np.ones(1)]
    for q in ps:
        prefix.append(count_pmf_step(prefix[-1], q))
    suffix = [np.ones(1)]
    for q in ps[::-1]:
        suffix.append(count_pmf_step(suffix[-1], q))
    suffix.reverse()
    values = [float(np.prod(1.0 - p))]
    values += [_expected_f_split(prefix[k], suffix[k], k) for k in range(1, m + 1)]
    vals = np.array(values)
    best = int(np.argmax(vals >= vals.max() - TIE_TOL))
    h = LabelVector.from_indices(order[:best].tolist(), m)
    return IndepFResult(h, values[best], tuple(values))


def lewis_approximation(p, h: LabelVector) -> float:
    """Closed-form approximation of E[F] under independence; exact for h = 0."""
    p = np.asarray(p, dtype=np.float64)
    if len(p) != h.m:
        raise DimensionMismatch(f"{len(p)} marginals for a {h.m}-label prediction")
    hv = h.to_array()
    if not hv.any():
        return float(np.prod(1.0 - p))
    return float(2.0 * (p @ hv) / (p.sum() + hv.sum()))


def categorical_maximize(p) -> LabelVector:
    """F-maximizer when all mass sits on single-positive vectors.

    Takes the smallest k whose top-k mass is at least (1 + k) times the next
    marginal; all labels if no k qualifies.
    """
    p = np.asarray(p, dtype=np.float64)
    total = p.sum()
    if abs(total - 1.0) > CATEGORICAL_SUM_TOL or np.any(p < 0):
        raise ValueError(f"categorical masses must be nonnegative and sum to 1 (got {total!r})")
    p = p / total
    m = len(p)
    order = rank_labels(p)
    ps = p[order]
    cumulative = np.cumsum(ps)
    for k in range(1, m):
        if cumulative[k - 1] >= (1 + k) * ps[k]:
            return LabelVector.from_indices(order[:k].tolist(), m)
    return LabelVector.ones(m)


def threshold_candidates(p) -> list[tuple[float, LabelVector]]:
    """Predictions h(theta) = {i : p_i >= theta}, largest theta first.

    Thresholds are 1 and the marginals themselves.  When no threshold yields
    the empty prediction (some p_i = 1), it is added with theta = inf.
    """
    p = np.asarray(p, dtype=np.float64)
    thetas = sorted({1.0, *p.tolist()}, reverse=True)
    out = [(t, LabelVector.from_bits((p >= t).astype(int))) for t in thetas]
    if all(h.ones_count() for _, h in out):
        out.insert(0, (math.inf, LabelVector.zeros(len(p))))
    return out


def threshold_maximize(dist) -> ThresholdResult:
    """Best threshold on the marginals, judged by the true joint."""
    joint = D.as_joint(dist)
    delta = delta_from_joint(joint)
    best = None
    for theta, h in threshold_candidates(joint.marginals()):
        value = expected_f_via_delta(delta, h)
        if best is None or value > best.expected_f + TIE_TOL:
            best = ThresholdResult(h, theta, value)
    return best


def mm_predict(dist) -> LabelVector:
    return D.marginal_modes(dist)


def jm_predict(dist) -> LabelVector:
    return D.joint_mode(dist)
