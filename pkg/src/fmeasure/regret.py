"""Worst-case regret formulas and the distributions that attain them.

Each witness is a small explicit joint on which a surrogate rule (marginal
modes, joint mode, independence-based FM, marginal thresholding) is compared
against the exhaustive F-maximizer.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import distributions as D
from . import oracle
from .gfm import delta_from_joint, gfm_maximize
from .inference import fm_maximize, threshold_maximize
from .metrics import LabelVector, MetricKind

DEFAULT_EPS = 1e-4


class Theorem(enum.Enum):
    HAMMING = "3.1"
    SUBSET01 = "3.2"
    INDEPENDENCE = "4.2"
    THRESHOLD = "4.5"

    @classmethod
    def parse(cls, text: str) -> "Theorem":
        key = str(text).strip().upper().removeprefix("T").replace("_", ".")
        return cls(key)


@dataclass(frozen=True)
class WitnessSpec:
    theorem: Theorem
    m: int
    q: float | None = None
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        t, m = self.theorem, self.m
        if t in (Theorem.HAMMING, Theorem.SUBSET01) and m <= 2:
            raise ValueError(f"theorem {t.value} needs m > 2")
        if t is Theorem.THRESHOLD and (m < 6 or m % 2):
            raise ValueError("the thresholding witness needs even m >= 6")
        if t is Theorem.INDEPENDENCE:
            if m < 1:
                raise ValueError("m must be positive")
            if self.q is None or not 0.5 <= self.q <= 1.0:
                raise ValueError("theorem 4.2 needs q in [1/2, 1]")
        if t in (Theorem.HAMMING, Theorem.THRESHOLD) and not 0 < self.eps < 1 / (4 * m):
            raise ValueError(f"eps must lie in (0, 1/(4m)) = (0, {1 / (4 * m):.4g})")


@dataclass(frozen=True)
class RegretReport:
    method: str
    h_method: LabelVector
    h_oracle: LabelVector
    value_method: float
    value_oracle: float
    regret: float
    closed_form: float | None = None

    @property
    def abs_gap(self) -> float | None:
        if self.closed_form is None:
            return None
        return abs(self.regret - self.closed_form)


WITNESS_CSV_HEADER = "theorem,m,q,eps,regret_numeric,closed_form,abs_gap"


def witness_csv_row(spec: WitnessSpec, report: RegretReport) -> str:
    def fmt(x):
        return "" if x is None else f"{x:.12g}"

    eps = spec.eps if spec.theorem in (Theorem.HAMMING, Theorem.THRESHOLD) else None
    return ",".join([
        spec.theorem.value, str(spec.m), fmt(spec.q), fmt(eps),
        fmt(report.regret), fmt(report.closed_form), fmt(report.abs_gap),
    ])


# -- closed forms ---------------------------------------------------------

def worst_case_hamming(m: int) -> float:
    if m <= 2:
        raise ValueError("the Hamming-loss result holds for m > 2")
    return 0.5


def worst_case_subset01(m: int) -> float:
    if m <= 2:
        raise ValueError("the subset 0/1 result holds for m > 2")
    return (2 * m * m - m - 2) * m / ((2 * m - 1) * (m * m + m + 4))


def independence_delta(q: float, m: int) -> float:
    """E[F(Y, 1)] - E[F(Y, 0)] when every label is independently 0 w.p. ``q``.

    Terms are accumulated in log space so large ``m`` does not overflow the
    factorials.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must be a probability")
    if m < 1:
        raise ValueError("m must be positive")
    total = 0.0
    for s in range(1, m + 1):
        if q == 1.0 or (q == 0.0 and s < m):
            continue
        log_term = (
            math.log(2 * m) + math.lgamma(m) - math.lgamma(m - s + 1) - math.lgamma(s)
            - math.log(m + s) + s * math.log1p(-q)
        )
        if m - s:
            log_term += (m - s) * math.log(q)
        total += math.exp(log_term)
    return total - q ** m


def independence_regret_bound(q: float, m: int | None = None) -> float:
    if m is not None and independence_delta(q, m) <= 0:
        warnings.warn(
            f"delta_m(q={q}, m={m}) <= 0: independence-based inference does not "
            "pick the all-ones vector here, so the 2q - 1 bound is not realized",
            stacklevel=2,
        )
    return 2 * q - 1


def threshold_regret_bound(m: int) -> float:
    return max(0.0, 1 / 6 - 2 / (m + 4))


def jaccard_regret_bound(dist) -> float:
    """Upper bound ``1 - best_expected_F / 2`` on the Jaccard regret of h_F."""
    return 1.0 - gfm_maximize(delta_from_joint(dist)).expected_f / 2


# -- witnesses ------------------------------------------------------------

def _hamming_witness(m: int, eps: float) -> D.SparseJoint:
    first = LabelVector.from_indices([0], m)
    rest = LabelVector.from_indices(range(1, m), m)
    masses = {first: 0.5 - eps, rest: 0.5 - (2 * m - 3) * eps}
    for j in range(1, m):
        masses[LabelVector(rest.bits & ~(1 << (m - 1 - j)), m)] = 2 * eps
    return D.SparseJoint.from_mapping(m, masses, tol=1e-12)


def _subset01_witness(m: int) -> D.SparseJoint:
    mass = 2 / (m * m + m + 4)
    masses = {LabelVector.zeros(m): mass}
    for size in (m - 2, m - 1, m):
        for idx in combinations(range(m), size):
            masses[LabelVector.from_indices(idx, m)] = mass
    return D.SparseJoint.from_mapping(m, masses, tol=1e-12)


def _independence_witness(m: int, q: float) -> tuple[D.ProductBernoulli, D.SparseJoint]:
    product = D.ProductBernoulli(np.full(m, 1.0 - q))
    extremes = {LabelVector.zeros(m): q, LabelVector.ones(m): 1.0 - q}
    return product, D.SparseJoint.from_mapping(m, extremes, tol=1e-12)


def _threshold_witness(m: int, eps: float) -> D.SparseJoint:
    half = m // 2
    # label 2 plus one of two disjoint blocks drawn from labels 3..m
    left = LabelVector.from_indices([1, *range(2, half + 1)], m)
    right = LabelVector.from_indices([1, *range(half + 1, m)], m)
    masses = {
        LabelVector.from_indices([0], m): 0.5 - eps,
        left: (0.5 + eps) / 2,
        right: (0.5 + eps) / 2,
    }
    return D.SparseJoint.from_mapping(m, masses, tol=1e-12)


def build_witness(spec: WitnessSpec):
    """The extremal distribution for ``spec`` (a pair for theorem 4.2)."""
    if spec.theorem is Theorem.HAMMING:
        return _hamming_witness(spec.m, spec.eps)
    if spec.theorem is Theorem.SUBSET01:
        return _subset01_witness(spec.m)
    if spec.theorem is Theorem.INDEPENDENCE:
        return _independence_witness(spec.m, spec.q)
    return _threshold_witness(spec.m, spec.eps)


def verify_witness(spec: WitnessSpec, cap: int = oracle.DEFAULT_CAP) -> RegretReport:
    """Run the theorem's rule on its witness and measure the true F regret."""
    dist = build_witness(spec)
    m = spec.m
    if spec.theorem is Theorem.HAMMING:
        method, h = "marginal_modes", D.marginal_modes(dist)
        closed = worst_case_hamming(m)
    elif spec.theorem is Theorem.SUBSET01:
        # the mode is tied across the whole support; use the intended minimizer
        method, h = "subset_minimizer", LabelVector.zeros(m)
        closed = worst_case_subset01(m)
    elif spec.theorem is Theorem.INDEPENDENCE:
        _, dist = dist
        method = "fm_independence"
        h = fm_maximize(D.marginals(dist)).h
        closed = independence_regret_bound(spec.q)
    else:
        method, h = "threshold", threshold_maximize(dist).h
        closed = threshold_regret_bound(m)
    best = oracle.maximize_exhaustive(dist, MetricKind.FMEASURE, cap)
    value = oracle.expected_metric(dist, h, MetricKind.FMEASURE)
    return RegretReport(method, h, best.best, value, best.value, best.value - value, closed)


def bound_trend(ms, q_of_m=lambda m: 1 - 1 / m) -> list[tuple[int, float, float, float]]:
    """``(m, q, delta_m(q), 2q - 1)`` along a sequence of label counts."""
    rows = []
    for m in ms:
        q = q_of_m(m)
        rows.append((m, q, independence_delta(q, m), 2 * q - 1))
    return rows
