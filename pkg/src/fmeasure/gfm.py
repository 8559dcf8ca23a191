"""General F-measure maximizer.

The expected F-measure of a prediction with ``k`` positives is a sum of
``k`` entries from column ``k`` of an ``m x m`` matrix,

    delta[i, k] = sum over y with y_i = 1 of 2 Pr(y) / (s_y + k),

plus the single number ``Pr(y = 0)`` for the empty prediction.  Maximizing
over predictions of fixed size is therefore a top-k selection per column.

Indices here are 0-based: ``delta[i, k - 1]`` holds label ``i + 1`` at
prediction size ``k``; ``p[i, s - 1]`` holds ``Pr(y_i = 1, s_y = s)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import distributions as D
from .metrics import DimensionMismatch, LabelVector, codes_to_matrix

TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DeltaMatrix:
    m: int
    delta: np.ndarray
    p0: float

    def __post_init__(self):
        if self.delta.shape != (self.m, self.m):
            raise ValueError(f"delta must be {self.m} x {self.m}")
        if not 0.0 <= self.p0 <= 1.0 + 1e-12:
            raise ValueError("p0 must be a probability")


@dataclass(frozen=True, eq=False)
class PMatrix:
    m: int
    p: np.ndarray

    def __post_init__(self):
        if self.p.shape != (self.m, self.m):
            raise ValueError(f"P must be {self.m} x {self.m}")


@dataclass(frozen=True)
class GfmResult:
    h: LabelVector
    expected_f: float
    per_k: tuple[tuple[LabelVector, float], ...]


def _size_weights(s: np.ndarray, m: int) -> np.ndarray:
    """2 / (s + k) for each row count ``s`` and each k = 1..m."""
    k = np.arange(1, m + 1, dtype=np.float64)
    return 2.0 / (np.asarray(s, dtype=np.float64)[:, None] + k[None, :])


def delta_from_joint(dist) -> DeltaMatrix:
    joint = D.as_joint(dist)
    y = joint.label_matrix().astype(np.float64)
    s = joint.ones_counts()
    weighted = joint.probs[:, None] * _size_weights(s, joint.m)
    # rows with s = 0 have y = 0 everywhere, so their 2/k weights never land
    return DeltaMatrix(joint.m, y.T @ weighted, joint.prob_all_zero())


def delta_from_sample(sample: D.EmpiricalSample) -> DeltaMatrix:
    """Plug-in estimate by counting; each observation contributes 2/(s+k)."""
    if sample.n < 1:
        raise ValueError("empty sample")
    m = sample.m
    y = codes_to_matrix(sample.codes, m).astype(np.float64)
    s = np.bitwise_count(sample.codes)
    totals = y.T @ (sample.counts[:, None] * _size_weights(s, m))
    zero = int(sample.counts[sample.codes == 0].sum())
    return DeltaMatrix(m, totals / sample.n, zero / sample.n)


def p_matrix_from_joint(dist) -> PMatrix:
    joint = D.as_joint(dist)
    m = joint.m
    p = np.zeros((m, m))
    s = joint.ones_counts()
    y = joint.label_matrix()
    for row, (count, mass) in enumerate(zip(s, joint.probs)):
        if count:
            p[y[row] == 1, count - 1] += mass
    return PMatrix(m, p)


def p_matrix_from_sample(sample: D.EmpiricalSample) -> PMatrix:
    m = sample.m
    counts = np.zeros((m, m), dtype=np.int64)
    s = np.bitwise_count(sample.codes)
    y = codes_to_matrix(sample.codes, m)
    for row, (size, c) in enumerate(zip(s, sample.counts)):
        if size:
            counts[y[row] == 1, size - 1] += c
    return PMatrix(m, counts / sample.n)


def w_matrix(m: int) -> np.ndarray:
    """``W[s-1, k-1] = 2 / (s + k)``."""
    return _size_weights(np.arange(1, m + 1), m)


def delta_from_p(P: PMatrix, p0: float) -> DeltaMatrix:
    return DeltaMatrix(P.m, P.p @ w_matrix(P.m), p0)


def top_k(column: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest entries; equal values keep lower indices first."""
    order = np.argsort(-column, kind="stable")
    return np.sort(order[:k])


def gfm_maximize(delta: DeltaMatrix) -> GfmResult:
    m = delta.m
    per_k = [(LabelVector.zeros(m), float(delta.p0))]
    for k in range(1, m + 1):
        column = delta.delta[:, k - 1]
        chosen = top_k(column, k)
        per_k.append((LabelVector.from_indices(chosen.tolist(), m), float(column[chosen].sum())))
    values = np.array([v for _, v in per_k])
    # the smallest k within tolerance of the best wins
    best = int(np.argmax(values >= values.max() - TIE_TOL))
    h, value = per_k[best]
    return GfmResult(h, value, tuple(per_k))


def expected_f_via_delta(delta: DeltaMatrix, h: LabelVector) -> float:
    if h.m != delta.m:
        raise DimensionMismatch(f"prediction has {h.m} labels, delta {delta.m}")
    k = h.ones_count()
    if k == 0:
        return float(delta.p0)
    return float(delta.delta[h.indices(), k - 1].sum())


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    """Dump a square matrix as ``i,k,value`` rows with 1-based indices."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "k", "value"])
        for i in range(matrix.shape[0]):
            for k in range(matrix.shape[1]):
                writer.writerow([i + 1, k + 1, f"{matrix[i, k]:.12g}"])


def read_matrix_csv(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    m = max(int(r["i"]) for r in rows)
    out = np.zeros((m, m))
    for r in rows:
        out[int(r["i"]) - 1, int(r["k"]) - 1] = float(r["value"])
    return out
