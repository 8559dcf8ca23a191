"""Binary label vectors and instance-wise performance measures.

A :class:`LabelVector` packs ``m`` binary labels into a Python int.  Label 1
is the most significant bit, so ``int(bitstring, 2)`` is the packed value and
integer order coincides with lexicographic order of the bitstrings.  Every
tie rule in the package ("lexicographically smallest") relies on that.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True, order=True)
class LabelVector:
    """Immutable binary vector of ``m`` labels, stored as a packed integer."""

    bits: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")
        if self.bits < 0 or self.bits >> self.m:
            raise ValueError(f"bits {self.bits} do not fit in {self.m} labels")

    @classmethod
    def parse(cls, text: str) -> "LabelVector":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {text!r}")
        return cls(int(text, 2), len(text))

    @classmethod
    def from_bits(cls, values: Iterable[int]) -> "LabelVector":
        values = [int(v) for v in values]
        if any(v not in (0, 1) for v in values):
            raise ValueError("label values must be 0 or 1")
        code = 0
        for v in values:
            code = (code << 1) | v
        return cls(code, len(values))

    @classmethod
    def zeros(cls, m: int) -> "LabelVector":
        return cls(0, m)

    @classmethod
    def ones(cls, m: int) -> "LabelVector":
        return cls((1 << m) - 1, m)

    @classmethod
    def from_indices(cls, indices: Iterable[int], m: int) -> "LabelVector":
        """Vector with ones at the given 0-based label positions."""
        code = 0
        for i in indices:
            if not 0 <= i < m:
                raise IndexError(f"label index {i} out of range for m={m}")
            code |= 1 << (m - 1 - i)
        return cls(code, m)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.m}b")

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, i: int) -> int:
        if not -self.m <= i < self.m:
            raise IndexError(i)
        i %= self.m
        return (self.bits >> (self.m - 1 - i)) & 1

    def ones_count(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> list[int]:
        """0-based positions of the positive labels, ascending."""
        return [i for i in range(self.m) if self[i]]

    def to_array(self) -> np.ndarray:
        return codes_to_matrix(np.array([self.bits]), self.m)[0]


def codes_to_matrix(codes: np.ndarray, m: int) -> np.ndarray:
    """Unpack integer codes into an ``(n, m)`` uint8 matrix, label 1 first."""
    codes = np.asarray(codes, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def matrix_to_codes(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.int64)
    m = matrix.shape[1]
    weights = np.int64(1) << np.arange(m - 1, -1, -1, dtype=np.int64)
    return matrix @ weights


def _check(y: LabelVector, h: LabelVector) -> None:
    if y.m != h.m:
        raise DimensionMismatch(f"label counts differ: {y.m} vs {h.m}")


def f_measure(y: LabelVector, h: LabelVector) -> float:
    """F1 of prediction ``h`` against ``y``; two all-zero vectors score 1."""
    _check(y, h)
    denom = y.ones_count() + h.ones_count()
    if denom == 0:
        return 1.0
    return 2 * (y.bits & h.bits).bit_count() / denom


def hamming_loss(y: LabelVector, h: LabelVector) -> float:
    _check(y, h)
    return (y.bits ^ h.bits).bit_count() / y.m


def subset_zero_one(y: LabelVector, h: LabelVector) -> int:
    _check(y, h)
    return int(y.bits != h.bits)


def jaccard(y: LabelVector, h: LabelVector) -> float:
    """Intersection over union; two all-zero vectors score 0 (not 1)."""
    _check(y, h)
    union = (y.bits | h.bits).bit_count()
    if union == 0:
        return 0.0
    return (y.bits & h.bits).bit_count() / union


def precision(y: LabelVector, h: LabelVector) -> float:
    _check(y, h)
    predicted = h.ones_count()
    if predicted == 0:
        return 1.0
    return (y.bits & h.bits).bit_count() / predicted


def recall(y: LabelVector, h: LabelVector) -> float:
    _check(y, h)
    actual = y.ones_count()
    if actual == 0:
        return 1.0
    return (y.bits & h.bits).bit_count() / actual


class MetricKind(enum.Enum):
    FMEASURE = "f"
    HAMMING = "hamming"
    SUBSET_ZERO_ONE = "subset01"
    JACCARD = "jaccard"
    PRECISION = "precision"
    RECALL = "recall"

    @property
    def is_utility(self) -> bool:
        return self not in (MetricKind.HAMMING, MetricKind.SUBSET_ZERO_ONE)

    def __call__(self, y: LabelVector, h: LabelVector) -> float:
        return _SCALAR[self](y, h)

    @classmethod
    def parse(cls, name: str) -> "MetricKind":
        key = name.strip().lower()
        aliases = {"fmeasure": "f", "f1": "f", "subset": "subset01", "subset_zero_one": "subset01"}
        return cls(aliases.get(key, key))


_SCALAR = {
    MetricKind.FMEASURE: f_measure,
    MetricKind.HAMMING: hamming_loss,
    MetricKind.SUBSET_ZERO_ONE: subset_zero_one,
    MetricKind.JACCARD: jaccard,
    MetricKind.PRECISION: precision,
    MetricKind.RECALL: recall,
}


def metric_table(metric: MetricKind, y_codes, h_codes, m: int) -> np.ndarray:
    """Metric values for every (h, y) pair as an ``(len(h), len(y))`` array.

    Same conventions as the scalar functions, evaluated with popcounts on
    packed codes.
    """
    y = np.asarray(y_codes, dtype=np.int64)[None, :]
    h = np.asarray(h_codes, dtype=np.int64)[:, None]
    tp = np.bitwise_count(y & h).astype(np.float64)
    sy = np.bitwise_count(y).astype(np.float64)
    sh = np.bitwise_count(h).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        if metric is MetricKind.FMEASURE:
            denom = sy + sh
            return np.where(denom == 0, 1.0, 2 * tp / denom)
        if metric is MetricKind.HAMMING:
            return np.bitwise_count(y ^ h) / m
        if metric is MetricKind.SUBSET_ZERO_ONE:
            return (y != h).astype(np.float64)
        if metric is MetricKind.JACCARD:
            union = np.bitwise_count(y | h).astype(np.float64)
            return np.where(union == 0, 0.0, tp / np.where(union == 0, 1, union))
        if metric is MetricKind.PRECISION:
            return np.where(sh == 0, 1.0, tp / sh)
        if metric is MetricKind.RECALL:
            return np.where(sy == 0, 1.0, tp / sy)
    raise ValueError(metric)
