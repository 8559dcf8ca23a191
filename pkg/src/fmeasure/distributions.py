"""Joint distributions over {0,1}^m.

Five representations share one small protocol.  Anything enumerable converts
to a :class:`SparseJoint` through :func:`as_joint`, and every inference rule
works on that form.  :class:`ChainLogistic` only supports sampling (and exact
enumeration at small ``m`` on explicit request).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Union

import numpy as np

from .metrics import LabelVector, codes_to_matrix, matrix_to_codes

NORMALIZATION_TOL = 1e-9
MAX_DENSE_M = 20


class UnsupportedDistribution(TypeError):
    """Raised when an operation needs enumeration but the model only samples."""


class FormatError(ValueError):
    pass


def _as_code(key, m: int) -> int:
    if isinstance(key, LabelVector):
        if key.m != m:
            raise ValueError(f"vector {key} has {key.m} labels, expected {m}")
        return key.bits
    if isinstance(key, str):
        return _as_code(LabelVector.parse(key), m)
    code = int(key)
    if code < 0 or code >> m:
        raise ValueError(f"code {code} out of range for m={m}")
    return code


@dataclass(frozen=True, eq=False)
class SparseJoint:
    """Probability masses on an explicit support; absent vectors have mass 0.

    ``codes`` is sorted ascending and ``probs`` is strictly positive.
    """

    m: int
    codes: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_mapping(cls, m: int, masses: Mapping, tol: float = NORMALIZATION_TOL) -> "SparseJoint":
        merged: dict[int, float] = {}
        for key, p in masses.items():
            code = _as_code(key, m)
            if code in merged:
                raise ValueError(f"duplicate support vector {format(code, f'0{m}b')}")
            merged[code] = float(p)
        codes = np.array(sorted(merged), dtype=np.int64)
        probs = np.array([merged[c] for c in codes], dtype=np.float64)
        return cls.from_arrays(m, codes, probs, tol=tol)

    @classmethod
    def from_arrays(cls, m: int, codes, probs, tol: float = NORMALIZATION_TOL) -> "SparseJoint":
        if m < 1:
            raise ValueError("m must be positive")
        codes = np.asarray(codes, dtype=np.int64)
        probs = np.asarray(probs, dtype=np.float64)
        if codes.shape != probs.shape or codes.ndim != 1:
            raise ValueError("codes and probs must be 1-D arrays of equal length")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and nonnegative")
        if np.any(codes < 0) or np.any(codes >> m):
            raise ValueError(f"codes out of range for m={m}")
        total = probs.sum()
        if abs(total - 1.0) > tol:
            raise ValueError(f"masses sum to {total!r}, not 1")
        keep = probs > 0
        codes, probs = codes[keep], probs[keep] / total
        order = np.argsort(codes, kind="stable")
        codes, probs = codes[order], probs[order]
        if np.any(np.diff(codes) == 0):
            raise ValueError("duplicate support vectors")
        return cls(m, codes, probs)

    @classmethod
    def point_mass(cls, y: LabelVector) -> "SparseJoint":
        return cls(y.m, np.array([y.bits], dtype=np.int64), np.array([1.0]))

    def __len__(self) -> int:
        return len(self.codes)

    def items(self) -> Iterable[tuple[LabelVector, float]]:
        for c, p in zip(self.codes.tolist(), self.probs.tolist()):
            yield LabelVector(c, self.m), p

    @property
    def support(self) -> dict[LabelVector, float]:
        return dict(self.items())

    def prob(self, y: LabelVector) -> float:
        i = np.searchsorted(self.codes, y.bits)
        if i < len(self.codes) and self.codes[i] == y.bits:
            return float(self.probs[i])
        return 0.0

    def label_matrix(self) -> np.ndarray:
        return codes_to_matrix(self.codes, self.m)

    def ones_counts(self) -> np.ndarray:
        return np.bitwise_count(self.codes).astype(np.int64)

    def marginals(self) -> np.ndarray:
        return self.probs @ self.label_matrix()

    def prob_all_zero(self) -> float:
        return float(self.probs[self.codes == 0].sum())

    def joint_mode(self) -> LabelVector:
        # codes are ascending, so argmax's first hit is the smallest bitstring
        return LabelVector(int(self.codes[np.argmax(self.probs)]), self.m)

    def marginal_modes(self) -> LabelVector:
        return _threshold_half(self.marginals())

    def sample(self, n: int, seed: int) -> "EmpiricalSample":
        if n < 1:
            raise ValueError("n must be at least 1")
        rng = np.random.default_rng(seed)
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf, rng.random(n), side="right")
        idx = np.minimum(idx, len(cdf) - 1)
        return EmpiricalSample.from_codes(self.m, self.codes[idx])


@dataclass(frozen=True, eq=False)
class DenseJoint:
    """All ``2**m`` masses in an array indexed by the packed code."""

    m: int
    probs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.m <= MAX_DENSE_M:
            raise ValueError(f"dense storage supports 1 <= m <= {MAX_DENSE_M}")
        if np.shape(self.probs) != (1 << self.m,):
            raise ValueError(f"expected {1 << self.m} masses")

    def to_sparse(self) -> SparseJoint:
        return SparseJoint.from_arrays(self.m, np.arange(1 << self.m), self.probs)


@dataclass(frozen=True, eq=False)
class ProductBernoulli:
    """Independent labels with marginals ``p``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or len(p) == 0:
            raise ValueError("p must be a nonempty 1-D sequence")
        if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
            raise ValueError("marginals must lie in [0, 1]")
        object.__setattr__(self, "p", p)

    @property
    def m(self) -> int:
        return len(self.p)

    def to_sparse(self) -> SparseJoint:
        if self.m > MAX_DENSE_M:
            raise UnsupportedDistribution(f"enumeration capped at m={MAX_DENSE_M}")
        codes = np.arange(1 << self.m, dtype=np.int64)
        y = codes_to_matrix(codes, self.m).astype(bool)
        probs = np.where(y, self.p, 1.0 - self.p).prod(axis=1)
        keep = probs > 0
        return SparseJoint(self.m, codes[keep], probs[keep] / probs[keep].sum())

    def marginals(self) -> np.ndarray:
        return self.p.copy()

    def prob_all_zero(self) -> float:
        return float(np.prod(1.0 - self.p))

    def marginal_modes(self) -> LabelVector:
        return _threshold_half(self.p)

    def joint_mode(self) -> LabelVector:
        return _threshold_half(self.p)

    def sample(self, n: int, seed: int) -> "EmpiricalSample":
        if n < 1:
            raise ValueError("n must be at least 1")
        rng = np.random.default_rng(seed)
        y = rng.random((n, self.m)) < self.p
        return EmpiricalSample.from_codes(self.m, matrix_to_codes(y))


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


@dataclass(frozen=True, eq=False)
class ChainLogistic:
    """Labels generated one at a time by logistic conditionals.

    ``Pr(y_i = 1 | y_1..y_{i-1}) = sigmoid(sum_j 2 w_ij (y_j - 1/2) + w_i0)``
    with ``weights[i, j]`` used only for ``j < i``.
    """

    weights: np.ndarray
    intercepts: np.ndarray

    def __post_init__(self):
        w = np.tril(np.asarray(self.weights, dtype=np.float64), k=-1)
        b = np.asarray(self.intercepts, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or b.shape != (w.shape[0],):
            raise ValueError("weights must be m x m and intercepts length m")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "intercepts", b)

    @property
    def m(self) -> int:
        return len(self.intercepts)

    def conditional(self, i: int, prefix: np.ndarray) -> np.ndarray:
        """Pr(y_i = 1 | prefix) for a batch of 0/1 prefixes of length ``i``."""
        prefix = np.atleast_2d(np.asarray(prefix, dtype=np.float64))
        logit = 2.0 * (prefix - 0.5) @ self.weights[i, :i] + self.intercepts[i]
        return _sigmoid(logit)

    def sample(self, n: int, seed: int) -> "EmpiricalSample":
        if n < 1:
            raise ValueError("n must be at least 1")
        rng = np.random.default_rng(seed)
        y = np.zeros((n, self.m), dtype=np.uint8)
        for i in range(self.m):
            y[:, i] = rng.random(n) < self.conditional(i, y[:, :i])
        return EmpiricalSample.from_codes(self.m, matrix_to_codes(y))

    def to_sparse(self) -> SparseJoint:
        """Exact enumeration by the chain rule; only for small ``m``."""
        if self.m > MAX_DENSE_M:
            raise UnsupportedDistribution(f"enumeration capped at m={MAX_DENSE_M}")
        codes = np.arange(1 << self.m, dtype=np.int64)
        y = codes_to_matrix(codes, self.m)
        probs = np.ones(len(codes))
        for i in range(self.m):
            p1 = self.conditional(i, y[:, :i])
            probs *= np.where(y[:, i] == 1, p1, 1.0 - p1)
        keep = probs > 0
        return SparseJoint(self.m, codes[keep], probs[keep] / probs[keep].sum())

    def _unsupported(self, *_):
        raise UnsupportedDistribution("chain models are sampling-only; draw a sample first")

    marginals = prob_all_zero = joint_mode = marginal_modes = _unsupported


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """Multiset of observed label vectors; ``codes`` unique and ascending."""

    m: int
    codes: np.ndarray
    counts: np.ndarray
    _joint: SparseJoint | None = field(default=None, repr=False)

    @classmethod
    def from_codes(cls, m: int, observations) -> "EmpiricalSample":
        obs = np.asarray(observations, dtype=np.int64)
        if obs.size == 0:
            raise ValueError("a sample needs at least one observation")
        if np.any(obs < 0) or np.any(obs >> m):
            raise ValueError(f"codes out of range for m={m}")
        codes, counts = np.unique(obs, return_counts=True)
        return cls(m, codes, counts.astype(np.int64))

    @classmethod
    def from_vectors(cls, vectors: Iterable[LabelVector | str]) -> "EmpiricalSample":
        vecs = [LabelVector.parse(v) if isinstance(v, str) else v for v in vectors]
        if not vecs:
            raise ValueError("a sample needs at least one observation")
        m = vecs[0].m
        if any(v.m != m for v in vecs):
            raise ValueError("observations differ in length")
        return cls.from_codes(m, [v.bits for v in vecs])

    @classmethod
    def from_counts(cls, m: int, counts: Mapping) -> "EmpiricalSample":
        merged: dict[int, int] = {}
        for key, c in counts.items():
            if int(c) < 1:
                raise ValueError("counts must be positive")
            code = _as_code(key, m)
            merged[code] = merged.get(code, 0) + int(c)
        codes = np.array(sorted(merged), dtype=np.int64)
        return cls(m, codes, np.array([merged[c] for c in codes], dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def observations(self) -> np.ndarray:
        """All observations (with repeats) as codes, ascending."""
        return np.repeat(self.codes, self.counts)

    def as_joint(self) -> SparseJoint:
        if self._joint is None:
            probs = self.counts / self.counts.sum()
            object.__setattr__(self, "_joint", SparseJoint(self.m, self.codes.copy(), probs))
        return self._joint

    def marginals(self) -> np.ndarray:
        return self.as_joint().marginals()

    def prob_all_zero(self) -> float:
        return self.as_joint().prob_all_zero()

    def joint_mode(self) -> LabelVector:
        return self.as_joint().joint_mode()

    def marginal_modes(self) -> LabelVector:
        return self.as_joint().marginal_modes()

    def sample(self, n: int, seed: int) -> "EmpiricalSample":
        return self.as_joint().sample(n, seed)


Distribution = Union[SparseJoint, DenseJoint, ProductBernoulli, ChainLogistic, EmpiricalSample]


def _threshold_half(p: np.ndarray) -> LabelVector:
    # exact ties at 0.5 go to 0
    return LabelVector.from_bits((np.asarray(p) > 0.5).astype(int))


def as_joint(dist: Distribution) -> SparseJoint:
    """Enumerable view of ``dist``; chain models are refused."""
    if isinstance(dist, SparseJoint):
        return dist
    if isinstance(dist, EmpiricalSample):
        return dist.as_joint()
    if isinstance(dist, (DenseJoint, ProductBernoulli)):
        return dist.to_sparse()
    if isinstance(dist, ChainLogistic):
        raise UnsupportedDistribution("chain models are sampling-only; draw a sample first")
    raise TypeError(f"not a distribution: {type(dist).__name__}")


def marginals(dist: Distribution) -> np.ndarray:
    if isinstance(dist, (ProductBernoulli, ChainLogistic, EmpiricalSample)):
        return dist.marginals()
    return as_joint(dist).marginals()


def prob_all_zero(dist: Distribution) -> float:
    if isinstance(dist, (ProductBernoulli, ChainLogistic, EmpiricalSample)):
        return dist.prob_all_zero()
    return as_joint(dist).prob_all_zero()


def joint_mode(dist: Distribution) -> LabelVector:
    if isinstance(dist, (ProductBernoulli, ChainLogistic, EmpiricalSample)):
        return dist.joint_mode()
    return as_joint(dist).joint_mode()


def marginal_modes(dist: Distribution) -> LabelVector:
    return _threshold_half(marginals(dist))


def sample(dist: Distribution, n: int, seed: int) -> EmpiricalSample:
    if isinstance(dist, DenseJoint):
        dist = dist.to_sparse()
    return dist.sample(n, seed)


def enumerate_all(m: int) -> Iterable[LabelVector]:
    for bits in itertools.product((0, 1), repeat=m):
        yield LabelVector.from_bits(bits)


# -- text formats ---------------------------------------------------------

def _content_lines(path) -> list[tuple[int, str]]:
    lines = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    return lines


def read_distribution(path) -> SparseJoint:
    """Parse ``m <int>`` followed by ``<bitstring> <prob>`` lines."""
    lines = _content_lines(path)
    if not lines:
        raise FormatError(f"{path}: empty distribution file")
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "m" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise FormatError(f"{path}:{lineno}: expected 'm <int>', got {head!r}")
    m = int(parts[1])
    masses: dict[int, float] = {}
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected '<bitstring> <prob>'")
        try:
            y = LabelVector.parse(parts[0])
            p = float(parts[1])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        if y.m != m:
            raise FormatError(f"{path}:{lineno}: {parts[0]} has {y.m} labels, header says {m}")
        if y.bits in masses:
            raise FormatError(f"{path}:{lineno}: duplicate vector {parts[0]}")
        masses[y.bits] = p
    if not masses:
        raise FormatError(f"{path}: no support vectors")
    try:
        return SparseJoint.from_mapping(m, masses)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_distribution(dist: Distribution, path) -> None:
    joint = as_joint(dist)
    out = [f"m {joint.m}"]
    out += [f"{y} {p:.17g}" for y, p in joint.items()]
    Path(path).write_text("\n".join(out) + "\n")


def format_distribution(dist: Distribution) -> str:
    joint = as_joint(dist)
    return "\n".join([f"m {joint.m}"] + [f"{y} {p:.12g}" for y, p in joint.items()])


def read_samples(path) -> EmpiricalSample:
    vectors = []
    for lineno, line in _content_lines(path):
        try:
            vectors.append(LabelVector.parse(line))
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    if not vectors:
        raise FormatError(f"{path}: no observations")
    if len({v.m for v in vectors}) != 1:
        raise FormatError(f"{path}: observations differ in length")
    return EmpiricalSample.from_vectors(vectors)


def write_samples(sample: EmpiricalSample, path) -> None:
    lines = [format(int(c), f"0{sample.m}b") for c in sample.observations()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_marginals(path) -> np.ndarray:
    lines = _content_lines(path)
    if len(lines) != 1:
        raise FormatError(f"{path}: expected one line of marginals")
    try:
        p = np.array([float(t) for t in lines[0][1].split()])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if len(p) == 0 or np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
        raise FormatError(f"{path}: marginals must be reals in [0, 1]")
    return p
