"""Exact F-measure maximization for multi-label prediction, with the
classical rival rules, a brute-force oracle and regret witnesses."""

from .distributions import (
    ChainLogistic,
    DenseJoint,
    EmpiricalSample,
    ProductBernoulli,
    SparseJoint,
)
from .gfm import delta_from_joint, delta_from_sample, gfm_maximize
from .inference import fm_maximize, threshold_maximize
from .metrics import LabelVector, MetricKind
from .oracle import maximize_exhaustive

__all__ = [
    "ChainLogistic", "DenseJoint", "EmpiricalSample", "ProductBernoulli", "SparseJoint",
    "LabelVector", "MetricKind", "delta_from_joint", "delta_from_sample", "gfm_maximize",
    "fm_maximize", "threshold_maximize", "maximize_exhaustive",
]
