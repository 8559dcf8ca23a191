import math
import warnings
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_joints
from fmeasure import distributions as D
from fmeasure import oracle
from fmeasure import regret as R
from fmeasure.gfm import delta_from_joint, gfm_maximize
from fmeasure.inference import fm_maximize
from fmeasure.metrics import LabelVector, MetricKind

T = R.Theorem


def brute_delta(q, m):
    """E[F(y, 1)] - E[F(y, 0)] by summing over every outcome of m iid labels."""
    total = 0.0
    for y in product((0, 1), repeat=m):
        s = sum(y)
        prob = (1 - q) ** s * q ** (m - s)
        total += prob * (2 * s / (s + m) - (1.0 if s == 0 else 0.0))
    return total


def test_closed_forms():
    assert R.worst_case_hamming(3) == 0.5 and R.worst_case_hamming(25) == 0.5
    with pytest.raises(ValueError):
        R.worst_case_hamming(2)
    assert R.worst_case_subset01(3) == pytest.approx(39 / 80, abs=1e-15)
    assert R.worst_case_subset01(100) == pytest.approx(0.98961, abs=1e-5)
    values = [R.worst_case_subset01(m) for m in range(3, 60)]
    assert all(a < b < 1 for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        R.worst_case_subset01(2)
    assert R.threshold_regret_bound(12) == pytest.approx(1 / 24)
    assert R.threshold_regret_bound(8) == 0.0
    assert R.threshold_regret_bound(6) == 0.0
    assert R.independence_regret_bound(0.9) == pytest.approx(0.8)


def test_independence_delta_values():
    assert R.independence_delta(0.5, 4) > 0
    assert R.independence_delta(0.95, 100) > 0
    for m in (1, 5, 30):
        assert R.independence_delta(1.0, m) == -1.0
    assert R.independence_delta(0.0, 4) == pytest.approx(1.0)


@pytest.mark.parametrize("m", [1, 2, 3, 6, 10])
@pytest.mark.parametrize("q", [0.5, 0.6, 0.8, 0.9, 0.99])
def test_independence_delta_matches_enumeration(q, m):
    assert R.independence_delta(q, m) == pytest.approx(brute_delta(q, m), abs=1e-12)


def test_independence_delta_is_stable_for_large_m():
    d = R.independence_delta(0.95, 200)
    assert math.isfinite(d)
    # sign of the gap for nearly-certain zeros flips from negative to positive as m grows
    assert R.independence_delta(0.9, 6) < 0 < R.independence_delta(0.9, 20)


def test_bound_warns_when_gap_is_not_positive():
    with pytest.warns(UserWarning):
        R.independence_regret_bound(0.9, 6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        R.independence_regret_bound(0.8, 6)


def test_jaccard_bound_examples(table_one):
    assert R.jaccard_regret_bound(D.SparseJoint.point_mass(LabelVector.parse("101"))) == 0.5
    assert R.jaccard_regret_bound(table_one) == pytest.approx(0.75)


def test_jaccard_sandwich_on_random_joints():
    for joint in random_joints(seed=61, count=100, max_m=8, max_support=24):
        h_f = gfm_maximize(delta_from_joint(joint)).h
        assert oracle.regret(joint, h_f, MetricKind.JACCARD) <= R.jaccard_regret_bound(joint) + 1e-12


def test_spec_validation():
    with pytest.raises(ValueError):
        R.WitnessSpec(T.HAMMING, 2)
    with pytest.raises(ValueError):
        R.WitnessSpec(T.THRESHOLD, 7)
    with pytest.raises(ValueError):
        R.WitnessSpec(T.THRESHOLD, 4)
    with pytest.raises(ValueError):
        R.WitnessSpec(T.HAMMING, 5, eps=0.1)
    with pytest.raises(ValueError):
        R.WitnessSpec(T.INDEPENDENCE, 4)
    with pytest.raises(ValueError):
        R.WitnessSpec(T.INDEPENDENCE, 4, q=0.3)
    assert R.Theorem.parse("T3_2") is T.SUBSET01
    assert R.Theorem.parse("4.5") is T.THRESHOLD


@pytest.mark.parametrize("spec", [
    R.WitnessSpec(T.HAMMING, m) for m in (3, 5, 9)
] + [
    R.WitnessSpec(T.SUBSET01, m) for m in (3, 6)
] + [
    R.WitnessSpec(T.THRESHOLD, m) for m in (6, 10, 14)
])
def test_witnesses_are_distributions(spec):
    joint = R.build_witness(spec)
    assert joint.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert joint.probs.min() > 0
    assert joint.m == spec.m


def test_hamming_witness_layout():
    m, eps = 5, 1e-4
    joint = R.build_witness(R.WitnessSpec(T.HAMMING, m, eps=eps))
    s = joint.support
    assert s[LabelVector.parse("10000")] == pytest.approx(0.5 - eps)
    assert s[LabelVector.parse("01111")] == pytest.approx(0.5 - (2 * m - 3) * eps)
    for text in ("00111", "01011", "01101", "01110"):
        assert s[LabelVector.parse(text)] == pytest.approx(2 * eps)
    # every marginal sits just below 1/2, so marginal modes predict nothing
    p = joint.marginals()
    assert p[0] < 0.5 and np.all(p[1:] < 0.5)


def test_subset_witness_layout():
    joint = R.build_witness(R.WitnessSpec(T.SUBSET01, 3))
    assert len(joint) == 8
    np.testing.assert_allclose(joint.probs, 1 / 8)


def test_independence_pair():
    product_model, joint = R.build_witness(R.WitnessSpec(T.INDEPENDENCE, 4, q=0.9))
    np.testing.assert_allclose(product_model.p, 0.1)
    np.testing.assert_allclose(joint.marginals(), 0.1, atol=1e-15)
    assert len(joint) == 2


def test_threshold_witness_matches_twelve_label_pattern(twelve_labels):
    joint = R.build_witness(R.WitnessSpec(T.THRESHOLD, 12, eps=1e-4))
    assert {str(y) for y, _ in joint.items()} == {str(y) for y, _ in twelve_labels.items()} - {"000000000000"}
    np.testing.assert_allclose(sorted(joint.probs), [0.25 + 5e-5, 0.25 + 5e-5, 0.5 - 1e-4])


@pytest.mark.parametrize("m", range(3, 9))
def test_subset_regret_closed_form(m):
    report = R.verify_witness(R.WitnessSpec(T.SUBSET01, m))
    assert report.regret == pytest.approx(R.worst_case_subset01(m), abs=1e-9)
    assert report.h_oracle == LabelVector.ones(m)


def test_subset_regret_three_labels_by_hand():
    report = R.verify_witness(R.WitnessSpec(T.SUBSET01, 3))
    assert report.value_oracle == pytest.approx(0.6125, abs=1e-12)
    assert report.value_method == pytest.approx(0.125, abs=1e-12)


@pytest.mark.parametrize("m", range(6, 15, 2))
def test_threshold_regret_reaches_bound(m):
    eps = 1e-4
    report = R.verify_witness(R.WitnessSpec(T.THRESHOLD, m, eps=eps))
    assert report.regret >= R.threshold_regret_bound(m) - 3 * eps
    assert report.regret == pytest.approx(report.value_oracle - report.value_method)


def test_threshold_regret_twelve_labels():
    report = R.verify_witness(R.WitnessSpec(T.THRESHOLD, 12, eps=1e-4))
    assert abs(report.regret - 1 / 24) <= 1e-3


def test_hamming_witness_regret_exceeds_half():
    # the all-ones prediction beats the one the construction aims at, so the
    # regret of marginal modes is larger than the stated supremum
    report = R.verify_witness(R.WitnessSpec(T.HAMMING, 5, eps=1e-4))
    assert report.h_method == LabelVector.zeros(5)
    assert report.h_oracle == LabelVector.ones(5)
    assert report.value_oracle == pytest.approx(0.611055555556, abs=1e-9)
    assert report.regret > R.worst_case_hamming(5)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.floats(0.5, 1.0))
def test_fm_picks_all_ones_exactly_when_gap_positive(m, q):
    delta = R.independence_delta(q, m)
    if abs(delta) < 1e-9:
        return
    h = fm_maximize(np.full(m, 1.0 - q)).h
    assert (h == LabelVector.ones(m)) == (delta > 0)


@pytest.mark.parametrize("q,m", [(0.8, 6), (0.9, 20), (0.7, 4), (0.85, 10)])
def test_independence_regret_where_gap_positive(q, m):
    assert R.independence_delta(q, m) > 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = R.verify_witness(R.WitnessSpec(T.INDEPENDENCE, m, q=q), cap=20)
    assert report.h_method == LabelVector.ones(m)
    assert report.regret == pytest.approx(2 * q - 1, abs=1e-12)


def test_independence_regret_where_gap_negative():
    report = R.verify_witness(R.WitnessSpec(T.INDEPENDENCE, 6, q=0.9))
    assert report.h_method == LabelVector.zeros(6)
    assert report.regret == 0.0


def test_bound_trend_with_positive_gap():
    # q chosen per m as the largest grid value keeping the gap positive
    def q_of_m(m):
        grid = np.round(np.arange(0.5, 1.0, 0.005), 3)
        return max(q for q in grid if R.independence_delta(q, m) > 0)

    rows = R.bound_trend([20, 50, 100, 200], q_of_m)
    bounds = [b for *_, b in rows]
    assert all(d > 0 for _, _, d, _ in rows)
    assert all(a < b < 1 for a, b in zip(bounds, bounds[1:]))
    assert bounds[-1] > 0.95


def test_csv_row():
    spec = R.WitnessSpec(T.SUBSET01, 3)
    row = R.witness_csv_row(spec, R.verify_witness(spec))
    fields = row.split(",")
    assert len(fields) == len(R.WITNESS_CSV_HEADER.split(","))
    assert fields[:4] == ["3.2", "3", "", ""]
    assert float(fields[4]) == pytest.approx(0.4875)
    assert float(fields[6]) < 1e-9
