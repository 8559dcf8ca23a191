import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_products
from fmeasure import distributions as D
from fmeasure import oracle
from fmeasure.gfm import delta_from_joint, gfm_maximize
from fmeasure.inference import (
    categorical_maximize,
    count_pmf,
    expected_f_independent,
    fm_expected_f_independent,
    fm_maximize,
    jm_predict,
    lewis_approximation,
    mm_predict,
    rank_labels,
    threshold_candidates,
    threshold_maximize,
)
from fmeasure.metrics import LabelVector, MetricKind

F = MetricKind.FMEASURE
L = LabelVector.parse


def brute_expected_f_independent(p, h):
    total = 0.0
    for y in itertools.product((0, 1), repeat=len(p)):
        prob = np.prod([pi if yi else 1 - pi for pi, yi in zip(p, y)])
        tp = sum(a and b for a, b in zip(y, h))
        denom = sum(y) + sum(h)
        total += prob * (1.0 if denom == 0 else 2 * tp / denom)
    return total


@pytest.mark.parametrize("p,k,expected", [
    ((0.5, 0.5), 2, 7 / 12),
    ((0.9, 0.1), 1, 0.87),
    ((1.0,), 1, 1.0),
])
def test_fm_expected_f_examples(p, k, expected):
    assert fm_expected_f_independent(p, k) == pytest.approx(expected, abs=1e-15)


def test_fm_expected_f_checks_input():
    with pytest.raises(ValueError):
        fm_expected_f_independent([0.1, 0.9], 1)
    with pytest.raises(ValueError):
        fm_expected_f_independent([0.9, 0.1], 3)
    with pytest.raises(ValueError):
        fm_expected_f_independent([0.9, 0.1], 0)


def test_fm_maximize_examples():
    r = fm_maximize([0.5, 0.5])
    assert str(r.h) == "11" and r.expected_f_under_independence == pytest.approx(7 / 12)
    np.testing.assert_allclose(r.per_k, [0.25, 5 / 12, 7 / 12])
    r = fm_maximize([0.9, 0.1])
    assert str(r.h) == "10" and r.expected_f_under_independence == pytest.approx(0.87)
    assert r.per_k[2] == pytest.approx(0.6367, abs=1e-4)


def test_fm_on_dependent_marginals_predicts_all_ones_when_gap_positive():
    # equal marginals 0.2 on six labels: the all-ones vector is best under independence
    assert fm_maximize(np.full(6, 0.2)).h == LabelVector.ones(6)


def test_count_pmf():
    np.testing.assert_allclose(count_pmf([0.5, 0.5]), [0.25, 0.5, 0.25])
    np.testing.assert_allclose(count_pmf([]), [1.0])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=6), st.data())
def test_expected_f_independent_matches_enumeration(p, data):
    h = LabelVector(data.draw(st.integers(0, (1 << len(p)) - 1)), len(p))
    expected = brute_expected_f_independent(p, h.to_array().tolist())
    assert expected_f_independent(p, h) == pytest.approx(expected, abs=1e-12)


def test_independence_agreement_with_oracle_and_gfm():
    for product in random_products(seed=31, count=200, max_m=10):
        fm = fm_maximize(product.p)
        best = oracle.maximize_exhaustive(product, F)
        gfm = gfm_maximize(delta_from_joint(product))
        assert fm.expected_f_under_independence == pytest.approx(best.value, abs=1e-12)
        assert gfm.expected_f == pytest.approx(best.value, abs=1e-12)
        assert oracle.expected_metric(product, fm.h, F) == pytest.approx(best.value, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=10))
def test_fm_output_is_top_k(p):
    r = fm_maximize(p)
    k = r.h.ones_count()
    assert r.h.indices() == sorted(rank_labels(p)[:k].tolist())


def test_rank_labels_ties_lower_index_first():
    assert rank_labels([0.2, 0.5, 0.5, 0.1]).tolist() == [1, 2, 0, 3]


def test_lewis_examples():
    assert lewis_approximation([0.5, 0.5], L("00")) == 0.25
    assert lewis_approximation([0.5, 0.5], L("11")) == pytest.approx(2 / 3)
    assert lewis_approximation([1, 1, 1], L("111")) == 1.0
    with pytest.raises(ValueError):
        lewis_approximation([0.5], L("11"))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8))
def test_lewis_exact_for_empty_prediction(p):
    zero = LabelVector.zeros(len(p))
    assert lewis_approximation(p, zero) == pytest.approx(expected_f_independent(p, zero), abs=1e-15)


def test_categorical_examples():
    assert str(categorical_maximize([0.5, 0.2, 0.2, 0.1])) == "1000"
    assert str(categorical_maximize([0.25] * 4)) == "1111"
    assert str(categorical_maximize([1.0])) == "1"
    with pytest.raises(ValueError):
        categorical_maximize([0.5, 0.2])


def test_categorical_matches_oracle():
    rng = np.random.default_rng(41)
    for _ in range(200):
        m = int(rng.integers(1, 11))
        p = rng.dirichlet(np.full(m, rng.choice([0.3, 1.0, 5.0])))
        joint = D.SparseJoint.from_arrays(m, [1 << (m - 1 - i) for i in range(m)], p)
        h = categorical_maximize(p)
        best = oracle.maximize_exhaustive(joint, F).value
        assert oracle.expected_metric(joint, h, F) == pytest.approx(best, abs=1e-12)


def test_threshold_examples(table_two, twelve_labels):
    r = threshold_maximize(twelve_labels)
    assert str(r.h) == "110000000000" and r.expected_f == pytest.approx(0.36, abs=1e-12)
    assert str(threshold_maximize(table_two).h) == "0000"
    assert str(threshold_maximize(D.SparseJoint.point_mass(L("11"))).h) == "11"


def test_threshold_candidates():
    cands = threshold_candidates([0.5, 0.2, 0.2, 0.1])
    assert [t for t, _ in cands] == [1.0, 0.5, 0.2, 0.1]
    assert [str(h) for _, h in cands] == ["0000", "1000", "1110", "1111"]
    # a certain label never leaves the prediction unless the empty one is added
    cands = threshold_candidates([1.0, 0.3])
    assert cands[0][0] == np.inf and str(cands[0][1]) == "00"


def test_threshold_misses_the_optimum(twelve_labels):
    best = oracle.maximize_exhaustive(twelve_labels, F)
    assert best.best not in [h for _, h in threshold_candidates(twelve_labels.marginals())]
    assert threshold_maximize(twelve_labels).expected_f < best.value


def test_threshold_ties_prefer_larger_theta():
    joint = D.SparseJoint.from_mapping(2, {"00": 0.5, "10": 0.25, "01": 0.25})
    r = threshold_maximize(joint)
    assert str(r.h) == "00" and r.theta == 1.0


def test_mm_jm_examples(table_one):
    sample = D.EmpiricalSample.from_counts(3, {"111": 6, "000": 4})
    assert str(mm_predict(sample)) == "111" and str(jm_predict(sample)) == "111"
    assert str(jm_predict(table_one)) == "1000"
    pair = D.SparseJoint.from_mapping(4, {"0000": 0.9, "1111": 0.1})
    assert str(mm_predict(pair)) == "0000" and str(jm_predict(pair)) == "0000"


def test_lewis_gap_is_bounded():
    rng = np.random.default_rng(51)
    gaps = []
    for _ in range(100):
        p = rng.random(6)
        h = LabelVector(int(rng.integers(1, 64)), 6)
        gaps.append(abs(lewis_approximation(p, h) - expected_f_independent(p, h)))
    assert max(gaps) < 0.5
