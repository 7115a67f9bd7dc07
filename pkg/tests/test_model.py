import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from binrrr.exceptions import DimensionError, InvalidInputError
from binrrr.model import (
    Responses,
    hinge_risk,
    hinge_subgradient,
    logistic_gradient,
    logistic_risk,
    predict,
    zero_one_risk,
)

from conftest import central_diff, random_instance, rel_err

ONE = np.ones((1, 1))


@pytest.mark.parametrize(
    "M, Y, expected",
    [
        ([[2.0]], [[1]], 0.0),
        ([[2.0]], [[-1]], 1.0),
        ([[0.5, -1.0]], [[1, 1]], 0.5),
    ],
)
def test_zero_one_examples(M, Y, expected):
    assert zero_one_risk(np.array(M), ONE, np.array(Y)) == expected


def test_zero_score_is_not_an_error():
    assert zero_one_risk(np.zeros((1, 1)), ONE, np.array([[-1]])) == 0.0


@pytest.mark.parametrize(
    "M, Y, expected",
    [
        ([[2.0]], [[1]], 0.0),
        ([[0.5, -1.0]], [[1, 1]], 1.25),
    ],
)
def test_hinge_examples(M, Y, expected):
    assert hinge_risk(np.array(M), ONE, np.array(Y)) == expected


def test_hinge_at_zero_matrix(rng):
    X = rng.standard_normal((7, 3))
    Y = np.where(rng.random((7, 4)) < 0.5, 1, -1)
    assert hinge_risk(np.zeros((3, 4)), X, Y) == 1.0


def test_hinge_subgradient_scalars():
    assert hinge_subgradient(np.array([[2.0]]), ONE, ONE).tolist() == [[0.0]]
    assert hinge_subgradient(np.array([[0.0]]), ONE, ONE).tolist() == [[-1.0]]
    # exactly on the kink: strict active set
    assert hinge_subgradient(np.array([[1.0]]), ONE, ONE).tolist() == [[0.0]]


def _off_kink_instance(rng, missing=0.0):
    while True:
        M, X, Y = random_instance(rng, 4, 3, 2, missing)
        margins = Y.signed() * (X @ M)
        if np.all(np.abs(margins[Y.mask] - 1.0) > 1e-3):
            return M, X, Y


@pytest.mark.parametrize("missing", [0.0, 0.3])
def test_hinge_subgradient_matches_finite_differences(rng, missing):
    for _ in range(5):
        M, X, Y = _off_kink_instance(rng, missing)
        fd = central_diff(lambda A: hinge_risk(A, X, Y), M, eps=1e-6)
        assert rel_err(hinge_subgradient(M, X, Y), fd) <= 1e-6


def test_logistic_examples():
    assert logistic_risk(np.zeros((1, 1)), ONE, ONE) == pytest.approx(math.log(2), abs=1e-12)
    tiny = logistic_risk(np.array([[100.0]]), ONE, ONE)
    assert math.isfinite(tiny)
    assert tiny == pytest.approx(math.exp(-100), rel=1e-12)
    assert logistic_risk(np.array([[1.0]]), ONE, -ONE) == pytest.approx(math.log1p(math.e), rel=1e-12)
    assert logistic_risk(np.array([[-1000.0]]), ONE, ONE) == pytest.approx(1000.0)


def test_logistic_gradient_examples():
    assert logistic_gradient(np.zeros((1, 1)), ONE, ONE).tolist() == [[-0.5]]
    assert abs(logistic_gradient(np.array([[800.0]]), ONE, ONE)[0, 0]) < 1e-300


@pytest.mark.parametrize("missing", [0.0, 0.3])
def test_logistic_gradient_matches_finite_differences(rng, missing):
    for _ in range(5):
        M, X, Y = random_instance(rng, 4, 3, 2, missing)
        fd = central_diff(lambda A: logistic_risk(A, X, Y), M, eps=1e-4)
        assert rel_err(logistic_gradient(M, X, Y), fd) <= 1e-8


def test_predict_sign_convention():
    X = np.eye(3)
    M = np.array([[3.2], [-0.001], [0.0]])
    assert predict(M, X).ravel().tolist() == [1, -1, 1]


def test_masked_risk_uses_observed_denominator():
    X = np.eye(2)
    M = np.array([[2.0, 0.0], [0.0, -3.0]])
    Y = Responses(np.array([[1, -1], [1, 1]]), np.array([[True, False], [False, True]]))
    # observed margins: 2 and -3
    assert hinge_risk(M, X, Y) == pytest.approx((0 + 4) / 2)
    assert zero_one_risk(M, X, Y) == 0.5


def test_full_mask_matches_plain_formula(rng):
    M, X, _ = random_instance(rng, 9, 4, 3)
    Y = np.where(rng.random((9, 3)) < 0.5, 1, -1)
    margins = Y * (X @ M)
    assert hinge_risk(M, X, Y) == pytest.approx(np.maximum(1 - margins, 0).sum() / 27, rel=1e-12)
    assert logistic_risk(M, X, Y) == pytest.approx(np.log1p(np.exp(-margins)).sum() / 27, rel=1e-12)


def test_errors():
    with pytest.raises(DimensionError):
        hinge_risk(np.zeros((2, 1)), ONE, ONE)
    with pytest.raises(InvalidInputError):
        zero_one_risk(ONE, ONE, Responses(ONE, np.zeros((1, 1), dtype=bool)))
    with pytest.raises(InvalidInputError):
        Responses.full(np.array([[2]]))
    with pytest.raises(DimensionError):
        predict(np.zeros((3, 1)), ONE)


def test_unobserved_entries_are_ignored():
    Y = Responses(np.array([[1, 5]]), np.array([[True, False]]))
    assert Y.values.tolist() == [[1, 0]]
    assert Y.m == 1


@settings(max_examples=60, deadline=None)
@given(
    X=arrays(np.float64, (5, 3), elements=st.floats(-5, 5)),
    M=arrays(np.float64, (3, 2), elements=st.floats(-5, 5)),
    signs=arrays(np.bool_, (5, 2)),
    mask=arrays(np.bool_, (5, 2)),
    perm_seed=st.integers(0, 2**32 - 1),
    scale=st.floats(1e-3, 1e3),
)
def test_risk_properties(X, M, signs, mask, perm_seed, scale):
    mask = mask.copy()
    mask[0, 0] = True
    Y = Responses(np.where(signs, 1, -1), mask)
    assert zero_one_risk(M, X, Y) <= hinge_risk(M, X, Y)
    perm = np.random.default_rng(perm_seed).permutation(5)
    Yp = Responses(Y.values[perm], Y.mask[perm])
    assert hinge_risk(M, X[perm], Yp) == pytest.approx(hinge_risk(M, X, Y), rel=1e-12, abs=1e-12)
    assert logistic_risk(M, X[perm], Yp) == pytest.approx(logistic_risk(M, X, Y), rel=1e-12, abs=1e-12)
    assert np.array_equal(predict(scale * M, X), predict(M, X)) or np.any(np.abs(X @ M) < 1e-9)
