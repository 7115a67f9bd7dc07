import math

import numpy as np
import pytest

from binrrr.datagen import SETTINGS, SimSetting, gen_design, gen_instance, gen_mask, gen_responses, gen_truth
from binrrr.exceptions import InvalidInputError


def test_design_shape_and_moments():
    X = gen_design(2000, 12, np.random.default_rng(0))
    assert X.shape == (2000, 12)
    assert abs(X.mean()) < 4 / math.sqrt(X.size)
    assert abs(X.var() - 1) < 4 * math.sqrt(2 / X.size)


def test_exact_truth_is_rank_two():
    for seed in range(10):
        M = gen_truth(12, 8, "exact", np.random.default_rng(seed))
        s = np.linalg.svd(M, compute_uv=False)
        assert s[2] < 1e-10 * s[0]
        assert s[1] > 1e-6 * s[0]


def test_approx_truth_is_full_rank_with_small_tail():
    M = gen_truth(12, 8, "approx", np.random.default_rng(3))
    s = np.linalg.svd(M, compute_uv=False)
    assert s[-1] > 1e-3
    assert s[2] < 0.5 * s[1]


def test_noiseless_responses_are_realizable():
    rng = np.random.default_rng(1)
    X = gen_design(100, 12, rng)
    M = gen_truth(12, 8, "exact", rng)
    Y = gen_responses(X, M, "I.1", rng)
    assert Y.is_full
    np.testing.assert_array_equal(Y.values, np.where(X @ M >= 0, 1, -1))


def test_flip_rate():
    rng = np.random.default_rng(2)
    X = gen_design(500, 12, rng)
    M = gen_truth(12, 8, "exact", rng)
    clean = np.where(X @ M >= 0, 1, -1)
    Y = gen_responses(X, M, "I.3", rng)
    rate = np.mean(Y.values != clean)
    assert abs(rate - 0.1) < 3 * math.sqrt(0.09 / clean.size)


def test_logistic_setting_with_zero_truth_is_fair_coin():
    rng = np.random.default_rng(4)
    X = gen_design(1000, 3, rng)
    Y = gen_responses(X, np.zeros((3, 4)), "II.1", rng)
    frac = np.mean(Y.values == 1)
    assert abs(frac - 0.5) < 3 * math.sqrt(0.25 / Y.values.size)


@pytest.mark.parametrize("setting", SETTINGS)
def test_every_setting_gives_signs(setting):
    rng = np.random.default_rng(5)
    X = gen_design(30, 4, rng)
    Y = gen_responses(X, gen_truth(4, 3, "approx", rng), setting, rng)
    assert set(np.unique(Y.values)) <= {-1, 1}


def test_mask_has_exact_count():
    mask = gen_mask(100, 8, 0.3, np.random.default_rng(0))
    assert mask.shape == (100, 8)
    assert mask.sum() == 560
    assert gen_mask(10, 3, 0.0, np.random.default_rng(0)).all()


def test_instance_determinism_and_heldout():
    setting = SimSetting("I.4", n=40, p=5, q=3, missing_fraction=0.25)
    a = gen_instance(setting, np.random.default_rng(9))
    b = gen_instance(setting, np.random.default_rng(9))
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.Y.values, b.Y.values)
    np.testing.assert_array_equal(a.heldout_mask, ~a.Y.mask)
    assert a.heldout_mask.sum() == 30
    np.testing.assert_array_equal(a.Y.values[a.Y.mask], a.Y_full[a.Y.mask])


def test_invalid_settings():
    with pytest.raises(InvalidInputError):
        SimSetting("I.9")
    with pytest.raises(InvalidInputError):
        SimSetting(truth="wild")
    with pytest.raises(InvalidInputError):
        gen_responses(np.ones((2, 2)), np.ones((2, 2)), "III.1", np.random.default_rng())
    with pytest.raises(InvalidInputError):
        gen_mask(4, 4, 1.0, np.random.default_rng())
