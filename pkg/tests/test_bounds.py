import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binrrr.bounds import (
    BoundInputs,
    corollary1_bound,
    golden_section_min,
    optimize_varsigma,
    proposition1_bound,
    theorem1_bound,
    theorem2_bound,
)
from binrrr.exceptions import InvalidInputError

# 50-digit values from scripts/bound_oracle.py (theorem-1 values come from the
# unsimplified form with the temperature factor and explicit prior scale)
BASE = BoundInputs(n=100, p=12, q=8, r_star=2, normX=math.sqrt(1200), normMB=5.0)
FROZEN = [
    (theorem1_bound, {}, 3.72956892129361846),
    (theorem1_bound, {"C": 2.0, "R_bar": 0.05}, 6.0743198764542930563),
    (proposition1_bound, {}, 3.2335543843841352905),
    (proposition1_bound, {"R_bar": 0.05}, 3.3335543843841352905),
    (theorem2_bound, {"m": 800}, 4.1584186069598195321),
    (theorem2_bound, {"m": 560}, 5.8355116444777660658),
]


@pytest.mark.parametrize("fn, changes, expected", FROZEN)
def test_frozen_values(fn, changes, expected):
    assert fn(BASE.with_(**changes)) == pytest.approx(expected, rel=1e-12)


def test_corollary_is_theorem_with_unit_margin():
    b = BASE.with_(C=3.0, R_bar=0.2)
    assert corollary1_bound(b) == theorem1_bound(b.with_(C=1.0, R_bar=0.0))


def test_theorem2_full_observation_against_theorem1():
    # at m = nq the two agree except for the log argument, which carries an
    # extra sqrt(q) in the missing-data statement
    b = BASE.with_(m=800)
    assert theorem2_bound(BASE) == theorem2_bound(b)
    k = 3 * 5 * (8 + 12 + 2) / (2 * 800)
    tau = math.sqrt(20 / (2 * 64 * 12 * 100 * 1200))
    arg1 = 5.0 / (tau * 2)
    arg2 = 8 * math.sqrt(1200) * 5.0 * math.sqrt(800 * 12) / math.sqrt(20 * 2)
    assert arg2 == pytest.approx(math.sqrt(8) * arg1, rel=1e-12)
    diff = k * 2 * (math.log1p(arg2) - math.log1p(arg1))
    assert theorem2_bound(b) - theorem1_bound(BASE) == pytest.approx(diff, rel=1e-10)


def test_rank_zero_is_finite():
    b = BASE.with_(r_star=0, normMB=0.0)
    for fn in (theorem1_bound, corollary1_bound, proposition1_bound, theorem2_bound):
        assert math.isfinite(fn(b))
    assert theorem1_bound(b) < theorem1_bound(BASE)


def test_monotone_in_inputs():
    for fn in (theorem1_bound, proposition1_bound, theorem2_bound):
        vals = [fn(BASE.with_(r_star=r)) for r in range(0, 9)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        vals = [fn(BASE.with_(normMB=x)) for x in (0.1, 1, 10, 100)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        vals = [fn(BASE.with_(epsilon=e)) for e in (0.4, 0.1, 0.01, 0.001)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        vals = [fn(BASE.with_(R_bar=r)) for r in (0.0, 0.1, 0.2)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
    vals = [theorem2_bound(BASE.with_(m=m)) for m in (100, 200, 400, 800)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_rates_in_sample_size():
    # fixed ||X||_F^2 / n keeps the log term on the same footing
    def at(n):
        return BASE.with_(n=n, normX=math.sqrt(12 * n))

    t = [theorem1_bound(at(n)) for n in (10**2, 10**4, 10**6)]
    p = [proposition1_bound(at(n)) for n in (10**2, 10**4, 10**6)]
    # fast rate: roughly 1/n up to a log factor; slow rate: 1/sqrt(n)
    for a, b in zip(t, t[1:]):
        assert 50 < a / b < 100
    for a, b in zip(p, p[1:]):
        assert 6 < a / b < 10


def test_golden_section():
    assert golden_section_min(lambda x: (x - 0.3) ** 2, 0, 1) == pytest.approx(0.3, abs=1e-7)


def test_optimize_varsigma():
    s, v = optimize_varsigma(proposition1_bound, BASE)
    grid = [proposition1_bound(BASE.with_(varsigma=x)) for x in np.linspace(0.01, 0.99, 99)]
    assert v <= min(grid) + 1e-9
    assert 0.01 <= s <= 0.99
    s1, v1 = optimize_varsigma(theorem1_bound, BASE)
    assert v1 <= theorem1_bound(BASE)


def test_invalid_inputs():
    with pytest.raises(InvalidInputError):
        BASE.with_(r_star=9)
    with pytest.raises(InvalidInputError):
        BASE.with_(C=0.5)
    with pytest.raises(InvalidInputError):
        BASE.with_(epsilon=1.0)
    with pytest.raises(InvalidInputError):
        BASE.with_(m=801)


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(1, 10**5),
    p=st.integers(1, 40),
    q=st.integers(1, 40),
    normX=st.floats(0.1, 1e4),
    normMB=st.floats(0, 1e4),
    data=st.data(),
)
def test_bounds_positive(n, p, q, normX, normMB, data):
    r = data.draw(st.integers(0, min(p, q)))
    b = BoundInputs(n=n, p=p, q=q, r_star=r, normX=normX, normMB=normMB)
    for fn in (theorem1_bound, proposition1_bound, theorem2_bound):
        v = fn(b)
        assert math.isfinite(v) and v > 0
