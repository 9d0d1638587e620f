import math

import numpy as np
import pytest

from predacc.distributions import normal_cdf, student_t_cdf, student_t_quantile, two_sided_p_value
from predacc.errors import DomainError

# frozen from mpmath at 40 digits
T_CDF_GOLDEN = [
    (1.5, 3, 0.88470806737758847386),
    (-2.2, 7, 0.031865507651318396744),
    (0.3, 1, 0.59277357907774234032),
    (4.0, 30, 0.99980907718195812158),
    (-10.0, 2, 0.0049262285116628454234),
]


def test_normal_cdf_golden():
    assert normal_cdf(1.959964) == pytest.approx(0.9750000009035575957, rel=1e-14)
    assert normal_cdf(0.0) == 0.5
    np.testing.assert_allclose(normal_cdf(np.array([-1.0, 1.0])).sum(), 1.0, rtol=1e-15)


@pytest.mark.parametrize("x, df, expected", T_CDF_GOLDEN)
def test_student_t_cdf_golden(x, df, expected):
    assert student_t_cdf(x, df) == pytest.approx(expected, rel=1e-12)


def test_student_t_cauchy_closed_form():
    for x in (-3.0, -0.5, 0.0, 2.0, 50.0):
        assert student_t_cdf(x, 1) == pytest.approx(0.5 + math.atan(x) / math.pi, rel=1e-13)


def test_student_t_quantile_golden():
    assert student_t_quantile(0.975, 1) == pytest.approx(12.706204736174704646, rel=1e-11)
    assert student_t_quantile(0.025, 1) == pytest.approx(-12.706204736174704646, rel=1e-11)
    assert student_t_quantile(0.5, 4) == 0.0


def _bisect(p, df):
    lo, hi = -1e6, 1e6
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if student_t_cdf(mid, df) < p else (lo, mid)
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("p", [0.9, 0.95, 0.99, 0.05])
@pytest.mark.parametrize("df", [1, 2, 5, 29])
def test_student_t_quantile_matches_bisection(p, df):
    q = student_t_quantile(p, df)
    assert q == pytest.approx(_bisect(p, df), rel=1e-10)
    assert student_t_cdf(q, df) == pytest.approx(p, rel=1e-12)


def test_large_df_approaches_normal():
    assert student_t_cdf(1.96, 1e7) == pytest.approx(normal_cdf(1.96), abs=1e-7)


def test_errors():
    with pytest.raises(DomainError):
        student_t_cdf(1.0, 0)
    with pytest.raises(DomainError):
        student_t_quantile(1.0, 3)
    with pytest.raises(DomainError):
        two_sided_p_value(1.0, "chi2")


def test_two_sided_p_value():
    assert two_sided_p_value(1.959963984540054, "std_normal") == pytest.approx(0.05, rel=1e-12)
    assert two_sided_p_value(-12.706204736174704646, "student_t", 1) == pytest.approx(0.05, rel=1e-11)
    assert two_sided_p_value(0.0, "student_t", 3) == 1.0
