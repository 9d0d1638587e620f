import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from predacc.accuracy import (DEFAULT_LEVELS, dm_nw_test, gw_test, newey_west_lrv,
                              subsample_t_test, textbook_lags)
from predacc.errors import DegenerateStatisticError, DomainError, InsufficientDataError
from predacc.series import LossDiffSeries, sample_autocovariance

elements = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
samples = arrays(float, st.integers(8, 80), elements=elements)


def test_gw_examples():
    r = gw_test(LossDiffSeries([1.0, 1.0, 1.0, 1.0]))
    assert r.statistic == pytest.approx(2.0)
    r = gw_test([1.0, -1.0, 1.0, -1.0])
    assert r.statistic == 0.0 and r.p_value == 1.0
    assert set(r.reject_at) == set(DEFAULT_LEVELS)


def test_gw_degenerate_and_short():
    with pytest.raises(DegenerateStatisticError):
        gw_test(np.zeros(5))
    with pytest.raises(InsufficientDataError):
        gw_test([1.0])


def test_gw_algebraic_relation():
    """J = sqrt(n) mean / sqrt(g0 + mean^2)."""
    x = np.random.default_rng(4).standard_normal(57) + 0.3
    j = gw_test(x).statistic
    alt = math.sqrt(x.size) * x.mean() / math.sqrt(sample_autocovariance(x, 0) + x.mean() ** 2)
    assert j == pytest.approx(alt, rel=1e-12)


@pytest.mark.parametrize("n, L", [(100, 3), (200, 4), (1000, 8), (20000, 20), (8, 2), (1, 1)])
def test_textbook_lags(n, L):
    assert textbook_lags(n) == L


def test_newey_west_matches_brute_force():
    x = np.random.default_rng(8).standard_normal(40)
    L = 3
    xc = x - x.mean()
    brute = sum(xc[t] ** 2 for t in range(40)) / 40
    for j in range(1, L + 1):
        brute += 2 * (1 - j / (L + 1)) * sum(xc[t] * xc[t - j] for t in range(j, 40)) / 40
    assert newey_west_lrv(x, L) == pytest.approx(brute, rel=1e-12)
    with pytest.raises(DomainError):
        newey_west_lrv(x, 40)


def test_dm_examples():
    x = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
    r = dm_nw_test(x, lag_rule=0)
    assert r.statistic == pytest.approx(math.sqrt(8) * 4.5 / math.sqrt(5.25))
    assert r.nw_lags == 0
    assert dm_nw_test(x).nw_lags == 2
    with pytest.raises(DegenerateStatisticError):
        dm_nw_test(np.full(10, 2.0))
    with pytest.raises(DomainError):
        dm_nw_test(x, lag_rule="andrews")


def test_subsample_examples():
    r = subsample_t_test([1.0, 3.0, 2.0, 4.0], K=2)   # block means 2, 3
    assert r.statistic == pytest.approx(math.sqrt(2) * 2.5 / math.sqrt(0.5))
    assert r.df == 1 and r.K == 2 and r.reference == "student_t"
    # uneven split: 7 obs into K = 3 blocks of 3, 2, 2
    r = subsample_t_test(np.array([1.0, 1, 1, 2, 2, 6, 6]), K=3)
    means = np.array([1.0, 2.0, 6.0])
    assert r.statistic == pytest.approx(math.sqrt(3) * means.mean() / means.std(ddof=1))


def test_subsample_errors():
    with pytest.raises(InsufficientDataError):
        subsample_t_test(np.arange(5.0), K=3)
    with pytest.raises(DomainError):
        subsample_t_test(np.arange(10.0), K=1)
    with pytest.raises(DegenerateStatisticError):
        subsample_t_test(np.array([1.0, 3.0, 3.0, 1.0]), K=2)


def test_result_rejects_and_dict():
    r = gw_test(np.ones(9))
    assert r.rejects(0.05)
    d = r.as_dict()
    assert d["test"] == "GW" and d["reference"] == "std_normal"
    with pytest.raises(DomainError):
        r.rejects(1.5)


TESTS = [gw_test, dm_nw_test, lambda x: subsample_t_test(x, K=2), lambda x: subsample_t_test(x, K=4)]


def _try(test, x):
    try:
        return test(x)
    except DegenerateStatisticError:
        return None


@settings(max_examples=150, deadline=None)
@given(samples)
def test_antisymmetry(x):
    for test in TESTS:
        a, b = _try(test, x), _try(test, -x)
        assert (a is None) == (b is None)
        if a is not None:
            assert a.statistic == pytest.approx(-b.statistic, rel=1e-9, abs=1e-12)
            assert a.p_value == pytest.approx(b.p_value, rel=1e-9, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(samples, st.floats(1e-3, 1e3))
def test_scale_invariance(x, scale):
    for test in TESTS:
        a, b = _try(test, x), _try(test, scale * x)
        if a is not None and b is not None:
            assert b.statistic == pytest.approx(a.statistic, rel=1e-8, abs=1e-9)


def test_size_under_iid_normal():
    rng = np.random.default_rng(2024)
    R, n = 4000, 200
    rej = np.zeros(3)
    for _ in range(R):
        x = rng.standard_normal(n)
        rej += [gw_test(x).p_value < 0.05, dm_nw_test(x).p_value < 0.05,
                subsample_t_test(x).p_value < 0.05]
    se = math.sqrt(0.05 * 0.95 / R)
    # DM with estimated lags is mildly oversized in small samples
    assert abs(rej[0] / R - 0.05) < 4 * se
    assert abs(rej[1] / R - 0.05) < 4 * se + 0.01
    assert abs(rej[2] / R - 0.05) < 4 * se
