import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from predacc.dgp import NestedFixedRegressor, simulate
from predacc.errors import DomainError, InsufficientDataError, RankDeficiencyError
from predacc.forecasters import (WindowScheme, deterministic_sequence_forecasts,
                                 expanding_mean_forecasts, expanding_ols_forecasts,
                                 rolling_mean_forecasts, rolling_ols_forecasts)
from predacc.rng import substream
from predacc.series import Series


def test_window_scheme_validation():
    assert WindowScheme("rolling", 3).m == 3
    with pytest.raises(DomainError):
        WindowScheme("rolling", 0)
    with pytest.raises(DomainError):
        WindowScheme("sliding", 3)


def test_rolling_mean_example():
    f = rolling_mean_forecasts(Series([1.0, 2.0, 3.0, 4.0]), 2)
    assert f.start_index == 2
    np.testing.assert_allclose(f.values, [1.5, 2.5])


@pytest.mark.parametrize("c", [0.0, 3.25, -7.0])
def test_rolling_mean_constant(c):
    f = rolling_mean_forecasts(np.full(12, c), 4)
    np.testing.assert_allclose(f.values, c, atol=1e-14)


def test_rolling_mean_insufficient():
    with pytest.raises(InsufficientDataError):
        rolling_mean_forecasts([1.0, 2.0], 2)


def test_expanding_mean_example():
    f = expanding_mean_forecasts(Series([1.0, 2.0, 3.0]), 1)
    assert f.start_index == 1
    np.testing.assert_allclose(f.values, [1.0, 1.5])


def test_expanding_mean_constant_and_errors():
    np.testing.assert_allclose(expanding_mean_forecasts(np.full(9, 2.0), 3).values, 2.0)
    np.testing.assert_array_equal(expanding_mean_forecasts(np.zeros(6), 2).values, 0.0)
    with pytest.raises(InsufficientDataError):
        expanding_mean_forecasts([1.0, 2.0], 2)


def test_deterministic_sequences():
    np.testing.assert_array_equal(deterministic_sequence_forecasts("constant", range(1, 5)).values, 0.0)
    f = deterministic_sequence_forecasts("inverse_sqrt_t", range(2, 5))
    assert f.at(4) == 0.5
    assert f.at(2) == pytest.approx(2 ** -0.5, rel=1e-15)
    with pytest.raises(InsufficientDataError):
        deterministic_sequence_forecasts("constant", range(3, 3))
    with pytest.raises(DomainError):
        deterministic_sequence_forecasts("inverse_sqrt_t", range(0, 3))


def test_rolling_ols_hand_solved_example():
    # pairs (x, y_next) = (1, 1), (2, 3) with intercept: b = (-1, 2); forecast at x = 3 is 5
    X = np.column_stack([np.ones(3), [1.0, 2.0, 3.0]])
    f = rolling_ols_forecasts(Series([1.0, 3.0, 0.0]), X, 2, x_start=0)
    assert f.start_index == 2
    np.testing.assert_allclose(f.values, [5.0])


def test_rolling_ols_noiseless_slope():
    x = np.sin(np.arange(30)) + 0.3 * np.arange(30)
    y = np.concatenate([[0.0], 2 * x[:-1]])          # y[s+1] = 2 x[s]
    f = rolling_ols_forecasts(Series(y), x[:, None], 4)
    origins = np.arange(f.start_index, f.end_index + 1)
    np.testing.assert_allclose(f.values, 2 * x[origins - 1], rtol=1e-12)


def test_rolling_ols_intercept_matches_rolling_mean():
    rng = np.random.default_rng(3)
    y = Series(rng.standard_normal(50) + 4.0)
    for m in (1, 3, 10):
        fm = rolling_mean_forecasts(y, m)
        fo = rolling_ols_forecasts(y, np.ones((50, 1)), m, x_start=0)
        assert fo.start_index == fm.start_index
        np.testing.assert_allclose(fo.values, fm.values, rtol=1e-10)


@settings(max_examples=50)
@given(st.floats(-100, 100), st.integers(2, 8))
def test_shift_equivariance(shift, m):
    rng = np.random.default_rng(11)
    y = rng.standard_normal(40)
    X = np.column_stack([np.ones(40), rng.standard_normal(40)])
    a = rolling_mean_forecasts(y + shift, m).values - rolling_mean_forecasts(y, m).values
    np.testing.assert_allclose(a, shift, atol=1e-9)
    b = (rolling_ols_forecasts(y + shift, X, m).values - rolling_ols_forecasts(y, X, m).values)
    np.testing.assert_allclose(b, shift, atol=1e-8 * max(1.0, abs(shift)))


def test_rolling_ols_rank_deficiency_names_origin():
    x = np.array([1.0, 2.0, 3.0, 3.0, 3.0, 4.0, 5.0, 6.0])
    X = np.column_stack([np.ones(8), x])
    with pytest.raises(RankDeficiencyError) as exc:
        rolling_ols_forecasts(np.arange(8.0), X, 2)
    assert exc.value.origin == 5   # window s = 3, 4 has x = (3, 3)


def test_rolling_ols_window_smaller_than_regressors():
    with pytest.raises(DomainError):
        rolling_ols_forecasts(np.arange(10.0), np.ones((10, 3)), 2)


def test_expanding_ols_matches_lstsq():
    rng = np.random.default_rng(5)
    X = np.column_stack([np.ones(25), rng.standard_normal(25)])
    y = rng.standard_normal(26)   # y[1..26]; X rows 0..24
    f = expanding_ols_forecasts(Series(y), X, 4, x_start=0)
    for t in range(f.start_index, f.end_index + 1):
        b, *_ = np.linalg.lstsq(X[:t], y[:t], rcond=None)
        assert f.at(t) == pytest.approx(X[t] @ b, rel=1e-10, abs=1e-12)


def test_expanding_ols_rank_deficiency():
    X = np.column_stack([np.ones(10), np.r_[np.zeros(4), np.arange(1.0, 7.0)]])
    with pytest.raises(RankDeficiencyError) as exc:
        expanding_ols_forecasts(np.arange(10.0), X, 2)
    assert exc.value.origin == 3


def test_nested_forecast_error_decomposition():
    """Errors of the two expanding regressions equal their closed-form expressions
    in the innovations."""
    m, n = 5, 20
    dgp = NestedFixedRegressor(m, n, sigma_eps=0.7, beta=1.3)
    path = simulate(dgp, m + n + 1, substream(9, 1))
    x, eps, c, sig = np.asarray(dgp.x), path.eps, dgp.c, dgp.sigma_eps
    y = path.y
    big = expanding_ols_forecasts(y, path.regressors, m, x_start=0)
    small = expanding_ols_forecasts(y, path.regressors[:, 1:], m, x_start=0)
    for t in range(m + 1, m + n + 1):
        xs = x[:t]
        e_prefix = sig * eps[:t]         # eps_1 .. eps_t
        e_next = sig * eps[t]            # eps_{t+1}
        small_err = (c * (1 - xs.sum() / (xs @ xs) * x[t])
                     - (xs @ e_prefix) / (xs @ xs) * x[t] + e_next)
        Z = path.regressors[:t]
        q = path.regressors[t]
        big_err = e_next - q @ np.linalg.solve(Z.T @ Z, Z.T @ e_prefix)
        assert y.at(t + 1) - small.at(t) == pytest.approx(small_err, abs=1e-10)
        assert y.at(t + 1) - big.at(t) == pytest.approx(big_err, abs=1e-10)
