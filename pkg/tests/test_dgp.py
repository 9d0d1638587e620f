import math

import numpy as np
import pytest
from scipy import integrate

from predacc.dgp import (ExpandingNull, InnovationMoments, InnovationSpec, LocationModel,
                         NestedFixedRegressor, NonNested, compute_c_squared_nested,
                         default_regressor_path, draw_innovations, innovation_moments,
                         lognormal_neg_moments, nested_c_squared_terms, simulate)
from predacc.errors import DomainError
from predacc.rng import substream

# frozen from 40-digit mpmath evaluations of the lognormal moment expressions
LOGNORMAL_GOLDEN = {
    0.5: (-1.75018965506972, 8.89844567378478),
    1.0: (-6.18487713863255, 113.936392176312),
    1.5: (-33.4680467973217, 10078.2528465293),
}
C2_FORECAST_POINT = 0.73452613404621311863   # x = sin t + 2, m = 5, n = 20, sigma = 1
C2_VERBATIM = 0.69601209021173526698


@pytest.mark.parametrize("sigma", sorted(LOGNORMAL_GOLDEN))
def test_lognormal_moments_golden(sigma):
    mom = lognormal_neg_moments(sigma)
    k1, k2 = LOGNORMAL_GOLDEN[sigma]
    assert mom.kappa1 == pytest.approx(k1, rel=1e-12)
    assert mom.kappa2 == pytest.approx(k2, rel=1e-12)


@pytest.mark.parametrize("sigma", [0.5, 1.0])
def test_lognormal_moments_by_quadrature(sigma):
    """Integrate the transformed normal density directly."""
    s2 = sigma * sigma
    a = 1.0 / math.sqrt(math.expm1(s2))

    def eps(z):
        return -a * math.expm1(sigma * z - 0.5 * s2)

    phi = lambda z: math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    moms = [integrate.quad(lambda z: eps(z) ** k * phi(z), -40, 40, limit=400)[0] for k in (1, 2, 3, 4)]
    assert moms[0] == pytest.approx(0.0, abs=1e-10)
    assert moms[1] == pytest.approx(1.0, rel=1e-9)
    mom = lognormal_neg_moments(sigma)
    assert mom.kappa1 == pytest.approx(moms[2], rel=1e-8)
    assert mom.kappa2 == pytest.approx(moms[3], rel=1e-8)


def test_innovation_spec_validation():
    with pytest.raises(DomainError):
        InnovationSpec.lognormal(0.0)
    with pytest.raises(DomainError):
        InnovationSpec("student")
    assert innovation_moments(InnovationSpec()) == InnovationMoments(0.0, 3.0)


def test_inadmissible_moments():
    with pytest.raises(DomainError):
        InnovationMoments(0.0, 0.5)
    with pytest.raises(DomainError):
        InnovationMoments(3.0, 5.0)   # kappa2 < kappa1^2 + 1


def test_draw_innovations_deterministic_and_indexed():
    spec = InnovationSpec.lognormal(1.0)
    a = draw_innovations(spec, 50, substream(3, 1, 2))
    b = draw_innovations(spec, 50, substream(3, 1, 2))
    assert a.start_index == 1
    np.testing.assert_array_equal(a.values, b.values)
    with pytest.raises(DomainError):
        draw_innovations(spec, 0, substream(0))


@pytest.mark.parametrize("spec", [InnovationSpec(), InnovationSpec.lognormal(0.5)])
def test_innovation_sample_moments(spec):
    N = 400_000
    e = draw_innovations(spec, N, substream(12, 0)).values
    mom = innovation_moments(spec)
    assert abs(e.mean()) < 4 / math.sqrt(N)
    assert abs(e.var() - 1.0) < 4 * math.sqrt((mom.kappa2 - 1) / N)
    # left skew for the lognormal law
    if spec.kind != "gaussian_unit":
        assert np.mean(e ** 3) < 0


def test_c_squared_golden():
    x = default_regressor_path(26)
    assert compute_c_squared_nested(x, 1.0, 5, 20) == pytest.approx(C2_FORECAST_POINT, rel=1e-12)
    assert compute_c_squared_nested(x, 1.0, 5, 20, "verbatim") == pytest.approx(C2_VERBATIM, rel=1e-12)
    assert compute_c_squared_nested(x, 2.0, 5, 20) == pytest.approx(4 * C2_FORECAST_POINT, rel=1e-12)


def test_c_squared_equalises_expected_loss():
    """E[sum dL] is quadratic in c; at c^2 from the forecast-point convention it is zero.

    Evaluate the expectation exactly from the linear-in-eps error representation."""
    m, n, sig = 5, 20, 1.0
    x = default_regressor_path(m + n + 1)
    c = math.sqrt(compute_c_squared_nested(x, sig, m, n))
    total = 0.0
    for t in range(m + 1, m + n + 1):
        xs = x[:t]
        Z = np.column_stack([np.ones(t), xs])
        q = np.array([1.0, x[t]])
        big_var = sig ** 2 * (1 + q @ np.linalg.solve(Z.T @ Z, q))
        bias = c * (1 - xs.sum() / (xs @ xs) * x[t])
        small_var = sig ** 2 * (1 + x[t] ** 2 / (xs @ xs))
        total += big_var - (bias ** 2 + small_var)
    assert total == pytest.approx(0.0, abs=1e-12)


def test_c_squared_errors():
    with pytest.raises(DomainError):
        compute_c_squared_nested(default_regressor_path(10), 1.0, 5, 20)
    with pytest.raises(DomainError):
        compute_c_squared_nested(default_regressor_path(30), 0.0, 5, 20)
    with pytest.raises(DomainError):
        nested_c_squared_terms(default_regressor_path(30), 5, 20, "other")


def test_simulate_location_model_example():
    dgp = LocationModel(4)
    assert dgp.c == 0.5
    p = simulate(dgp, 12, substream(1, 0))
    np.testing.assert_allclose(p.y.values, 0.5 + p.eps)
    assert p.y.start_index == 1 and p.y.end_index == 12


def test_simulate_other_designs():
    rng = substream(2, 0)
    p = simulate(ExpandingNull(3), 10, rng)
    np.testing.assert_array_equal(p.y.values, p.eps)
    dgp = NestedFixedRegressor(5, 20, beta=0.5)
    p = simulate(dgp, 26, substream(2, 1))
    np.testing.assert_allclose(p.regressors[:, 1], default_regressor_path(26))
    np.testing.assert_allclose(p.y.values, dgp.c + 0.5 * p.regressors[:, 1] + p.eps)
    p = simulate(NonNested(4, 1.0, -2.0), 15, substream(2, 2))
    np.testing.assert_allclose(p.y.values, p.regressors[:, 0] - 2 * p.regressors[:, 1] + p.eps)


def test_simulate_errors():
    with pytest.raises(DomainError):
        simulate(LocationModel(5), 5, substream(0))
    with pytest.raises(DomainError):
        simulate(NestedFixedRegressor(5, 20), 27, substream(0))
    with pytest.raises(DomainError):
        LocationModel(0)
