"""Truncated-statistics noise estimation: closed forms, oracles, robustness."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import gamma_map

from cfarlab import (
    ConfigurationError,
    DegenerateInputError,
    EstimationError,
    TruncConfig,
    estimate_noise,
    invert_gamma_cdf,
    truncated_mean_expected,
    truncation_gain,
)


def test_invert_gamma_cdf_exponential_closed_forms():
    assert invert_gamma_cdf(1, 1e-3) == pytest.approx(math.log(1000.0), abs=1e-12)
    assert invert_gamma_cdf(1, 0.5) == pytest.approx(math.log(2.0), abs=1e-12)


def test_invert_gamma_cdf_pfa_near_one_gives_small_quantile():
    # the shape-4 quantile shrinks like the fourth root of the lower tail mass
    u9 = invert_gamma_cdf(4, 1 - 1e-9)
    u12 = invert_gamma_cdf(4, 1 - 1e-12)
    assert u9 > u12 > 0.0
    assert u12 < 2.5e-3


@given(st.integers(1, 12), st.floats(1e-8, 1 - 1e-6))
@settings(max_examples=60, deadline=None)
def test_invert_gamma_cdf_residual(shape, p_fa):
    from scipy.special import gammainc

    u_q = invert_gamma_cdf(shape, p_fa)
    assert abs(gammainc(shape, u_q) - (1.0 - p_fa)) < 1e-12


def test_truncation_gain_limits_and_closed_forms():
    # as the threshold recedes the truncated mean converges to the full mean
    assert truncation_gain(3, 500.0) == pytest.approx(1.0, abs=1e-12)
    u = math.log(1000.0)
    closed = (1 - (1 + u) * math.exp(-u)) / (1 - math.exp(-u))
    assert truncation_gain(1, u) == pytest.approx(closed, rel=1e-12)
    u2 = math.log(2.0)
    closed2 = (1 - (1 + u2) * math.exp(-u2)) / (1 - math.exp(-u2))
    assert truncation_gain(1, u2) == pytest.approx(closed2, rel=1e-12)
    assert truncation_gain(1, u2) == pytest.approx(0.306853, abs=1e-6)


@given(st.integers(1, 10), st.floats(0.05, 25.0))
@settings(max_examples=60, deadline=None)
def test_truncation_gain_in_unit_interval(shape, u_q):
    g = truncation_gain(shape, u_q)
    assert 0.0 < g < 1.0


def test_truncated_mean_expected_no_truncation_limit():
    assert truncated_mean_expected(3.7, 4, 1e6) == pytest.approx(3.7, rel=1e-12)


def test_truncated_mean_expected_frozen_value():
    # quadrature oracle gives 0.99308533 for (mu_z=1, shape=1, t=ln 1000)
    assert truncated_mean_expected(1.0, 1, math.log(1000.0)) == pytest.approx(
        0.9930853300510689, rel=1e-10
    )


@pytest.mark.parametrize(
    "mu_z,shape,t",
    [(1.0, 1, math.log(1000.0)), (3.0, 4, 2.5), (10.0, 2, 40.0), (0.5, 8, 0.7)],
)
def test_truncated_mean_expected_matches_quadrature(mu_z, shape, t):
    theta = mu_z / shape

    def pdf(x):
        return x ** (shape - 1) * math.exp(-x / theta) / (math.gamma(shape) * theta**shape)

    num = quad(lambda x: x * pdf(x), 0.0, t, limit=200)[0]
    den = quad(pdf, 0.0, t, limit=200)[0]
    assert truncated_mean_expected(mu_z, shape, t) == pytest.approx(num / den, rel=1e-8)


def test_constant_map_fixed_point_single_pass():
    c = 7.25
    cfg = TruncConfig()
    model = estimate_noise(np.full((32, 16), c), 4, cfg)
    g_u = truncation_gain(4, invert_gamma_cdf(4, cfg.p_fa_internal))
    assert model.mu_z == c / g_u
    assert model.iterations == 1
    assert model.converged
    assert model.theta == model.mu_z / 4
    assert model.trunc_threshold == model.u_q * model.mu_z / 4


def test_pure_gamma_accuracy_over_trials():
    hits = 0
    for trial in range(100):
        m = gamma_map(4, 1.0, (256, 128), seed=5000 + trial)
        model = estimate_noise(m, 4)
        if abs(model.mu_z - 4.0) / 4.0 < 0.02:
            hits += 1
    assert hits >= 95


def test_contaminated_map_stays_accurate():
    rng = np.random.default_rng(42)
    for trial in range(20):
        m = gamma_map(4, 1.0, (256, 128), seed=6000 + trial)
        idx = rng.choice(m.size, 20, replace=False)
        m.ravel()[idx] = 1e4 * 4.0
        model = estimate_noise(m, 4)
        assert abs(model.mu_z - 4.0) / 4.0 < 0.05


def test_error_conditions():
    with pytest.raises(DegenerateInputError):
        estimate_noise(np.zeros((20, 20)), 4)
    with pytest.raises(ConfigurationError):
        estimate_noise(np.ones((5, 5)), 4)  # fewer than 100 cells
    # nonzero map whose median is zero drives the threshold to zero
    m = np.zeros(400)
    m[:10] = 1.0
    with pytest.raises(EstimationError):
        estimate_noise(m, 4)


def test_mean_init_supported():
    m = gamma_map(4, 2.0, (64, 64), seed=1)
    model = estimate_noise(m, 4, TruncConfig(init="mean"))
    assert abs(model.mu_z - 8.0) / 8.0 < 0.05


def test_max_iter_cap_reports_not_converged():
    m = gamma_map(4, 1.0, (256, 128), seed=5003)
    full = estimate_noise(m, 4)
    if full.iterations > 1:
        capped = estimate_noise(m, 4, TruncConfig(max_iter=1))
        assert not capped.converged
        assert capped.iterations == 1


def test_scale_equivariance_exact_for_power_of_two():
    m = gamma_map(4, 1.0, (128, 64), seed=9)
    base = estimate_noise(m, 4)
    scaled = estimate_noise(4.0 * m, 4)
    assert scaled.mu_z == 4.0 * base.mu_z
    assert scaled.trunc_threshold == 4.0 * base.trunc_threshold


def test_scale_equivariance_general_factor():
    m = gamma_map(3, 2.0, (128, 64), seed=10)
    base = estimate_noise(m, 3)
    scaled = estimate_noise(3.7 * m, 3)
    assert scaled.mu_z == pytest.approx(3.7 * base.mu_z, rel=1e-12)


def test_rmse_shrinks_with_map_size():
    def rmse(dims, seed0):
        errs = []
        for t in range(100):
            m = gamma_map(4, 1.0, dims, seed=seed0 + t)
            errs.append((estimate_noise(m, 4).mu_z - 4.0) ** 2)
        return math.sqrt(np.mean(errs))

    assert rmse((64, 64), 7000) > rmse((256, 128), 8000)


def test_fixed_point_consistency_at_convergence():
    m = gamma_map(4, 1.0, (256, 128), seed=11)
    model = estimate_noise(m, 4)
    kept = m[m <= model.trunc_threshold]
    predicted = truncated_mean_expected(model.mu_z, 4, model.trunc_threshold)
    se = np.std(kept) / math.sqrt(kept.size)
    assert abs(np.mean(kept) - predicted) <= 3 * se
