"""Iterative detector: threshold calibration, main loop behavior, invariances."""

import math

import numpy as np
import pytest

from conftest import frame_with_targets, gamma_map, small_params, target_at_bins

from cfarlab import (
    DegenerateInputError,
    DetectorConfig,
    RdStack,
    Scenario,
    adaptive_threshold,
    alpha_from_pfa,
    detect,
    estimate_noise,
    rd_transform,
    synthesize_cube,
    table1_params,
)


def test_alpha_exponential_closed_form():
    assert alpha_from_pfa(1, 1e-3) == pytest.approx(math.log(1000.0) - 1.0, abs=1e-12)


def test_alpha_approaches_minus_one_for_certain_alarm():
    # the quantile of shape 4 shrinks like the fourth root of the tail mass
    assert alpha_from_pfa(4, 1 - 1e-6) > alpha_from_pfa(4, 1 - 1e-9) > -1.0
    assert alpha_from_pfa(4, 1 - 1e-12) == pytest.approx(-1.0, abs=1e-3)


def test_alpha_monte_carlo_exceedance():
    # noise-only maps thresholded at (1 + alpha) * estimated mean
    shape, p_fa = 4, 1e-3
    alpha = alpha_from_pfa(shape, p_fa)
    exceed = 0
    cells = 0
    for trial in range(31):  # > 1e6 cells total
        m = gamma_map(shape, 1.0, (256, 128), seed=300 + trial)
        model = estimate_noise(m, shape)
        exceed += int(np.sum(m - model.mu_z > alpha * model.mu_z))
        cells += m.size
    rate = exceed / cells
    assert cells >= 1_000_000
    assert 0.5 * p_fa <= rate <= 2.0 * p_fa


def test_adaptive_threshold_constant_noise():
    mu = 3.5
    noise = np.full((64, 32), mu)
    side = np.zeros_like(noise)
    t = adaptive_threshold(noise, side, v_ind=10, alpha=2.0, r=2)
    assert t == pytest.approx(2.0 * mu, rel=1e-12)


def test_adaptive_threshold_sidelobe_mass():
    mu, s, r = 1.25, 40.0, 2
    n, m = 64, 32
    noise = np.full((n, m), mu)
    side = np.zeros_like(noise)
    side[17, 9] = s  # inside the column window of v_ind=10, r=2
    t = adaptive_threshold(noise, side, v_ind=10, alpha=3.0, r=r)
    assert t == pytest.approx(3.0 * (mu + s / (n * (2 * r + 1))), rel=1e-12)


def test_adaptive_threshold_literal_divisor():
    mu, r, n, m = 2.0, 2, 256, 32
    noise = np.full((n, m), mu)
    side = np.zeros_like(noise)
    t = adaptive_threshold(noise, side, v_ind=5, alpha=1.0, r=r, mode="eq32_literal")
    assert t == pytest.approx(mu * n * (2 * r + 1) / (n + 2 * r + 1), rel=1e-12)
    assert t == pytest.approx(mu * 1280 / 261, rel=1e-12)


def test_detect_noise_only_count_tracks_pfa():
    p = table1_params()
    counts = []
    for trial in range(100):
        cube = synthesize_cube(Scenario(p, (), noise_var=1.0, seed=4000 + trial))
        result = detect(rd_transform(cube), DetectorConfig(p_fa=1e-3))
        counts.append(len(result.detections))
    mean = float(np.mean(counts))
    assert 16.0 <= mean <= 66.0  # expectation p_fa * n * m = 32.768


def test_detect_single_strong_on_grid_target():
    # on-grid target at 20 dB; small p_fa keeps noise exceedances out
    p = table1_params()
    tgt = target_at_bins(p, 60, 0, angle_rad=0.3)
    hits = 0
    for trial in range(100):
        cube = synthesize_cube(Scenario(p, (tgt,), noise_var=1e-2, seed=5000 + trial))
        result = detect(rd_transform(cube), DetectorConfig(p_fa=1e-7))
        if len(result.detections) == 1:
            d = result.detections[0].peak
            if abs(d.r_ind - 60) <= 1 and min(d.v_ind, p.m - d.v_ind) <= 1:
                hits += 1
    assert hits >= 99


def test_detect_all_zero_stack_raises():
    p = small_params()
    cube = frame_with_targets(p, [])
    with pytest.raises(DegenerateInputError):
        detect(rd_transform(cube))


def test_detect_scale_invariant_decisions():
    p = small_params(n=128, m=64, n_rx=4)
    t1 = target_at_bins(p, 30.3, 12.6, angle_rad=0.2)
    t2 = target_at_bins(p, 50.8, 40.1, angle_rad=-0.3)
    cube = synthesize_cube(Scenario(p, (t1, t2), noise_var=0.05, seed=21))
    stack = rd_transform(cube)
    base = detect(stack, DetectorConfig())
    scaled = detect(RdStack(stack.data * 2.0, p), DetectorConfig())
    bins = lambda ds: [(d.peak.r_ind, d.peak.v_ind) for d in ds.detections]
    assert bins(base) == bins(scaled)


def test_detect_halts_at_k_max():
    p = small_params(n=128, m=64, n_rx=2)
    cube = synthesize_cube(Scenario(p, (), noise_var=1.0, seed=9))
    result = detect(rd_transform(cube), DetectorConfig(p_fa=0.4, k_max=10))
    assert result.terminated_by == "k_max"
    assert len(result.detections) == 10
    iterations = [d.iteration for d in result.detections]
    assert iterations == list(range(10))


def test_detect_powers_nonincreasing_on_separated_targets():
    p = small_params(n=128, m=64, n_rx=3)
    targets = [
        target_at_bins(p, 20.2, 10.4, angle_rad=0.1, amplitude=1.0),
        target_at_bins(p, 50.7, 30.1, angle_rad=-0.2, amplitude=0.7),
        target_at_bins(p, 60.4, 50.8, angle_rad=0.4, amplitude=0.4),
    ]
    cube = frame_with_targets(p, targets, noise_var=0.0, seed=2)
    result = detect(rd_transform(cube), DetectorConfig(k_max=3))
    powers = [d.power for d in result.detections]
    assert len(powers) == 3
    assert all(a >= b for a, b in zip(powers, powers[1:]))


def test_detect_records_noise_model_and_order():
    p = small_params(n=128, m=64, n_rx=2)
    cube = synthesize_cube(
        Scenario(p, (target_at_bins(p, 40, 20, angle_rad=0.1),), noise_var=0.01, seed=3)
    )
    result = detect(rd_transform(cube), DetectorConfig(p_fa=1e-6))
    assert result.noise_model is not None
    assert result.noise_model.shape == p.n_rx
    assert result.terminated_by in ("threshold", "k_max")
    assert result.detections[0].iteration == 0
