"""Shared helpers for the test suite."""

import numpy as np

from cfarlab import RadarParams, Scenario, TargetTruth, synthesize_cube, table1_params


def small_params(n=64, m=32, n_rx=2, f_s=9e6, k_slope=120.023e12):
    """A compact but fully valid radar configuration for cheap tests."""
    t_c = n / f_s
    return RadarParams(
        f_c=77e9,
        k_slope=k_slope,
        b=k_slope * t_c,
        f_s=f_s,
        n=n,
        m=m,
        t_c=t_c,
        t_pri=1.05 * t_c,
        n_rx=n_rx,
        d=0.5 * 299792458.0 / 77e9,
    )


def target_at_bins(params, r_bin, v_bin, angle_rad=0.0, amplitude=1.0):
    """Target whose spectral peak lands exactly at fractional bins (r_bin, v_bin).

    Doppler bins above m/2 map to the negative-velocity alias.  The Doppler
    shift also advances the fast-time phase, so the range is backed off by
    that coupling to place the fast-time peak where asked.
    """
    signed_v_bin = (v_bin + params.m / 2.0) % params.m - params.m / 2.0
    vel = signed_v_bin * params.velocity_per_bin
    f_d = params.doppler_frequency(vel)
    range_m = (r_bin - f_d * params.n / params.f_s) * params.range_per_bin
    return TargetTruth(range_m=range_m, velocity_mps=vel, angle_rad=angle_rad, amplitude=amplitude)


def frame_with_targets(params, targets, noise_var=0.0, seed=0):
    """Synthesized cube for an explicit target list."""
    return synthesize_cube(Scenario(params, tuple(targets), noise_var=noise_var, seed=seed))


def gamma_map(shape_l, theta, dims, seed):
    """Pure Gamma noise map, the exact distribution of an accumulated noise map."""
    rng = np.random.default_rng(seed)
    return rng.gamma(shape_l, theta, size=dims)
