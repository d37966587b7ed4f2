"""Peak refinement, tone-footprint reconstruction and sidelobe subtraction.

One detected cell is refined to fractional bin accuracy from three adjacent
DFT samples per channel, its two-dimensional Dirichlet footprint is rebuilt
on a small patch, per-channel complex gains are fitted by least squares,
and the accumulated power of the reconstruction is subtracted from the
detection matrix while the off-peak part is banked in a sidelobe history.
"""

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import dirichlet

# Treat the three-sample neighborhood as flat when the interpolation
# denominator is this small relative to the center sample.
_DENOM_EPS = 1e-12


@dataclass(frozen=True)
class RefinedPeak:
    """Integer and fractional bin location of a refined peak.

    ``delta_r`` and ``delta_v`` lie in [-0.5, 0.5]; ``r_hat = r_ind + delta_r``
    and ``v_hat = v_ind + delta_v``.  Physical range and velocity follow from
    the radar resolution, with the Doppler bin unwrapped to the signed alias
    nearest zero.
    """

    r_ind: int
    v_ind: int
    delta_r: float
    delta_v: float
    r_hat: float
    v_hat: float
    range_m: float
    velocity_mps: float


@dataclass(frozen=True)
class TemplatePatch:
    """Unit-gain tone footprint on an odd square patch around a peak."""

    values: np.ndarray
    center: tuple
    half_width: int


def candan_delta(y_minus, y0, y_plus, length):
    """Fractional bin offset of a tone from three adjacent DFT samples.

    Positive result means the true frequency lies toward the ``y_plus``
    neighbor, for spectra computed with the forward (negative-exponent)
    DFT.  The bias-corrected estimator is

    ``tan(pi/length)/(pi/length) * Re((y_minus - y_plus) /
      (2*y0 - y_plus - y_minus))``

    clamped to [-0.5, 0.5].  A degenerate (flat) neighborhood returns 0.
    """
    denom = 2.0 * y0 - y_plus - y_minus
    if abs(denom) <= _DENOM_EPS * abs(y0) or denom == 0:
        return 0.0
    correction = math.tan(math.pi / length) / (math.pi / length)
    delta = correction * ((y_minus - y_plus) / denom).real
    return float(np.clip(delta, -0.5, 0.5))


def refine_peak(stack, r_ind, v_ind):
    """Refine an integer peak of a range-Doppler stack to fractional bins.

    Per channel, the fast-time offset comes from the vertical sample triplet
    and the Doppler offset from the horizontal triplet, both with circular
    wrap at the map edges; the per-channel offsets are averaged.
    """
    data = stack.data
    p = stack.params
    n, m, n_rx = data.shape

    rm, rp = (r_ind - 1) % n, (r_ind + 1) % n
    vm, vp = (v_ind - 1) % m, (v_ind + 1) % m
    deltas_r = [
        candan_delta(data[rm, v_ind, l], data[r_ind, v_ind, l], data[rp, v_ind, l], n)
        for l in range(n_rx)
    ]
    deltas_v = [
        candan_delta(data[r_ind, vm, l], data[r_ind, v_ind, l], data[r_ind, vp, l], m)
        for l in range(n_rx)
    ]
    delta_r = float(np.mean(deltas_r))
    delta_v = float(np.mean(deltas_v))
    r_hat = r_ind + delta_r
    v_hat = v_ind + delta_v
    v_signed = (v_hat + m / 2.0) % m - m / 2.0
    return RefinedPeak(
        r_ind=int(r_ind),
        v_ind=int(v_ind),
        delta_r=delta_r,
        delta_v=delta_v,
        r_hat=r_hat,
        v_hat=v_hat,
        range_m=r_hat * p.range_per_bin,
        velocity_mps=v_signed * p.velocity_per_bin,
    )


def build_template(params, r_hat, v_hat, half_width=2, center=None):
    """Dirichlet footprint of a unit tone at fractional bins (r_hat, v_hat).

    The patch spans ``(2*half_width+1)**2`` cells around ``center`` (the
    nearest integer bins unless given explicitly); entry ``(a, b)`` equals
    ``dirichlet(n, r_hat - (r_c+a)) * dirichlet(m, v_hat - (v_c+b))``.
    """
    if half_width < 1:
        raise ValueError("half_width must be at least 1")
    if center is None:
        center = (int(round(r_hat)), int(round(v_hat)))
    r_c, v_c = center
    offsets = np.arange(-half_width, half_width + 1)
    row = dirichlet(params.n, r_hat - (r_c + offsets))
    col = dirichlet(params.m, v_hat - (v_c + offsets))
    return TemplatePatch(values=np.outer(row, col), center=(int(r_c), int(v_c)), half_width=half_width)


def observed_patch(stack, center, half_width):
    """Extract the complex patch stack around ``center``, wrapped circularly.

    Returns an array of shape ``((2*half_width+1)**2, n_rx)`` whose columns
    are the vectorized per-channel patches, matching the template layout.
    """
    n, m, _ = stack.data.shape
    offsets = np.arange(-half_width, half_width + 1)
    rows = (center[0] + offsets) % n
    cols = (center[1] + offsets) % m
    patch = stack.data[np.ix_(rows, cols)]
    return patch.reshape(-1, patch.shape[2])


def fit_gains(observed, template, eps=None):
    """Least-squares complex channel gains of an observed patch stack.

    Solves ``min_a ||Y - g a||_F^2`` in closed form:
    ``a_l = <g, y_l> / (||g||^2 + eps)``.  ``eps`` defaults to
    ``1e-12 * ||g||^2``; pass 0 for the unregularized solution.
    """
    g = np.asarray(template.values).ravel()
    energy = float(np.vdot(g, g).real)
    if energy == 0.0:
        raise ValueError("cannot fit gains against an all-zero template")
    if eps is None:
        eps = 1e-12 * energy
    y = np.asarray(observed).reshape(g.size, -1)
    return (np.conj(g) @ y) / (energy + eps)


def reconstruct_pcut(template, gains, dims):
    """Accumulated power footprint of the reconstructed target.

    Embeds the per-channel reconstruction ``g * a_l`` at the patch location
    (circular wrap at the edges) in an otherwise zero map and accumulates
    power over channels; only the patch cells are nonzero.
    """
    n, m = dims
    width = 2 * template.half_width + 1
    if width > n or width > m:
        raise ValueError("patch does not fit inside the map")
    offsets = np.arange(-template.half_width, template.half_width + 1)
    rows = (template.center[0] + offsets) % n
    cols = (template.center[1] + offsets) % m
    patch_power = np.abs(template.values) ** 2 * float(np.sum(np.abs(gains) ** 2))
    out = np.zeros(dims, dtype=np.float64)
    out[np.ix_(rows, cols)] = patch_power
    return out


def subtract_and_update(residual, pcut, sidelobe_hist, center):
    """One subtraction step of the iterative extraction loop.

    In place: ``residual <- max(residual - pcut, 0)`` with the detected
    center cell forced to zero (so the same argmax cannot recur), and the
    off-center part of ``pcut`` added to the sidelobe history.  Returns the
    two updated maps.
    """
    np.subtract(residual, pcut, out=residual)
    np.maximum(residual, 0.0, out=residual)
    residual[center] = 0.0
    sidelobe_hist += pcut
    sidelobe_hist[center] -= pcut[center]
    return residual, sidelobe_hist
