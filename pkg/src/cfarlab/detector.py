"""Iterative detection loop: estimate noise, extract peaks, clean, repeat.

The detector accumulates channel power, estimates the Gamma noise floor by
truncated statistics, removes the estimated mean from the map, and then
repeatedly takes the global argmax, tests it against an adaptive threshold
that accounts for both the noise floor and the sidelobe history of already
extracted targets, and subtracts the reconstructed footprint of each
accepted peak.
"""

from dataclasses import dataclass, field

import numpy as np

from .clean import build_template, fit_gains, observed_patch, reconstruct_pcut, refine_peak, subtract_and_update
from .errors import ConfigurationError
from .noise import TruncConfig, estimate_noise, invert_gamma_cdf
from .spectrum import nca


@dataclass(frozen=True)
class DetectorConfig:
    """Settings of the iterative detector.

    ``threshold_norm`` selects the divisor of the adaptive threshold window
    sum: ``normalized`` uses the true cell count ``n*(2r+1)`` so the
    noise-only threshold is exactly ``alpha * mu_z``; ``eq32_literal``
    retains the printed divisor ``n + 2r + 1`` as an ablation.
    """

    p_fa: float = 1e-3
    trunc: TruncConfig = field(default_factory=TruncConfig)
    slow_half_window: int = 2
    patch_half_width: int = 2
    k_max: int = 64
    threshold_norm: str = "normalized"

    def __post_init__(self):
        if not 0.0 < self.p_fa < 1.0:
            raise ConfigurationError("p_fa must lie strictly in (0, 1)")
        if self.slow_half_window < 0:
            raise ConfigurationError("slow_half_window must be nonnegative")
        if self.k_max < 1:
            raise ConfigurationError("k_max must be at least 1")
        if self.threshold_norm not in ("normalized", "eq32_literal"):
            raise ConfigurationError(f"unknown threshold mode {self.threshold_norm!r}")


@dataclass(frozen=True)
class Detection:
    """One extracted target: refined peak, its power, and the pass index."""

    peak: "RefinedPeak"  # noqa: F821
    power: float
    iteration: int


@dataclass
class DetectionSet:
    """Detections in extraction order plus the noise model and stop reason."""

    detections: list
    noise_model: object = None
    terminated_by: str = "threshold"


def alpha_from_pfa(shape, p_fa):
    """Threshold multiplier calibrated for mean-subtracted Gamma cells.

    Cells of the mean-subtracted map are ``Z - mu_z`` with
    ``Z ~ Gamma(shape, mu_z/shape)`` under the noise hypothesis; requiring
    ``P(Z - mu_z > alpha * mu_z) = p_fa`` gives
    ``alpha = u_q / shape - 1``.
    """
    return invert_gamma_cdf(shape, p_fa) / shape - 1.0


def adaptive_threshold(noise_map, sidelobe_map, v_ind, alpha, r, mode="normalized"):
    """Detection threshold for a cell in slow-time column ``v_ind``.

    Sums the estimated noise floor plus the sidelobe history over all fast
    bins of the ``2r+1`` slow-time columns around ``v_ind`` (circular wrap)
    and scales by ``alpha`` over the divisor selected by ``mode``.
    """
    n, m = noise_map.shape
    cols = np.arange(v_ind - r, v_ind + r + 1) % m
    total = float(noise_map[:, cols].sum() + sidelobe_map[:, cols].sum())
    divisor = n * (2 * r + 1) if mode == "normalized" else n + 2 * r + 1
    return alpha * total / divisor


def detect(stack, cfg=DetectorConfig()):
    """Run the full iterative detector on a range-Doppler stack.

    Returns a :class:`DetectionSet` in extraction order.  The loop stops as
    soon as the global argmax fails its adaptive threshold
    (``terminated_by='threshold'``) or after ``cfg.k_max`` passes
    (``terminated_by='k_max'``).  Degenerate input (an all-zero stack)
    propagates from the noise estimator.
    """
    p = stack.params
    power_map = nca(stack)
    model = estimate_noise(power_map, p.n_rx, cfg.trunc)

    residual = np.maximum(power_map - model.mu_z, 0.0)
    noise_mat = np.full(residual.shape, model.mu_z)
    sidelobe = np.zeros_like(residual)
    alpha = alpha_from_pfa(p.n_rx, cfg.p_fa)

    detections = []
    terminated = "k_max"
    for iteration in range(cfg.k_max):
        flat = int(np.argmax(residual))
        r_ind, v_ind = np.unravel_index(flat, residual.shape)
        value = float(residual[r_ind, v_ind])
        threshold = adaptive_threshold(
            noise_mat, sidelobe, v_ind, alpha, cfg.slow_half_window, cfg.threshold_norm
        )
        if not value > threshold:
            terminated = "threshold"
            break

        peak = refine_peak(stack, r_ind, v_ind)
        template = build_template(
            p, peak.r_hat, peak.v_hat, cfg.patch_half_width, center=(r_ind, v_ind)
        )
        observed = observed_patch(stack, template.center, cfg.patch_half_width)
        gains = fit_gains(observed, template)
        pcut = reconstruct_pcut(template, gains, residual.shape)
        subtract_and_update(residual, pcut, sidelobe, (r_ind, v_ind))
        detections.append(Detection(peak=peak, power=value, iteration=iteration))

    return DetectionSet(detections=detections, noise_model=model, terminated_by=terminated)
