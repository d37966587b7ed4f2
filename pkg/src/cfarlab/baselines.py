"""Classical sliding-window detectors and the global-truncation variant.

The sliding detectors differ only in how the reference samples of the 2D
training ring are mapped to a local noise estimate: cell averaging, the
greatest or smallest of the two half-window means, an order statistic, or
a trimmed mean.  Their scale factors are calibrated by Monte Carlo because
the accumulated background is Gamma rather than exponential; the classical
exponential closed form survives as a single-channel cross-check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .clean import RefinedPeak
from .detector import Detection, DetectionSet, alpha_from_pfa
from .errors import ConfigurationError, NumericalError
from .noise import TruncConfig, estimate_noise

SLIDING_KINDS = ("ca", "cago", "caso", "os", "tm")

# Deterministic stream tag for calibration noise maps.
_CAL_STREAM = 0x63616C69
_CAL_MAP_SHAPE = (256, 128)

_scale_cache = {}


@dataclass(frozen=True)
class WindowConfig:
    """2D reference window geometry and per-kind selectors.

    ``train_fast`` and ``train_slow`` are half-window training extents
    beyond the guard band; ``guard`` is the guard half-width on every side
    of the cell under test.  ``os_rank`` is the 1-based order statistic
    (``None`` selects the median rank ``ceil(count/2)``); ``tm_trim`` is
    the number of cells discarded at each extreme of the sorted ring.
    """

    train_fast: int = 10
    train_slow: int = 6
    guard: int = 5
    os_rank: int = None
    tm_trim: int = 3

    def __post_init__(self):
        if min(self.train_fast, self.train_slow, self.guard) < 0:
            raise ConfigurationError("window extents must be nonnegative")
        if self.train_fast == 0 and self.train_slow == 0:
            raise ConfigurationError("window must contain at least one training cell")
        if self.tm_trim < 0:
            raise ConfigurationError("tm_trim must be nonnegative")

    @property
    def half_fast(self):
        return self.guard + self.train_fast

    @property
    def half_slow(self):
        return self.guard + self.train_slow


def _window_masks(wcfg):
    """Training mask plus the leading/lagging halves of the window.

    The two halves partition the training ring exactly (fast offset sign,
    with the zero-offset column split by slow offset sign), so the plain
    cell average equals the mean of the two half means and the ordering
    smallest-of <= average <= greatest-of holds identically.
    """
    di = np.arange(-wcfg.half_fast, wcfg.half_fast + 1)[:, None]
    dj = np.arange(-wcfg.half_slow, wcfg.half_slow + 1)[None, :]
    guard = (np.abs(di) <= wcfg.guard) & (np.abs(dj) <= wcfg.guard)
    train = ~guard
    lead = train & ((di < 0) | ((di == 0) & (dj < 0)))
    lag = train & ((di > 0) | ((di == 0) & (dj > 0)))
    return train, lead, lag


_gather_cache = {}


def _gather_index(shape, wcfg):
    """Flat training-cell indices of every cell, cached per map shape and window."""
    key = (shape, wcfg.train_fast, wcfg.train_slow, wcfg.guard)
    if key in _gather_cache:
        return _gather_cache[key]
    n, m = shape
    train, _, _ = _window_masks(wcfg)
    di, dj = np.nonzero(train)
    di = di - wcfg.half_fast
    dj = dj - wcfg.half_slow
    rows = (np.arange(n)[:, None] + di[None, :]) % n
    cols = (np.arange(m)[:, None] + dj[None, :]) % m
    flat = (rows[:, None, :] * m + cols[None, :, :]).astype(np.intp)
    _gather_cache[key] = flat
    return flat


def _training_samples(nca_map, wcfg):
    """Gather the training-ring samples of every cell, circularly wrapped.

    Returns ``(n, m, count)`` with one row of reference samples per cell,
    in a fixed window-scan order shared by all kinds.
    """
    n, m = nca_map.shape
    if 2 * wcfg.half_fast + 1 > n or 2 * wcfg.half_slow + 1 > m:
        raise ConfigurationError("reference window larger than the map")
    return nca_map.ravel()[_gather_index((n, m), wcfg)]


def _resolved_rank(wcfg, count):
    rank = wcfg.os_rank if wcfg.os_rank is not None else math.ceil(count / 2)
    if not 1 <= rank <= count:
        raise ConfigurationError(f"os_rank {rank} outside 1..{count}")
    return rank


def reference_statistic(nca_map, kind, wcfg):
    """Per-cell noise statistic ``g`` of the requested detector kind.

    The detection threshold of every sliding detector is ``scale * g``.
    """
    if kind not in SLIDING_KINDS:
        raise ConfigurationError(f"unknown sliding detector kind {kind!r}")
    samples = _training_samples(nca_map, wcfg)
    count = samples.shape[2]

    if kind == "ca" or (kind == "tm" and wcfg.tm_trim == 0):
        return samples.mean(axis=2)
    if kind in ("cago", "caso"):
        train, lead, lag = _window_masks(wcfg)
        lead_cols = lead[train]
        lag_cols = lag[train]
        lead_mean = samples @ np.where(lead_cols, 1.0 / lead_cols.sum(), 0.0)
        lag_mean = samples @ np.where(lag_cols, 1.0 / lag_cols.sum(), 0.0)
        op = np.maximum if kind == "cago" else np.minimum
        return op(lead_mean, lag_mean)
    if kind == "os":
        rank = _resolved_rank(wcfg, count)
        return np.sort(samples, axis=2)[:, :, rank - 1]
    # tm with a positive trim: drop the extremes, average the rest
    trim = wcfg.tm_trim
    if 2 * trim >= count:
        raise ConfigurationError("tm_trim discards the whole window")
    ordered = np.sort(samples, axis=2)
    return ordered[:, :, trim : count - trim].mean(axis=2)


def _bin_detections(nca_map, mask, params=None, iteration=0):
    """Build an integer-bin DetectionSet from a boolean map, strongest first."""
    rr, vv = np.nonzero(mask)
    powers = nca_map[rr, vv]
    order = np.lexsort((vv, rr, -powers))
    dets = []
    for k in order:
        r_ind, v_ind = int(rr[k]), int(vv[k])
        if params is not None:
            m = params.m
            v_signed = (v_ind + m / 2.0) % m - m / 2.0
            range_m = r_ind * params.range_per_bin
            velocity = v_signed * params.velocity_per_bin
        else:
            range_m = velocity = float("nan")
        peak = RefinedPeak(
            r_ind=r_ind,
            v_ind=v_ind,
            delta_r=0.0,
            delta_v=0.0,
            r_hat=float(r_ind),
            v_hat=float(v_ind),
            range_m=range_m,
            velocity_mps=velocity,
        )
        dets.append(Detection(peak=peak, power=float(powers[k]), iteration=iteration))
    return dets


def sliding_cfar(nca_map, kind, wcfg, p_fa, scale, params=None):
    """Threshold every cell against a sliding-window noise estimate.

    Declares a detection wherever ``cell > scale * g`` with ``g`` the
    per-cell reference statistic of ``kind``.  Integer-bin detections only;
    no refinement and no footprint subtraction.  ``scale`` should come from
    :func:`calibrate_scale` for the requested false-alarm probability
    (``p_fa`` is carried along for reporting).

    Parameters
    ----------
    nca_map : ndarray
        Accumulated power map.
    kind : str
        One of ``ca``, ``cago``, ``caso``, ``os``, ``tm``.
    wcfg : WindowConfig
        Reference window geometry.
    p_fa : float
        Design false-alarm probability (informational).
    scale : float
        Calibrated threshold multiplier, positive.
    params : RadarParams, optional
        Enables physical range/velocity fields on the detections.
    """
    if scale <= 0:
        raise ConfigurationError("scale must be positive")
    stat = reference_statistic(nca_map, kind, wcfg)
    mask = nca_map > scale * stat
    return DetectionSet(detections=_bin_detections(nca_map, mask, params), noise_model=None)


def calibrate_scale(kind, wcfg, shape, p_fa, seed=0):
    """Monte Carlo threshold multiplier for a sliding detector kind.

    Draws pure Gamma(shape) noise maps, forms the per-cell ratio of the
    cell to its reference statistic, and bisects the scale until the
    empirical exceedance matches ``p_fa`` within 10% relative.  The pool is
    sized so that the binomial error at ``p_fa`` stays well inside that
    tolerance.  Deterministic per seed; results are cached on
    ``(kind, window, shape, p_fa, seed)``.
    """
    key = (
        kind,
        wcfg.train_fast,
        wcfg.train_slow,
        wcfg.guard,
        wcfg.os_rank,
        wcfg.tm_trim,
        shape,
        p_fa,
        seed,
    )
    if key in _scale_cache:
        return _scale_cache[key]

    cells_per_map = _CAL_MAP_SHAPE[0] * _CAL_MAP_SHAPE[1]
    n_maps = max(4, math.ceil(400.0 / (p_fa * cells_per_map)))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), _CAL_STREAM]))
    ratios = []
    for _ in range(n_maps):
        noise = rng.gamma(shape, 1.0, size=_CAL_MAP_SHAPE)
        stat = reference_statistic(noise, kind, wcfg)
        ratios.append((noise / stat).ravel())
    pool = np.concatenate(ratios)

    lo, hi = 0.0, float(pool.max()) + 1.0
    scale = None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        exceedance = float(np.mean(pool > mid))
        if abs(exceedance - p_fa) <= 0.1 * p_fa:
            scale = mid
            break
        if exceedance > p_fa:
            lo = mid
        else:
            hi = mid
    if scale is None:
        raise NumericalError(
            f"scale calibration for {kind} did not reach 10% of p_fa={p_fa:g}"
        )
    _scale_cache[key] = scale
    return scale


def ts_cfar(nca_map, shape, p_fa, trunc=TruncConfig(), params=None):
    """Global-truncation detector: one fixed threshold from truncated statistics.

    Estimates the Gamma noise mean, then flags every cell above
    ``mu_z * (1 + alpha)`` with ``alpha`` calibrated from ``p_fa``.  This is
    the iterative detector with refinement, footprint subtraction and
    sidelobe history all disabled, and serves as the truncation-only
    ablation baseline.
    """
    model = estimate_noise(nca_map, shape, trunc)
    threshold = model.mu_z * (1.0 + alpha_from_pfa(shape, p_fa))
    mask = nca_map > threshold
    return DetectionSet(detections=_bin_detections(nca_map, mask, params), noise_model=model)
