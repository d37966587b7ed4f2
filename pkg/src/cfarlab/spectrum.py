"""Range-Doppler spectra, non-coherent accumulation and the Dirichlet kernel.

All transforms are plain unnormalized forward DFTs over rectangular windows;
the Gamma statistics of the accumulated noise map and the closed-form tone
footprints used for target reconstruction both rely on that convention.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class RdStack:
    """Per-channel complex range-Doppler spectra, shaped (n, m, n_rx)."""

    data: np.ndarray
    params: "RadarParams"  # noqa: F821  (runtime duck-typed; see cfarlab.sim)


def rd_transform(cube):
    """Unnormalized 2D DFT of each channel slice over fast and slow time.

    No window function is applied and the Doppler axis is left unshifted
    (bin 0 is zero Doppler).
    """
    return RdStack(np.fft.fft2(cube.data, axes=(0, 1)), cube.params)


def nca(stack):
    """Non-coherently accumulate channel power: ``sum_l |S'_l[p, q]|**2``.

    Returns the real (n, m) detection matrix.  On pure noise its cells are
    Gamma distributed with shape ``n_rx`` and scale ``n*m*sigma**2``.
    """
    return np.sum(np.abs(stack.data) ** 2, axis=2)


def dirichlet(length, x):
    """Geometric-sum kernel ``sum_{k=0}^{length-1} exp(2j*pi*k*x/length)``.

    Evaluated in closed form.  Integer ``x`` is handled exactly: multiples
    of ``length`` give ``length`` and every other integer gives 0, matching
    the DFT footprint of an on-grid tone without floating-point residue.
    Arguments within 1e-9 of a multiple of ``length`` snap to the limit
    value, where the sine ratio would otherwise divide two vanishing terms.
    """
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)

    out = np.empty(x.shape, dtype=np.complex128)
    is_int = x == np.round(x)
    near_mult = np.abs(x - length * np.round(x / length)) <= 1e-9
    closed = ~(is_int | near_mult)
    if np.any(closed):
        xf = x[closed]
        phase = np.exp(1j * np.pi * xf * (length - 1) / length)
        out[closed] = phase * np.sin(np.pi * xf) / np.sin(np.pi * xf / length)
    out[near_mult] = float(length)
    ints = is_int & ~near_mult
    if np.any(ints):
        xi = np.round(x[ints]).astype(np.int64)
        out[ints] = np.where(xi % length == 0, float(length), 0.0)
    return out[0] if scalar else out
