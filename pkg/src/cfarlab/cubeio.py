"""RDC1 cube file format.

Layout (little-endian throughout):

* magic bytes ``RDC1``
* u32 ``n``, u32 ``m``, u32 ``n_rx``
* f64 ``f_c``, ``k_slope``, ``f_s``, ``t_c``, ``t_pri``, ``d``
* ``n*m*n_rx`` interleaved (re, im) float32 pairs in channel-major, then
  chirp-major, then sample order.

Bandwidth and wavelength are reconstructed from the stored fields.
"""

import struct

import numpy as np

from .errors import CubeParseError
from .sim import DataCube, RadarParams

MAGIC = b"RDC1"
_HEADER = struct.Struct("<4sIIIdddddd")


def write_rdc1(cube, path):
    """Serialize a :class:`DataCube` to an RDC1 file."""
    p = cube.params
    header = _HEADER.pack(
        MAGIC, p.n, p.m, p.n_rx, p.f_c, p.k_slope, p.f_s, p.t_c, p.t_pri, p.d
    )
    # (n, m, n_rx) -> channel-major (n_rx, m, n), then interleave re/im.
    samples = np.ascontiguousarray(cube.data.transpose(2, 1, 0)).astype(np.complex64)
    payload = samples.view(np.float32)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_rdc1(path):
    """Parse an RDC1 file back into a :class:`DataCube`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise CubeParseError("truncated header", offset=len(raw))
    magic, n, m, n_rx, f_c, k_slope, f_s, t_c, t_pri, d = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise CubeParseError(f"bad magic {magic!r}", offset=0)

    expected = n * m * n_rx * 2 * 4
    if len(raw) - _HEADER.size != expected:
        raise CubeParseError(
            f"payload holds {len(raw) - _HEADER.size} bytes, expected {expected}",
            offset=_HEADER.size,
        )
    params = RadarParams(
        f_c=f_c,
        k_slope=k_slope,
        b=k_slope * t_c,
        f_s=f_s,
        n=n,
        m=m,
        t_c=t_c,
        t_pri=t_pri,
        n_rx=n_rx,
        d=d,
    )
    flat = np.frombuffer(raw, dtype=np.float32, offset=_HEADER.size)
    samples = flat.view(np.complex64).reshape(n_rx, m, n)
    return DataCube(samples.transpose(2, 1, 0).astype(np.complex128), params)
