"""Binary field snapshots.

Layout (little-endian):
    magic   7 bytes "GMHD2D\\0" + 1 zero pad
    version u32 (currently 1)
    n       u32
    reserved u32 (zero)
    time    f64
    omega   n*n f64, row-major real-space samples
    j       n*n f64
File size is exactly 28 + 16 n^2 bytes.
"""

from __future__ import annotations

import struct

import numpy as np

from .dynamics import SimState
from .spectral import ScalarField, SpectralGrid

MAGIC = b"GMHD2D\x00\x00"
VERSION = 1
_HEADER = struct.Struct("<8sIIId")


class CorruptSnapshot(Exception):
    pass


def write_snapshot(path, state: SimState) -> None:
    n = state.grid.n
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, 0, state.t))
        fh.write(np.ascontiguousarray(state.omega_hat.real(), dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.j_hat.real(), dtype="<f8").tobytes())


def read_snapshot(path) -> SimState:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise CorruptSnapshot(f"{path}: truncated header")
    magic, version, n, _reserved, t = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CorruptSnapshot(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CorruptSnapshot(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 16 * n * n
    if len(blob) != expected:
        raise CorruptSnapshot(f"{path}: size {len(blob)} != expected {expected}")
    body = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    omega = body[: n * n].reshape(n, n)
    j = body[n * n:].reshape(n, n)
    grid = SpectralGrid(n)
    return SimState(t=t,
                    omega_hat=ScalarField.from_real(grid, omega),
                    j_hat=ScalarField.from_real(grid, j))
