"""FVEC container: N x D float32 matrices exchanged with the adapters.

Layout (little endian): magic "SRFV", version u32, count u32, dim u32,
then count*dim float32 values row-major.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SRFV"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


class FvecError(Exception):
    pass


def write_fvec(path, matrix: np.ndarray) -> None:
    m = np.ascontiguousarray(matrix, dtype=np.float32)
    if m.ndim != 2:
        raise FvecError(f"FVEC payload must be 2-D, got shape {matrix.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, m.shape[0], m.shape[1]))
        fh.write(m.tobytes())


def read_fvec(path) -> np.ndarray:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise FvecError(f"{path}: {exc}")
    if len(blob) < _HEADER.size:
        raise FvecError(f"{path}: truncated header")
    magic, version, count, dim = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FvecError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FvecError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + count * dim * 4
    if len(blob) != expected:
        raise FvecError(f"{path}: size {len(blob)} != expected {expected} for {count}x{dim}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    return data.reshape(count, dim).copy()
