"""Writers for the benchmark's interchange formats.

This package talks to the evaluation harness only through files: FVEC
feature matrices, JSON sidecars, and PNG images. The formats are
implemented here from their documented layouts; nothing is imported from
the harness package.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

FVEC_MAGIC = b"SRFV"
FVEC_VERSION = 1
_FVEC_HEADER = struct.Struct("<4sIII")


class FormatError(Exception):
    pass


def write_fvec(path, matrix: np.ndarray) -> None:
    """N x D float32, little endian: magic, version, count, dim, payload."""
    m = np.ascontiguousarray(matrix, dtype=np.float32)
    if m.ndim != 2:
        raise FormatError(f"FVEC payload must be 2-D, got shape {matrix.shape}")
    with open(path, "wb") as fh:
        fh.write(_FVEC_HEADER.pack(FVEC_MAGIC, FVEC_VERSION, m.shape[0], m.shape[1]))
        fh.write(m.tobytes())


def rle_encode(mask: np.ndarray) -> list[int]:
    """Row-major run lengths, background run first (may be zero)."""
    flat = np.asarray(mask, dtype=bool).ravel()
    runs = []
    current, count = False, 0
    for v in flat:
        if v == current:
            count += 1
        else:
            runs.append(count)
            current, count = v, 1
    runs.append(count)
    return runs


def load_image_rgb(path) -> np.ndarray:
    """(H, W, 3) float32 in [0, 1]."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.float32) / 255.0


def load_label_ids(path) -> np.ndarray:
    """(H, W) integer class-id map from an 8-bit grayscale PNG."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"), dtype=np.int64)
    return arr


def save_image_png(path, rgb01: np.ndarray) -> None:
    arr = np.clip(np.rint(rgb01 * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(path, format="PNG")


def save_trainid_png(path, ids: np.ndarray) -> None:
    ids = np.asarray(ids)
    if ids.min() < 0 or ids.max() > 255:
        raise FormatError("trainId map outside the 8-bit range")
    Image.fromarray(ids.astype(np.uint8)).save(path, format="PNG")


def save_panoptic_png(path, ids: np.ndarray) -> None:
    ids = np.asarray(ids)
    if ids.min() < 0 or ids.max() > 0xFFFF:
        raise FormatError("panoptic id map outside the 16-bit range")
    Image.fromarray(ids.astype(np.uint16)).save(path, format="PNG")
