"""Separable resampling: nearest, bilinear (triangle), lanczos3.

Photographs are resized with lanczos3; label maps must use nearest so no
new class IDs are invented. Downscaling widens the filter support
(antialiasing); weights are renormalized so constants are preserved.
"""

from __future__ import annotations

import numpy as np

from .buffer import ImageBuffer
from .errors import ImageShapeError

MODES = ("nearest", "bilinear", "lanczos3")


def _triangle(x: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, 1.0 - np.abs(x))

def _lanczos3(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    out = np.sinc(x) * np.sinc(x / 3.0)
    return np.where(ax < 3.0, out, 0.0)

_FILTERS = {"bilinear": (_triangle, 1.0), "lanczos3": (_lanczos3, 3.0)}


def _weight_matrix(n_src: int, n_dst: int, mode: str) -> np.ndarray:
    """Dense (n_dst, n_src) row-stochastic resampling matrix."""
    scale = n_src / n_dst
    centers = (np.arange(n_dst) + 0.5) * scale - 0.5
    if mode == "nearest":
        idx = np.clip(np.rint(centers).astype(np.int64), 0, n_src - 1)
        w = np.zeros((n_dst, n_src))
        w[np.arange(n_dst), idx] = 1.0
        return w
    fn, support = _FILTERS[mode]
    k = max(scale, 1.0)
    r = support * k
    lo = np.floor(centers - r).astype(np.int64)
    width = int(np.ceil(2 * r)) + 2
    cols = lo[:, None] + np.arange(width)[None, :]
    w = fn((cols - centers[:, None]) / k)
    w /= w.sum(axis=1, keepdims=True)
    cols = np.clip(cols, 0, n_src - 1)  # edge clamp
    dense = np.zeros((n_dst, n_src))
    np.add.at(dense, (np.repeat(np.arange(n_dst), width), cols.ravel()), w.ravel())
    return dense


def resize(img: ImageBuffer, w: int, h: int, mode: str) -> ImageBuffer:
    if w < 1 or h < 1:
        raise ImageShapeError(f"zero/negative target dimension {w}x{h}")
    if mode not in MODES:
        raise ValueError(f"unknown resize mode {mode!r}; expected one of {MODES}")
    if mode == "nearest":
        ys = np.clip(np.rint((np.arange(h) + 0.5) * img.height / h - 0.5), 0, img.height - 1).astype(np.int64)
        xs = np.clip(np.rint((np.arange(w) + 0.5) * img.width / w - 0.5), 0, img.width - 1).astype(np.int64)
        return ImageBuffer.from_array(img.data[np.ix_(ys, xs)])
    wy = _weight_matrix(img.height, h, mode)
    wx = _weight_matrix(img.width, w, mode)
    out = np.einsum("hy,yxc,wx->hwc", wy, img.data, wx, optimize=True)
    return ImageBuffer.from_array(out)
