"""Shared filtering primitives: kernels, convolution, dyadic downsampling.

Border handling is reflect-101 everywhere (the edge sample is not
duplicated). The separable/dense correlation loops dispatch to the
compiled extension when it is available; set SIM2REALBENCH_NO_NATIVE=1
to force the numpy/scipy fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .buffer import ImageBuffer
from .errors import ImageShapeError

if os.environ.get("SIM2REALBENCH_NO_NATIVE"):
    _native = None
else:
    try:
        from . import _native
    except ImportError:
        _native = None

HAVE_NATIVE = _native is not None


@dataclass(frozen=True)
class Kernel2D:
    """Odd-sized square tap matrix."""

    taps: np.ndarray

    def __post_init__(self):
        t = self.taps
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] % 2 == 0:
            raise ValueError(f"kernel must be odd square, got shape {t.shape}")


def gaussian_taps(size: int, sigma: float) -> np.ndarray:
    """1-D sampled Gaussian of odd length, normalized to sum 1."""
    if size % 2 == 0:
        raise ValueError("kernel size must be odd")
    r = size // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    t = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return t / t.sum()


def gaussian_kernel(size: int, sigma: float) -> Kernel2D:
    t = gaussian_taps(size, sigma)
    return Kernel2D(np.outer(t, t))


def _correlate2d_plane(plane: np.ndarray, taps: np.ndarray) -> np.ndarray:
    if _native is not None:
        return _native.correlate2d_reflect(
            np.ascontiguousarray(plane), np.ascontiguousarray(taps)
        )
    # scipy 'mirror' mode is reflect-101
    return ndimage.correlate(plane, taps, mode="mirror")


def _correlate_sep_plane(plane: np.ndarray, taps1d: np.ndarray) -> np.ndarray:
    if _native is not None:
        return _native.correlate_sep_reflect(
            np.ascontiguousarray(plane), np.ascontiguousarray(taps1d)
        )
    tmp = ndimage.correlate1d(plane, taps1d, axis=1, mode="mirror")
    return ndimage.correlate1d(tmp, taps1d, axis=0, mode="mirror")


def convolve2d(img: ImageBuffer, kernel: Kernel2D) -> ImageBuffer:
    """Same-size correlation of a single-channel image (kernels used here
    are symmetric, so correlation == convolution)."""
    plane = img.plane()
    return ImageBuffer.from_array(_correlate2d_plane(plane, kernel.taps))


def gaussian_filter_plane(plane: np.ndarray, size: int, sigma: float) -> np.ndarray:
    """Separable Gaussian smoothing on a raw (H, W) float array."""
    return _correlate_sep_plane(np.asarray(plane, dtype=np.float64), gaussian_taps(size, sigma))


def downsample2(img: ImageBuffer) -> ImageBuffer:
    """Low-pass (Gaussian 5x5, sigma 1.0) then decimate by 2."""
    if img.channels != 1:
        raise ImageShapeError("downsample2 expects a single channel")
    if img.width < 2 or img.height < 2:
        raise ImageShapeError(f"image {img.width}x{img.height} too small to halve")
    smoothed = gaussian_filter_plane(img.plane(), 5, 1.0)
    return ImageBuffer.from_array(
        smoothed[::2, ::2][: img.height // 2, : img.width // 2]
    )
