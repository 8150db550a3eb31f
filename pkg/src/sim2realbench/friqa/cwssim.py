"""Complex-wavelet structural similarity.

Oriented complex subbands come from a frequency-domain steerable
decomposition (raised-cosine radial bands, one-sided cosine angular
masks), kept at full resolution; similarity is pooled over 7x7 sliding
windows of the coarsest band across all orientations.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..imgcore import ImageBuffer
from ..imgcore.errors import ImageShapeError
from .psnr_ssim import _check_pair
from .scores import FRScore, Metric

CW_SSIM_K = 0.01 * 255.0
CW_SSIM_WINDOW = 7


def _polar_grid(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    fy = np.fft.fftfreq(h)[:, None] * 2 * np.pi
    fx = np.fft.fftfreq(w)[None, :] * 2 * np.pi
    radius = np.hypot(fy, fx)
    angle = np.arctan2(fy, fx)
    return radius, angle


def _oriented_subbands(plane: np.ndarray, level: int, orientations: int) -> list[np.ndarray]:
    """Complex coefficients of the level-`level` band for each orientation."""
    h, w = plane.shape
    radius, angle = _polar_grid(h, w)
    center = np.pi / 2.0**level
    with np.errstate(divide="ignore"):
        logr = np.log2(np.where(radius > 0, radius / center, 1e-30))
    radial = np.cos(np.pi / 2.0 * np.clip(logr, -1.0, 1.0)) * (np.abs(logr) <= 1.0)
    spectrum = np.fft.fft2(plane)
    bands = []
    for k in range(orientations):
        theta = np.pi * k / orientations
        d = np.mod(angle - theta + np.pi, 2 * np.pi) - np.pi
        angular = np.where(np.abs(d) < np.pi / 2, np.cos(d) ** (orientations - 1), 0.0)
        bands.append(np.fft.ifft2(spectrum * radial * angular))
    # lowpass residual below the band: anchors the score against global
    # sign/level flips that pure bandpass coefficients cannot see
    low = np.where(logr <= -1.0, 1.0,
                   np.where(logr >= 0.0, 0.0, np.cos(np.pi / 2.0 * (logr + 1.0))))
    bands.append(np.fft.ifft2(spectrum * low))
    return bands


def _window_sum(x: np.ndarray) -> np.ndarray:
    return ndimage.uniform_filter(x, size=CW_SSIM_WINDOW, mode="constant") * CW_SSIM_WINDOW**2


def cw_ssim(a: ImageBuffer, b: ImageBuffer, level: int = 4, orientations: int = 8) -> FRScore:
    _check_pair(a, b)
    if min(a.width, a.height) < 2**level * 8:
        raise ImageShapeError(
            f"image too small for level-{level} decomposition (needs min dim >= {2**level * 8})"
        )
    pa, pb = a.plane(), b.plane()
    scores = []
    for ca, cb in zip(
        _oriented_subbands(pa, level, orientations),
        _oriented_subbands(pb, level, orientations),
    ):
        cross = _window_sum((ca * np.conj(cb)).real) + 1j * _window_sum((ca * np.conj(cb)).imag)
        power = _window_sum(np.abs(ca) ** 2) + _window_sum(np.abs(cb) ** 2)
        cmap = (2.0 * np.abs(cross) + CW_SSIM_K) / (power + CW_SSIM_K)
        r = CW_SSIM_WINDOW // 2
        scores.append(float(np.mean(cmap[r:-r, r:-r])))
    return FRScore(Metric.CW_SSIM, float(np.mean(scores)))
