"""PSNR and (multi-scale) structural similarity on [0, 255] images."""

from __future__ import annotations

import numpy as np

from ..imgcore import ImageBuffer, downsample2, gaussian_filter_plane
from ..imgcore.errors import ImageShapeError
from .scores import FRScore, Metric

PSNR_CAP = 100.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2
MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


def _check_pair(a: ImageBuffer, b: ImageBuffer) -> None:
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels):
        raise ImageShapeError(
            f"image pair mismatch: {a.width}x{a.height}x{a.channels} "
            f"vs {b.width}x{b.height}x{b.channels}"
        )


def psnr(a: ImageBuffer, b: ImageBuffer) -> FRScore:
    """Peak signal-to-noise ratio in dB, capped at 100 for identical inputs."""
    _check_pair(a, b)
    mse = float(np.mean((a.data - b.data) ** 2))
    if mse == 0.0:
        return FRScore(Metric.PSNR, PSNR_CAP)
    value = 10.0 * np.log10(255.0**2 / mse)
    return FRScore(Metric.PSNR, min(float(value), PSNR_CAP))


def _ssim_parts(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel luminance map and contrast-structure map (Gaussian window)."""
    blur = lambda x: gaussian_filter_plane(x, SSIM_WINDOW, SSIM_SIGMA)
    mu_a, mu_b = blur(a), blur(b)
    var_a = blur(a * a) - mu_a**2
    var_b = blur(b * b) - mu_b**2
    cov = blur(a * b) - mu_a * mu_b
    lum = (2 * mu_a * mu_b + SSIM_C1) / (mu_a**2 + mu_b**2 + SSIM_C1)
    cs = (2 * cov + SSIM_C2) / (var_a + var_b + SSIM_C2)
    return lum, cs


def ssim(a: ImageBuffer, b: ImageBuffer) -> FRScore:
    """Single-scale SSIM, 11x11 Gaussian window (sigma 1.5) on luma."""
    _check_pair(a, b)
    if min(a.width, a.height) < SSIM_WINDOW:
        raise ImageShapeError(f"image smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    lum, cs = _ssim_parts(a.plane(), b.plane())
    return FRScore(Metric.SSIM, float(np.mean(lum * cs)))


def ms_ssim(a: ImageBuffer, b: ImageBuffer) -> FRScore:
    """Five-scale SSIM product with the standard exponent vector."""
    _check_pair(a, b)
    n_scales = len(MS_SSIM_WEIGHTS)
    if min(a.width, a.height) < SSIM_WINDOW * 2 ** (n_scales - 1):
        raise ImageShapeError(
            f"image too small for {n_scales}-scale SSIM "
            f"(needs min dim >= {SSIM_WINDOW * 2 ** (n_scales - 1)})"
        )
    value = 1.0
    cur_a, cur_b = a, b
    for level, weight in enumerate(MS_SSIM_WEIGHTS):
        lum, cs = _ssim_parts(cur_a.plane(), cur_b.plane())
        if level == n_scales - 1:
            value *= float(np.mean(lum * cs)) ** weight
        else:
            value *= max(float(np.mean(cs)), 0.0) ** weight
            cur_a, cur_b = downsample2(cur_a), downsample2(cur_b)
    return FRScore(Metric.MS_SSIM, value)
