"""Locally normalized luminance and generalized-Gaussian moment fits.

MSCN coefficients are the shared front end of both no-reference metrics;
the (A)GGD shape estimates use moment matching against a precomputed
gamma-ratio grid rather than iterative likelihood maximization.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma as _gamma

from ..imgcore import ImageBuffer, gaussian_filter_plane

MSCN_WINDOW = 7
MSCN_SIGMA = 7.0 / 6.0
MSCN_C = 1.0

_ALPHA_GRID = np.arange(0.2, 10.0 + 1e-9, 1e-3)
_RATIO_GRID = _gamma(2.0 / _ALPHA_GRID) ** 2 / (
    _gamma(1.0 / _ALPHA_GRID) * _gamma(3.0 / _ALPHA_GRID)
)


class SampleError(Exception):
    pass


def mscn(img: ImageBuffer) -> ImageBuffer:
    """(I - mu) / (sigma + C) with 7x7 Gaussian local statistics."""
    plane = img.plane()
    mu = gaussian_filter_plane(plane, MSCN_WINDOW, MSCN_SIGMA)
    var = gaussian_filter_plane(plane * plane, MSCN_WINDOW, MSCN_SIGMA) - mu * mu
    sigma = np.sqrt(np.clip(var, 0.0, None))
    return ImageBuffer.from_array((plane - mu) / (sigma + MSCN_C))


def _nearest_alpha(ratio: float) -> float:
    return float(_ALPHA_GRID[np.argmin(np.abs(_RATIO_GRID - ratio))])


def fit_ggd(samples: np.ndarray) -> tuple[float, float]:
    """Symmetric GGD fit; returns (shape alpha, variance sigma^2)."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 100:
        raise SampleError(f"need >= 100 samples, got {x.size}")
    mean_sq = float(np.mean(x * x))
    if mean_sq == 0.0:
        return 2.0, 0.0  # degenerate all-zero input
    ratio = float(np.mean(np.abs(x))) ** 2 / mean_sq
    return _nearest_alpha(ratio), mean_sq


def fit_aggd(samples: np.ndarray) -> tuple[float, float, float, float]:
    """Asymmetric GGD fit; returns (alpha, mean, sigma_left^2, sigma_right^2)."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 100:
        raise SampleError(f"need >= 100 samples, got {x.size}")
    left = x[x < 0]
    right = x[x >= 0]
    var_l = float(np.mean(left * left)) if left.size else 0.0
    var_r = float(np.mean(right * right)) if right.size else 0.0
    mean_sq = float(np.mean(x * x))
    if mean_sq == 0.0 or var_l == 0.0 or var_r == 0.0:
        return 2.0, 0.0, var_l, var_r
    g = np.sqrt(var_l) / np.sqrt(var_r)
    rho = float(np.mean(np.abs(x))) ** 2 / mean_sq
    r_hat = rho * (g**3 + 1.0) * (g + 1.0) / (g**2 + 1.0) ** 2
    alpha = _nearest_alpha(r_hat)
    b_l = np.sqrt(var_l) * np.sqrt(_gamma(1.0 / alpha) / _gamma(3.0 / alpha))
    b_r = np.sqrt(var_r) * np.sqrt(_gamma(1.0 / alpha) / _gamma(3.0 / alpha))
    mean = (b_r - b_l) * _gamma(2.0 / alpha) / _gamma(1.0 / alpha)
    return alpha, float(mean), var_l, var_r
