"""Feature similarity index from phase congruency and gradient magnitude.

Phase congruency uses a log-Gabor filter bank (4 scales, 4 orientations,
smallest wavelength 6, scale step 2, sigma_onf 0.55) with the usual
median-based noise compensation; gradients use Scharr operators. Inputs
are average-pooled so the shorter side is near 256 before filtering.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..imgcore import ImageBuffer
from ..imgcore.errors import ImageShapeError
from .psnr_ssim import _check_pair
from .scores import FRScore, Metric

N_SCALES = 4
N_ORIENT = 4
MIN_WAVELENGTH = 6.0
MULT = 2.0
SIGMA_ONF = 0.55
D_THETA_ON_SIGMA = 1.2
NOISE_K = 2.0
EPS = 1e-4

T1 = 0.85   # phase-congruency similarity constant
T2 = 160.0  # gradient-magnitude similarity constant
ZERO_PC_GUARD = 1e-8

_SCHARR_X = np.array([[3.0, 0.0, -3.0], [10.0, 0.0, -10.0], [3.0, 0.0, -3.0]]) / 16.0
_SCHARR_Y = _SCHARR_X.T


def _mesh(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    def axis(n):
        if n % 2:
            return np.arange(-(n - 1) / 2, (n - 1) / 2 + 1) / (n - 1)
        return np.arange(-n / 2, n / 2) / n

    x = np.fft.ifftshift(axis(w))[None, :]
    y = np.fft.ifftshift(axis(h))[:, None]
    return x, y


def phase_congruency(plane: np.ndarray) -> np.ndarray:
    """Kovesi-style phase-congruency map of a single-channel image."""
    h, w = plane.shape
    x, y = _mesh(h, w)
    radius = np.hypot(x, y)
    radius[0, 0] = 1.0
    theta = np.arctan2(-y, x)
    sin_t, cos_t = np.sin(theta), np.cos(theta)

    lowpass = 1.0 / (1.0 + (radius / 0.45) ** 30)
    log_gabor = []
    for s in range(N_SCALES):
        f0 = 1.0 / (MIN_WAVELENGTH * MULT**s)
        lg = np.exp(-(np.log(radius / f0) ** 2) / (2.0 * np.log(SIGMA_ONF) ** 2))
        lg *= lowpass
        lg[0, 0] = 0.0
        log_gabor.append(lg)

    theta_sigma = np.pi / N_ORIENT / D_THETA_ON_SIGMA
    spectrum = np.fft.fft2(plane)
    pc_num = np.zeros((h, w))
    pc_den = np.zeros((h, w))

    for o in range(N_ORIENT):
        angl = o * np.pi / N_ORIENT
        ds = sin_t * np.cos(angl) - cos_t * np.sin(angl)
        dc = cos_t * np.cos(angl) + sin_t * np.sin(angl)
        dtheta = np.abs(np.arctan2(ds, dc))
        spread = np.exp(-(dtheta**2) / (2.0 * theta_sigma**2))

        eo = []          # complex responses per scale
        ifft_filters = []
        sum_an = np.zeros((h, w))
        sum_e = np.zeros((h, w))
        sum_o = np.zeros((h, w))
        for s in range(N_SCALES):
            filt = log_gabor[s] * spread
            ifft_filters.append(np.real(np.fft.ifft2(filt)) * np.sqrt(h * w))
            resp = np.fft.ifft2(spectrum * filt)
            eo.append(resp)
            sum_an += np.abs(resp)
            sum_e += resp.real
            sum_o += resp.imag

        x_energy = np.hypot(sum_e, sum_o) + EPS
        mean_e, mean_o = sum_e / x_energy, sum_o / x_energy
        energy = np.zeros((h, w))
        for resp in eo:
            energy += resp.real * mean_e + resp.imag * mean_o
            energy -= np.abs(resp.real * mean_o - resp.imag * mean_e)

        # noise threshold from the median response at the finest scale
        median_e2n = np.median(np.abs(eo[0]) ** 2)
        em_n = np.sum((log_gabor[0] * spread) ** 2)
        noise_power = 0.0 if em_n == 0 else -(median_e2n / np.log(0.5)) / em_n
        est_sum_an2 = np.zeros((h, w))
        for f in ifft_filters:
            est_sum_an2 += f**2
        est_sum_aiaj = np.zeros((h, w))
        for si in range(N_SCALES):
            for sj in range(si + 1, N_SCALES):
                est_sum_aiaj += ifft_filters[si] * ifft_filters[sj]
        noise_energy2 = 2 * noise_power * est_sum_an2.sum() + 4 * noise_power * est_sum_aiaj.sum()
        tau = np.sqrt(max(noise_energy2, 0.0) / 2.0)
        est_noise_energy = tau * np.sqrt(np.pi / 2.0)
        est_noise_sigma = np.sqrt(max(2.0 - np.pi / 2.0, 0.0) * tau**2)
        threshold = max(est_noise_energy + NOISE_K * est_noise_sigma, EPS)

        energy = np.maximum(energy - threshold, 0.0)
        pc_num += energy
        pc_den += sum_an

    return pc_num / (pc_den + EPS)


def _pool(plane: np.ndarray) -> np.ndarray:
    f = max(1, round(min(plane.shape) / 256.0))
    if f == 1:
        return plane
    h, w = (plane.shape[0] // f) * f, (plane.shape[1] // f) * f
    return plane[:h, :w].reshape(h // f, f, w // f, f).mean(axis=(1, 3))


def _gradient_magnitude(plane: np.ndarray) -> np.ndarray:
    gx = ndimage.correlate(plane, _SCHARR_X, mode="mirror")
    gy = ndimage.correlate(plane, _SCHARR_Y, mode="mirror")
    return np.hypot(gx, gy)


def fsim(a: ImageBuffer, b: ImageBuffer) -> FRScore:
    _check_pair(a, b)
    pa, pb = _pool(a.plane()), _pool(b.plane())
    pc_a, pc_b = phase_congruency(pa), phase_congruency(pb)
    if pc_a.max() == 0.0 and pc_b.max() == 0.0:
        # featureless pair (e.g. constants): define as perfect similarity
        return FRScore(Metric.FSIM, 1.0)
    g_a, g_b = _gradient_magnitude(pa), _gradient_magnitude(pb)
    s_pc = (2 * pc_a * pc_b + T1) / (pc_a**2 + pc_b**2 + T1)
    s_g = (2 * g_a * g_b + T2) / (g_a**2 + g_b**2 + T2)
    pc_max = np.maximum(pc_a, pc_b)
    value = float(np.sum(s_pc * s_g * pc_max) / (np.sum(pc_max) + ZERO_PC_GUARD))
    return FRScore(Metric.FSIM, value)
