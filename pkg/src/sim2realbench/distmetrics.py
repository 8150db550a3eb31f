"""Frechet distance between Gaussians fitted to embedding sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .fvec import read_fvec

FID_EPS = 1e-6


class MomentError(Exception):
    pass


@dataclass(frozen=True)
class GaussianMoments:
    mean: np.ndarray        # (D,)
    covariance: np.ndarray  # (D, D), symmetric
    n: int


def fit_moments(features: np.ndarray) -> GaussianMoments:
    """Sample mean and 1/(N-1) covariance, symmetrized."""
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 2:
        raise MomentError(f"feature matrix must be 2-D, got shape {f.shape}")
    n, d = f.shape
    if n < 2:
        raise MomentError(f"need at least 2 samples, got {n}")
    mean = f.mean(axis=0)
    centered = f - mean
    cov = centered.T @ centered / (n - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianMoments(mean=mean, covariance=cov, n=n)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def fid(a: GaussianMoments, b: GaussianMoments) -> float:
    """||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2)."""
    if a.mean.shape != b.mean.shape:
        raise MomentError(f"dimension mismatch: {a.mean.shape[0]} vs {b.mean.shape[0]}")
    if not (np.isfinite(a.mean).all() and np.isfinite(b.mean).all()
            and np.isfinite(a.covariance).all() and np.isfinite(b.covariance).all()):
        raise MomentError("non-finite moments")
    cov_a, cov_b = a.covariance, b.covariance
    d = cov_a.shape[0]
    # stabilize rank-deficient covariances before the inner product
    if np.linalg.matrix_rank(cov_a) < d or np.linalg.matrix_rank(cov_b) < d:
        cov_a = cov_a + FID_EPS * np.eye(d)
        cov_b = cov_b + FID_EPS * np.eye(d)
    sqrt_a = _psd_sqrt(cov_a)
    inner = _psd_sqrt(sqrt_a @ cov_b @ sqrt_a)
    diff = a.mean - b.mean
    value = float(diff @ diff + np.trace(cov_a) + np.trace(cov_b) - 2.0 * np.trace(inner))
    return value


def fid_from_files(path_a, path_b) -> float:
    fa, fb = read_fvec(path_a), read_fvec(path_b)
    if fa.shape[1] != fb.shape[1]:
        raise MomentError(
            f"FVEC dimension mismatch: {path_a} has D={fa.shape[1]}, {path_b} has D={fb.shape[1]}"
        )
    return fid(fit_moments(fa), fit_moments(fb))
