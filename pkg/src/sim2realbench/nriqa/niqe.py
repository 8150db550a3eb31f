"""NIQE: naturalness as the Frechet-style distance between multivariate
Gaussians fitted to tile features of a pristine corpus and a test image."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from ..imgcore import ImageBuffer, downsample2, gaussian_filter_plane
from ..imgcore.errors import ImageShapeError
from .brisque import FEATURE_DIM, scale_features
from .mscn import MSCN_SIGMA, MSCN_WINDOW, mscn

DEFAULT_PATCH = 96
DEFAULT_SHARPNESS_QUANTILE = 0.75
PINV_CUTOFF = 1e-10


class NiqeError(Exception):
    pass


@dataclass(frozen=True)
class NiqeModel:
    mean: np.ndarray        # (36,)
    covariance: np.ndarray  # (36, 36)
    patch: int = DEFAULT_PATCH
    sharpness_quantile: float = DEFAULT_SHARPNESS_QUANTILE

    def __post_init__(self):
        if self.mean.shape != (FEATURE_DIM,):
            raise NiqeError(f"model mean shape {self.mean.shape}")
        if self.covariance.shape != (FEATURE_DIM, FEATURE_DIM):
            raise NiqeError(f"model covariance shape {self.covariance.shape}")
        if np.abs(self.covariance - self.covariance.T).max() > 1e-12:
            raise NiqeError("model covariance not symmetric")


def save_niqe_model(model: NiqeModel, path) -> None:
    doc = {
        "mean": model.mean.tolist(),
        "cov": model.covariance.tolist(),
        "patch": model.patch,
        "quantile": model.sharpness_quantile,
    }
    Path(path).write_text(json.dumps(doc))


def load_niqe_model(path) -> NiqeModel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise NiqeError(f"{path}: {exc}")
    return NiqeModel(
        mean=np.asarray(doc["mean"], dtype=np.float64),
        covariance=np.asarray(doc["cov"], dtype=np.float64),
        patch=int(doc.get("patch", DEFAULT_PATCH)),
        sharpness_quantile=float(doc.get("quantile", DEFAULT_SHARPNESS_QUANTILE)),
    )


def _check_size(img: ImageBuffer, patch: int) -> None:
    if img.width < 2 * patch or img.height < 2 * patch:
        raise ImageShapeError(
            f"image {img.width}x{img.height} smaller than 2x the {patch}px patch"
        )


def _tile_features(img: ImageBuffer, patch: int) -> tuple[np.ndarray, np.ndarray]:
    """(tiles, 36) feature matrix and per-tile sharpness for one image."""
    plane = img.plane()
    mu = gaussian_filter_plane(plane, MSCN_WINDOW, MSCN_SIGMA)
    var = gaussian_filter_plane(plane * plane, MSCN_WINDOW, MSCN_SIGMA) - mu * mu
    sigma = np.sqrt(np.clip(var, 0.0, None))
    m1 = mscn(img).plane()
    m2 = mscn(downsample2(img)).plane()
    rows, cols = img.height // patch, img.width // patch
    half = patch // 2
    feats, sharp = [], []
    for i in range(rows):
        for j in range(cols):
            t1 = m1[i * patch : (i + 1) * patch, j * patch : (j + 1) * patch]
            t2 = m2[i * half : (i + 1) * half, j * half : (j + 1) * half]
            feats.append(np.concatenate([scale_features(t1), scale_features(t2)]))
            sharp.append(
                float(sigma[i * patch : (i + 1) * patch, j * patch : (j + 1) * patch].mean())
            )
    return np.asarray(feats), np.asarray(sharp)


def _fit_gaussian(feats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = feats.mean(axis=0)
    centered = feats - mean
    denom = max(feats.shape[0] - 1, 1)
    cov = centered.T @ centered / denom
    cov = (cov + cov.T) / 2.0
    vals, vecs = linalg.eigh(cov)
    if vals.min() < 0.0:
        cov = (vecs * np.clip(vals, 0.0, None)) @ vecs.T
        cov = (cov + cov.T) / 2.0
    return mean, cov


def fit_niqe(
    pristine: list[ImageBuffer],
    patch: int = DEFAULT_PATCH,
    sharpness_quantile: float = DEFAULT_SHARPNESS_QUANTILE,
) -> NiqeModel:
    """Fit the pristine model: sharpness-selected tiles, pooled Gaussian."""
    if len(pristine) < 10:
        raise NiqeError(f"need >= 10 pristine images, got {len(pristine)}")
    for img in pristine:
        _check_size(img, patch)
    selected = []
    for img in pristine:
        feats, sharp = _tile_features(img, patch)
        threshold = np.quantile(sharp, sharpness_quantile)
        keep = feats[sharp >= threshold]
        if keep.size:
            selected.append(keep)
    if not selected:
        raise NiqeError("no tiles survived sharpness selection")
    mean, cov = _fit_gaussian(np.vstack(selected))
    return NiqeModel(mean=mean, covariance=cov, patch=patch,
                     sharpness_quantile=sharpness_quantile)


def niqe_score(img: ImageBuffer, model: NiqeModel) -> float:
    """Distance of the test image's tile Gaussian from the pristine model
    (no sharpness selection at test time)."""
    _check_size(img, model.patch)
    feats, _ = _tile_features(img, model.patch)
    mean2, cov2 = _fit_gaussian(feats)
    pooled = (model.covariance + cov2) / 2.0
    inv = linalg.pinvh(pooled, atol=PINV_CUTOFF)
    diff = model.mean - mean2
    return float(np.sqrt(max(diff @ inv @ diff, 0.0)))
