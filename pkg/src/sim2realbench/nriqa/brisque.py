"""BRISQUE: 36 MSCN naturalness features scored by an RBF support-vector
regressor loaded from a JSON model file (lower score = better quality)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..imgcore import ImageBuffer, downsample2
from ..imgcore.errors import ImageShapeError
from .mscn import fit_aggd, fit_ggd, mscn

FEATURE_DIM = 36


class ModelError(Exception):
    pass


def _pairwise_products(m: np.ndarray) -> list[np.ndarray]:
    return [
        m[:, :-1] * m[:, 1:],        # horizontal
        m[:-1, :] * m[1:, :],        # vertical
        m[:-1, :-1] * m[1:, 1:],     # main diagonal
        m[:-1, 1:] * m[1:, :-1],     # anti diagonal
    ]


def scale_features(mscn_plane: np.ndarray) -> np.ndarray:
    """18 features of one scale: GGD of the MSCN field, AGGD of 4 products."""
    feats = list(fit_ggd(mscn_plane))
    for prod in _pairwise_products(mscn_plane):
        feats.extend(fit_aggd(prod))
    return np.asarray(feats, dtype=np.float64)


def brisque_features(img: ImageBuffer) -> np.ndarray:
    """36-vector: 18 features at native scale, 18 after halving."""
    if min(img.width, img.height) < 32:
        raise ImageShapeError(f"image {img.width}x{img.height} too small for BRISQUE")
    native = scale_features(mscn(img).plane())
    half = scale_features(mscn(downsample2(img)).plane())
    return np.concatenate([native, half])


@dataclass(frozen=True)
class SvrModel:
    gamma: float
    rho: float
    support_vectors: np.ndarray  # (M, 36)
    dual_coeffs: np.ndarray      # (M,)
    feature_min: np.ndarray      # (36,)
    feature_max: np.ndarray      # (36,)
    score_range: tuple[float, float]

    def __post_init__(self):
        if self.gamma <= 0:
            raise ModelError(f"gamma must be positive, got {self.gamma}")
        m, d = self.support_vectors.shape
        if m < 1 or d != FEATURE_DIM:
            raise ModelError(f"support vectors shape {self.support_vectors.shape}")
        if self.dual_coeffs.shape != (m,):
            raise ModelError("dual coefficient count != support vector count")
        if not (self.feature_min < self.feature_max).all():
            raise ModelError("feature_min must be strictly below feature_max")


def load_svr_model(path) -> SvrModel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"{path}: {exc}")
    return SvrModel(
        gamma=float(doc["gamma"]),
        rho=float(doc["rho"]),
        support_vectors=np.asarray(doc["sv"], dtype=np.float64),
        dual_coeffs=np.asarray(doc["coeff"], dtype=np.float64),
        feature_min=np.asarray(doc["fmin"], dtype=np.float64),
        feature_max=np.asarray(doc["fmax"], dtype=np.float64),
        score_range=tuple(doc.get("range", (0.0, 100.0))),
    )


def brisque_score(img: ImageBuffer, model: SvrModel) -> float:
    feats = brisque_features(img)
    scaled = -1.0 + 2.0 * (feats - model.feature_min) / (model.feature_max - model.feature_min)
    dist2 = np.sum((model.support_vectors - scaled) ** 2, axis=1)
    return float(model.dual_coeffs @ np.exp(-model.gamma * dist2) - model.rho)
