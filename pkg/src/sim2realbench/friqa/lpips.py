"""Perceptual distance from externally exported deep features.

Feature extraction happens outside this package (see the adapters
component); here we only score: unit-normalize each spatial channel
vector, take the channel-weighted squared difference, average spatially,
and sum over layers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..fvec import read_fvec
from .scores import FRScore, Metric


class FeatureError(Exception):
    pass


@dataclass(frozen=True)
class LayerFeatures:
    """Per-layer (C, H, W) float arrays for one image."""

    layers: tuple[np.ndarray, ...]
    source_image_id: str = ""

    def shapes(self) -> list[tuple[int, int, int]]:
        return [tuple(l.shape) for l in self.layers]


def load_lpips_weights(path) -> list[np.ndarray]:
    """Weights JSON: {layers: [{channels, weights: [...]}]}; all weights >= 0."""
    doc = json.loads(Path(path).read_text())
    out = []
    for i, layer in enumerate(doc["layers"]):
        w = np.asarray(layer["weights"], dtype=np.float64)
        if w.size != int(layer["channels"]):
            raise FeatureError(f"layer {i}: {w.size} weights for {layer['channels']} channels")
        if (w < 0).any():
            raise FeatureError(f"layer {i}: negative weights")
        out.append(w)
    return out


def load_layer_features(sidecar_path) -> LayerFeatures:
    """Read per-image features: a shapes sidecar JSON plus one FVEC per layer.

    Each FVEC stores H*W rows of C channels for its layer; file names are
    given by the sidecar's per-layer `file` fields, relative to the sidecar.
    """
    sidecar_path = Path(sidecar_path)
    doc = json.loads(sidecar_path.read_text())
    layers = []
    for i, layer in enumerate(doc["layers"]):
        c, h, w = int(layer["channels"]), int(layer["height"]), int(layer["width"])
        mat = read_fvec(sidecar_path.parent / layer["file"])
        if mat.shape != (h * w, c):
            raise FeatureError(
                f"{sidecar_path} layer {i}: FVEC shape {mat.shape} != ({h * w}, {c})"
            )
        layers.append(np.ascontiguousarray(mat.T.reshape(c, h, w), dtype=np.float64))
    return LayerFeatures(layers=tuple(layers), source_image_id=doc.get("image_id", ""))


def _unit_normalize(layer: np.ndarray) -> np.ndarray:
    norm = np.sqrt(np.sum(layer**2, axis=0, keepdims=True))
    return layer / (norm + 1e-10)


def lpips_from_features(
    fa: LayerFeatures, fb: LayerFeatures, weights: list[np.ndarray] | None = None
) -> FRScore:
    if fa.shapes() != fb.shapes():
        raise FeatureError(f"layer shape mismatch: {fa.shapes()} vs {fb.shapes()}")
    if weights is None:
        weights = [np.ones(l.shape[0]) for l in fa.layers]
    if len(weights) != len(fa.layers):
        raise FeatureError(f"{len(weights)} weight vectors for {len(fa.layers)} layers")
    total = 0.0
    for la, lb, w in zip(fa.layers, fb.layers, weights):
        if w.shape != (la.shape[0],):
            raise FeatureError(f"weight length {w.shape} != channels {la.shape[0]}")
        if (w < 0).any():
            raise FeatureError("negative layer weight")
        diff = _unit_normalize(la) - _unit_normalize(lb)
        total += float(np.mean(np.sum(w[:, None, None] * diff**2, axis=0)))
    return FRScore(Metric.LPIPS, total)
