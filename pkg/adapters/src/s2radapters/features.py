"""Embedding and layer-feature export.

`extract_fid_features` runs a 2048-D embedding checkpoint over a manifest
and writes one FVEC matrix in manifest order. `extract_lpips_features`
runs a multi-layer feature checkpoint and writes, per image, one FVEC per
layer plus a shapes sidecar JSON, and a weights JSON recording the
backbone identifier with unit layer weights.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .formats import load_image_rgb, write_fvec
from .jobs import AdapterError, AdapterJob, load_checkpoint, manifest_entries

FID_DIM = 2048


def _to_batch(rgb01: np.ndarray) -> torch.Tensor:
    return torch.from_numpy(rgb01).permute(2, 0, 1).unsqueeze(0).contiguous()


def extract_fid_features(job: AdapterJob) -> Path:
    """Embed every manifest image; returns the written FVEC path."""
    entries = manifest_entries(job.manifest)
    if not entries:
        raise AdapterError(f"{job.manifest}: empty manifest, nothing to embed")
    model = load_checkpoint(job.model)
    rows = []
    with torch.inference_mode():
        for entry in entries:
            try:
                batch = _to_batch(load_image_rgb(entry["image_path"]))
            except (OSError, KeyError) as exc:
                raise AdapterError(f"entry {entry.get('entry_id', '?')}: {exc}")
            emb = model(batch)
            if emb.ndim != 2 or emb.shape != (1, FID_DIM):
                raise AdapterError(
                    f"checkpoint {job.model}: expected (1, {FID_DIM}) embedding, "
                    f"got {tuple(emb.shape)}"
                )
            rows.append(emb.squeeze(0).numpy())
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "features.fvec"
    write_fvec(out, np.stack(rows))
    return out


def extract_lpips_features(job: AdapterJob) -> Path:
    """Export per-image layer features; returns the weights JSON path."""
    entries = manifest_entries(job.manifest)
    if not entries:
        raise AdapterError(f"{job.manifest}: empty manifest, nothing to export")
    model = load_checkpoint(job.model)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    channels = None
    with torch.inference_mode():
        for entry in entries:
            entry_id = entry.get("entry_id")
            if not entry_id:
                raise AdapterError("manifest entry without entry_id")
            batch = _to_batch(load_image_rgb(entry["image_path"]))
            layers = model(batch)
            if not isinstance(layers, (tuple, list)) or not layers:
                raise AdapterError(
                    f"checkpoint {job.model}: expected a tuple of layer tensors"
                )
            sidecar = {"image_id": entry_id, "layers": []}
            for i, layer in enumerate(layers):
                if layer.ndim != 4 or layer.shape[0] != 1:
                    raise AdapterError(
                        f"layer {i}: expected (1, C, H, W), got {tuple(layer.shape)}"
                    )
                c, h, w = layer.shape[1], layer.shape[2], layer.shape[3]
                name = f"{entry_id}_layer{i}.fvec"
                mat = layer.squeeze(0).reshape(c, h * w).T.contiguous().numpy()
                write_fvec(out_dir / name, mat)
                sidecar["layers"].append(
                    {"channels": int(c), "height": int(h), "width": int(w), "file": name}
                )
            (out_dir / f"{entry_id}.json").write_text(
                json.dumps(sidecar, indent=2) + "\n"
            )
            this = [int(l.shape[1]) for l in layers]
            if channels is None:
                channels = this
            elif this != channels:
                raise AdapterError(f"layer channel counts changed between images: "
                                   f"{channels} vs {this}")
    weights = {
        "backbone": Path(job.model).name,
        "layers": [{"channels": c, "weights": [1.0] * c} for c in channels],
    }
    weights_path = out_dir / "weights.json"
    weights_path.write_text(json.dumps(weights, indent=2) + "\n")
    return weights_path
