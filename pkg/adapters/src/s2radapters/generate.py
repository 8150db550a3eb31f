"""Label-conditioned image generation via an external checkpoint.

The checkpoint is TorchScript taking (labels, noise) where labels is a
(1, 1, H, W) float trainId map and noise is (1, 1, H, W) drawn from a
seeded generator, returning a (1, 3, 512, 1024) image in [0, 1]. One
image is written per manifest label map; a failing entry is recorded and
skipped, it does not abort the batch.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch

from .formats import load_label_ids, save_image_png
from .jobs import AdapterError, AdapterJob, load_checkpoint, manifest_entries

OUT_W, OUT_H = 1024, 512


def generate_images(job: AdapterJob) -> Path:
    """Generate one image per label map; returns the emitted manifest path."""
    entries = manifest_entries(job.manifest)
    if not entries:
        raise AdapterError(f"{job.manifest}: empty manifest, nothing to generate")
    model = load_checkpoint(job.model)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    produced, failures = [], []
    with torch.inference_mode():
        for entry in entries:
            entry_id = entry.get("entry_id", "?")
            try:
                labels = load_label_ids(entry["label_path"])
                lab = torch.from_numpy(labels).to(torch.float32)[None, None]
                gen = torch.Generator().manual_seed(
                    (job.seed * 1_000_003 + hash(entry_id)) & 0x7FFFFFFF
                )
                noise = torch.randn(lab.shape, generator=gen)
                img = model(lab, noise)
                if img.shape != (1, 3, OUT_H, OUT_W):
                    raise AdapterError(
                        f"checkpoint {job.model}: expected (1, 3, {OUT_H}, {OUT_W}) "
                        f"image, got {tuple(img.shape)}"
                    )
                path = out_dir / f"{entry_id}.png"
                save_image_png(path, img.squeeze(0).permute(1, 2, 0).numpy())
                produced.append({"entry_id": entry_id, "image_path": str(path),
                                 "label_path": entry["label_path"]})
            except AdapterError:
                raise
            except (OSError, KeyError, RuntimeError) as exc:
                failures.append({"entry_id": entry_id, "error": str(exc)})
    manifest = {
        "role": "custom",
        "taxonomy": "cityscapes-trainid",
        "resolution": [OUT_W, OUT_H],
        "provenance": {
            "generator": "adapter",
            "model": str(job.model),
            "prompt": job.prompt,
            "seed": job.seed,
            "failures": failures,
        },
        "entries": produced,
    }
    out = out_dir / "manifest.json"
    out.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out
