"""Segmentation-prediction export.

The checkpoint is TorchScript taking a (1, 3, H, W) image in [0, 1] and
returning (semantic logits (1, 19, H, W), instance index map (1, H, W)
int64, zero where no instance). Per image the adapter writes:

- ``<id>_sem.png``       8-bit trainId map (argmax over the 19 classes)
- ``<id>_panoptic.png``  16-bit map, thing pixels encoded class*1000+index
- ``<id>_panoptic.json`` {"instances": [{class_id, score, mask_rle}]}

The PNG and JSON share a stem so one prediction path serves both the
panoptic and the instance-AP evaluation.

Scores are the mean softmax probability of the winning class over the
segment. Thing classes are trainIds 11-18; everything else is stuff and
keeps its plain class id in the panoptic map.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .formats import load_image_rgb, rle_encode, save_panoptic_png, save_trainid_png
from .jobs import AdapterError, AdapterJob, load_checkpoint, manifest_entries

NUM_CLASSES = 19
THING_CLASSES = frozenset(range(11, 19))


def export_segmentation(job: AdapterJob) -> list[str]:
    """Run the checkpoint over the manifest; returns the exported entry ids."""
    entries = manifest_entries(job.manifest)
    if not entries:
        raise AdapterError(f"{job.manifest}: empty manifest, nothing to segment")
    model = load_checkpoint(job.model)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    done = []
    with torch.inference_mode():
        for entry in entries:
            entry_id = entry.get("entry_id")
            if not entry_id:
                raise AdapterError("manifest entry without entry_id")
            try:
                rgb = load_image_rgb(entry["image_path"])
            except (OSError, KeyError) as exc:
                raise AdapterError(f"entry {entry_id}: {exc}")
            batch = torch.from_numpy(rgb).permute(2, 0, 1).unsqueeze(0)
            logits, inst = model(batch)
            if logits.shape[:2] != (1, NUM_CLASSES) or inst.shape[0] != 1:
                raise AdapterError(
                    f"checkpoint {job.model}: expected (1, {NUM_CLASSES}, H, W) "
                    f"logits and (1, H, W) instances, got {tuple(logits.shape)} "
                    f"and {tuple(inst.shape)}"
                )
            probs = torch.softmax(logits, dim=1).squeeze(0).numpy()
            sem = probs.argmax(axis=0)
            inst_map = inst.squeeze(0).numpy().astype(np.int64)

            panoptic = sem.astype(np.int64).copy()
            instances = []
            for cls in sorted(THING_CLASSES):
                for idx in np.unique(inst_map[(sem == cls) & (inst_map > 0)]):
                    mask = (sem == cls) & (inst_map == idx)
                    panoptic[mask] = cls * 1000 + int(idx) - 1
                    instances.append({
                        "class_id": int(cls),
                        "score": float(probs[cls][mask].mean()),
                        "mask_rle": rle_encode(mask),
                    })
            save_trainid_png(out_dir / f"{entry_id}_sem.png", sem)
            save_panoptic_png(out_dir / f"{entry_id}_panoptic.png", panoptic)
            (out_dir / f"{entry_id}_panoptic.json").write_text(
                json.dumps({"instances": instances}, indent=2) + "\n"
            )
            done.append(entry_id)
    return done
