"""Normalize a manifest's files to the harmonized resolution and taxonomy.

Photographs are resampled with lanczos3, label maps with nearest; label
maps in a simulator taxonomy are converted to Cityscapes trainIds via the
configured mapping. Writing is idempotent: already-normalized inputs
produce byte-identical outputs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..imgcore import ImageBuffer, load_png, resize, save_png
from ..taxonomy import (
    LabelMap,
    TaxonomyError,
    apply_mapping,
    builtin_mapping,
    builtin_taxonomy,
    decode_simulator_labels,
)
from .manifest import DatasetManifest, ManifestEntry, ManifestError

TARGET_TAXONOMY = "cityscapes-trainid"


def _normalize_labels(raw: ImageBuffer, taxonomy: str) -> LabelMap:
    if taxonomy == TARGET_TAXONOMY:
        if raw.channels != 1:
            raise TaxonomyError("trainId label maps must be single-channel PNGs")
        return LabelMap.from_array(
            np.rint(raw.plane()).astype(np.int64), TARGET_TAXONOMY
        )
    src = builtin_taxonomy(taxonomy)
    lm = decode_simulator_labels(raw, src)
    mapping = builtin_mapping(taxonomy, TARGET_TAXONOMY)
    mapping.validate(src, builtin_taxonomy(TARGET_TAXONOMY))
    return apply_mapping(lm, mapping, builtin_taxonomy(TARGET_TAXONOMY))


def assemble(
    manifest: DatasetManifest,
    out_dir,
    target_res: tuple[int, int] = (1024, 512),
) -> DatasetManifest:
    """Write resized/converted copies under out_dir; returns the new manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    missing = manifest.validate_files()
    if missing:
        raise ManifestError(f"missing files: {missing[:5]}")
    w, h = target_res
    new_entries = []
    for entry in manifest.sorted_entries():
        stem = entry.entry_id.replace("/", "__")
        img = load_png(entry.image_path)
        img = resize(img, w, h, "lanczos3")
        img_path = out_dir / f"{stem}.png"
        save_png(img, img_path)
        label_path = None
        if entry.label_path:
            raw = load_png(entry.label_path)
            raw = resize(raw, w, h, "nearest")
            lm = _normalize_labels(raw, manifest.taxonomy)
            label_path = out_dir / f"{stem}_labelTrainIds.png"
            save_png(ImageBuffer.from_array(lm.ids.astype(np.float64)), label_path)
        new_entries.append(
            ManifestEntry(
                entry_id=entry.entry_id,
                image_path=str(img_path),
                label_path=str(label_path) if label_path else None,
                instance_path=entry.instance_path,
                pred_sem_path=entry.pred_sem_path,
                pred_inst_path=entry.pred_inst_path,
                feature_path=entry.feature_path,
            )
        )
    out = DatasetManifest(
        role=manifest.role,
        entries=new_entries,
        taxonomy=TARGET_TAXONOMY,
        resolution=target_res,
        provenance={**manifest.provenance, "resize_stage": manifest.provenance.get("resize_stage", "assemble")},
        fid_feature_path=manifest.fid_feature_path,
    )
    out.save(out_dir / "manifest.json")
    return out
