"""Instance-segmentation average precision (101-point interpolation,
IoU thresholds 0.50:0.05:0.95) over externally produced predictions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .confusion import SegEvalError
from .panoptic import INSTANCE_FACTOR, InstanceMap

IOU_THRESHOLDS = tuple(np.round(np.arange(0.50, 0.96, 0.05), 2))
RECALL_POINTS = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class InstancePrediction:
    class_id: int
    score: float
    mask: np.ndarray  # (H, W) bool

    def __post_init__(self):
        if not np.isfinite(self.score):
            raise SegEvalError("prediction score must be finite")
        if not self.mask.any():
            raise SegEvalError("prediction mask is empty")


def decode_rle(runs: list[int], width: int, height: int) -> np.ndarray:
    """Row-major alternating background/foreground run lengths, background first."""
    total = sum(runs)
    if total != width * height:
        raise SegEvalError(f"RLE covers {total} px, image has {width * height}")
    flat = np.zeros(width * height, dtype=bool)
    pos = 0
    fg = False
    for run in runs:
        if run < 0:
            raise SegEvalError("negative run length")
        if fg:
            flat[pos : pos + run] = True
        pos += run
        fg = not fg
    return flat.reshape(height, width)


def encode_rle(mask: np.ndarray) -> list[int]:
    flat = np.asarray(mask, dtype=bool).ravel()
    boundaries = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [flat.size]])
    runs = (ends - starts).tolist()
    if flat[0]:
        runs.insert(0, 0)  # runs always start with a background count
    return [int(r) for r in runs]


def load_predictions(path, width: int, height: int) -> list[InstancePrediction]:
    """One JSON per image: {instances: [{class_id, score, mask_rle}]}."""
    doc = json.loads(Path(path).read_text())
    preds = []
    for inst in doc.get("instances", []):
        preds.append(
            InstancePrediction(
                class_id=int(inst["class_id"]),
                score=float(inst["score"]),
                mask=decode_rle(list(inst["mask_rle"]), width, height),
            )
        )
    return preds


def gt_instances(imap: InstanceMap) -> list[tuple[int, np.ndarray]]:
    """Thing segments of an instance map as (class_id, mask) pairs."""
    out = []
    for v in np.unique(imap.ids):
        if v >= INSTANCE_FACTOR:
            out.append((int(v) // INSTANCE_FACTOR, imap.ids == v))
    return out


def _mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    inter = np.logical_and(a, b).sum()
    union = np.logical_or(a, b).sum()
    return float(inter) / float(union) if union else 0.0


def _ap_from_matches(matched: np.ndarray, n_gt: int) -> float:
    """101-point interpolated AP from score-ordered TP/FP flags."""
    if n_gt == 0:
        return 0.0
    tp = np.cumsum(matched)
    fp = np.cumsum(~matched)
    recall = tp / n_gt
    precision = tp / np.maximum(tp + fp, 1)
    # precision envelope (monotone non-increasing from the right)
    env = np.maximum.accumulate(precision[::-1])[::-1]
    interp = np.zeros_like(RECALL_POINTS)
    for i, r in enumerate(RECALL_POINTS):
        idx = np.searchsorted(recall, r, side="left")
        interp[i] = env[idx] if idx < env.size else 0.0
    return float(interp.mean())


def instance_ap(
    gts: dict[str, InstanceMap],
    preds: dict[str, list[InstancePrediction]],
) -> tuple[float, dict[int, float]]:
    """COCO-style AP in percent, averaged over IoU thresholds then classes.

    `gts` maps image id -> ground-truth instance map; `preds` maps image
    id -> predictions. Classes with no ground-truth instances are excluded.
    """
    unknown = set(preds) - set(gts)
    if unknown:
        raise SegEvalError(f"predictions reference unknown images: {sorted(unknown)}")
    per_image_gt = {img: gt_instances(m) for img, m in sorted(gts.items())}
    classes = sorted({c for insts in per_image_gt.values() for c, _ in insts})
    per_class: dict[int, float] = {}
    for cls in classes:
        cls_gt = {img: [m for c, m in insts if c == cls] for img, insts in per_image_gt.items()}
        n_gt = sum(len(v) for v in cls_gt.values())
        entries = []  # (score, image, prediction index)
        cls_preds: dict[str, list[InstancePrediction]] = {}
        for img in sorted(preds):
            plist = [p for p in preds[img] if p.class_id == cls]
            cls_preds[img] = plist
            for idx, p in enumerate(plist):
                entries.append((-p.score, img, idx))
        entries.sort()
        aps = []
        for t in IOU_THRESHOLDS:
            used: dict[str, set[int]] = {img: set() for img in cls_gt}
            matched = np.zeros(len(entries), dtype=bool)
            for rank, (_, img, idx) in enumerate(entries):
                best_iou, best_gt = 0.0, -1
                for gi, gmask in enumerate(cls_gt.get(img, [])):
                    if gi in used[img]:
                        continue
                    iou = _mask_iou(cls_preds[img][idx].mask, gmask)
                    if iou > best_iou:
                        best_iou, best_gt = iou, gi
                if best_gt >= 0 and best_iou >= t:
                    used[img].add(best_gt)
                    matched[rank] = True
            aps.append(_ap_from_matches(matched, n_gt))
        per_class[cls] = 100.0 * float(np.mean(aps))
    mean_ap = float(np.mean(list(per_class.values()))) if per_class else 0.0
    return mean_ap, per_class
