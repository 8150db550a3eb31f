"""Pixel confusion matrix and mean intersection-over-union."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..taxonomy import LabelMap


class SegEvalError(Exception):
    pass


@dataclass
class ConfusionMatrix:
    """K x K counts over evaluation classes; ignore pixels excluded."""

    num_classes: int
    ignore_id: int = 255
    counts: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((self.num_classes, self.num_classes), dtype=np.int64)

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if other.num_classes != self.num_classes:
            raise SegEvalError("cannot merge confusion matrices of different sizes")
        self.counts += other.counts
        return self


def accumulate_confusion(gt: LabelMap, pred: LabelMap, cm: ConfusionMatrix) -> ConfusionMatrix:
    """Add one image's pixel counts; ground-truth ignore pixels are skipped."""
    if (gt.width, gt.height) != (pred.width, pred.height):
        raise SegEvalError(
            f"size mismatch: gt {gt.width}x{gt.height} vs pred {pred.width}x{pred.height}"
        )
    if gt.taxonomy != pred.taxonomy:
        raise SegEvalError(f"taxonomy mismatch: {gt.taxonomy!r} vs {pred.taxonomy!r}")
    g = gt.ids.ravel()
    p = pred.ids.ravel()
    valid = g != cm.ignore_id
    g, p = g[valid], p[valid]
    if ((g < 0) | (g >= cm.num_classes)).any():
        raise SegEvalError("ground-truth class id outside the evaluation range")
    if ((p < 0) | (p >= cm.num_classes)).any():
        raise SegEvalError("predicted class id outside the evaluation range")
    np.add.at(cm.counts, (g, p), 1)
    return cm


def miou(cm: ConfusionMatrix) -> tuple[float, dict[int, float]]:
    """Mean IoU in percent plus per-class IoUs; classes absent from both
    ground truth and predictions are excluded from the mean."""
    if cm.counts.sum() == 0:
        raise SegEvalError("empty confusion matrix")
    tp = np.diag(cm.counts).astype(np.float64)
    fp = cm.counts.sum(axis=0) - tp
    fn = cm.counts.sum(axis=1) - tp
    denom = tp + fp + fn
    per_class = {}
    for c in range(cm.num_classes):
        if denom[c] > 0:
            per_class[c] = float(100.0 * tp[c] / denom[c])
    if not per_class:
        raise SegEvalError("no classes present")
    return float(np.mean(list(per_class.values()))), per_class
