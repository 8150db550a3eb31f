"""Panoptic quality with the standard void-aware matching protocol.

Instance encoding follows the Cityscapes convention: thing pixels carry
semantic_id * 1000 + instance_index, stuff pixels carry the bare semantic
id, and void pixels carry the ignore id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .confusion import SegEvalError

INSTANCE_FACTOR = 1000
VOID_ID = 255
IOU_THRESHOLD = 0.5


@dataclass(frozen=True)
class InstanceMap:
    width: int
    height: int
    ids: np.ndarray  # (height, width) int64

    @classmethod
    def from_array(cls, ids: np.ndarray) -> "InstanceMap":
        a = np.ascontiguousarray(ids, dtype=np.int64)
        if a.ndim != 2:
            raise SegEvalError(f"instance map must be 2-D, got shape {ids.shape}")
        return cls(width=a.shape[1], height=a.shape[0], ids=a)

    def semantic_of(self, segment_id: int) -> int:
        return segment_id // INSTANCE_FACTOR if segment_id >= INSTANCE_FACTOR else segment_id


@dataclass
class PQStat:
    iou_sum: float = 0.0
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def scores(self) -> tuple[float, float, float]:
        """(PQ, SQ, RQ) in percent."""
        denom = self.tp + 0.5 * self.fp + 0.5 * self.fn
        if denom == 0:
            return 0.0, 0.0, 0.0
        sq = self.iou_sum / self.tp if self.tp else 0.0
        rq = self.tp / denom
        return 100.0 * sq * rq, 100.0 * sq, 100.0 * rq


@dataclass
class PanopticResult:
    pq: float
    sq: float
    rq: float
    per_class: dict[int, tuple[float, float, float]] = field(default_factory=dict)


def _segment_areas(ids: np.ndarray) -> dict[int, int]:
    vals, counts = np.unique(ids, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts) if v != VOID_ID}


def accumulate_pq(
    gt: InstanceMap, pred: InstanceMap, stats: dict[int, PQStat] | None = None
) -> dict[int, PQStat]:
    """Add one image's TP/FP/FN tallies, keyed by semantic class."""
    if (gt.width, gt.height) != (pred.width, pred.height):
        raise SegEvalError(
            f"size mismatch: gt {gt.width}x{gt.height} vs pred {pred.width}x{pred.height}"
        )
    if stats is None:
        stats = {}
    gt_areas = _segment_areas(gt.ids)
    pred_areas = _segment_areas(pred.ids)

    # joint histogram of (gt segment, pred segment) pixel pairs
    offset = int(max(pred.ids.max(initial=0), VOID_ID)) + 1
    joint = gt.ids.astype(np.int64) * offset + pred.ids
    vals, counts = np.unique(joint, return_counts=True)
    inter: dict[tuple[int, int], int] = {}
    for v, c in zip(vals, counts):
        inter[(int(v) // offset, int(v) % offset)] = int(c)

    pred_void = {
        p: inter.get((VOID_ID, p), 0) for p in pred_areas
    }

    matched_gt: set[int] = set()
    matched_pred: set[int] = set()
    for (g, p), c in inter.items():
        if g == VOID_ID or p == VOID_ID:
            continue
        if g not in gt_areas or p not in pred_areas:
            continue
        if gt.semantic_of(g) != pred.semantic_of(p):
            continue
        union = gt_areas[g] + pred_areas[p] - c - pred_void[p]
        iou = c / union if union > 0 else 0.0
        if iou > IOU_THRESHOLD:
            cls = gt.semantic_of(g)
            st = stats.setdefault(cls, PQStat())
            st.tp += 1
            st.iou_sum += iou
            matched_gt.add(g)
            matched_pred.add(p)

    for g, _area in gt_areas.items():
        if g not in matched_gt:
            stats.setdefault(gt.semantic_of(g), PQStat()).fn += 1
    for p, area in pred_areas.items():
        if p in matched_pred:
            continue
        if pred_void[p] > 0.5 * area:
            continue  # mostly-void prediction: not penalized
        stats.setdefault(pred.semantic_of(p), PQStat()).fp += 1
    return stats


def pq_from_stats(stats: dict[int, PQStat]) -> PanopticResult:
    pooled = PQStat()
    per_class = {}
    for cls, st in sorted(stats.items()):
        pooled.iou_sum += st.iou_sum
        pooled.tp += st.tp
        pooled.fp += st.fp
        pooled.fn += st.fn
        per_class[cls] = st.scores()
    pq, sq, rq = pooled.scores()
    return PanopticResult(pq=pq, sq=sq, rq=rq, per_class=per_class)


def panoptic_quality(gt: InstanceMap, pred: InstanceMap) -> PanopticResult:
    return pq_from_stats(accumulate_pq(gt, pred))
