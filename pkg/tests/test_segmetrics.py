"""Segmentation metrics: confusion/mIoU, panoptic quality, instance AP."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sim2realbench.segmetrics import (
    ConfusionMatrix,
    InstanceMap,
    InstancePrediction,
    SegEvalError,
    accumulate_confusion,
    accumulate_pq,
    decode_rle,
    encode_rle,
    gt_instances,
    instance_ap,
    load_predictions,
    miou,
    panoptic_quality,
    pq_from_stats,
)
from sim2realbench.segmetrics.instances import IOU_THRESHOLDS
from sim2realbench.taxonomy import LabelMap


def lm(ids):
    return LabelMap.from_array(np.asarray(ids), "cityscapes-trainid")


# -------------------------------------------------------------- confusion/miou

def test_confusion_accumulation():
    cm = ConfusionMatrix(num_classes=19)
    accumulate_confusion(lm(np.zeros((10, 10), dtype=int)), lm(np.zeros((10, 10), dtype=int)), cm)
    assert cm.counts[0, 0] == 100
    gt = np.zeros((2, 5), dtype=int)
    pred = np.ones((2, 5), dtype=int)
    accumulate_confusion(lm(gt), lm(pred), cm)
    assert cm.counts[0, 1] == 10


def test_confusion_ignores_gt_void():
    cm = ConfusionMatrix(num_classes=19)
    accumulate_confusion(lm(np.full((4, 4), 255)), lm(np.zeros((4, 4), dtype=int)), cm)
    assert cm.counts.sum() == 0
    with pytest.raises(SegEvalError, match="empty"):
        miou(cm)


def test_confusion_errors():
    cm = ConfusionMatrix(num_classes=19)
    with pytest.raises(SegEvalError, match="size mismatch"):
        accumulate_confusion(lm(np.zeros((2, 2), dtype=int)), lm(np.zeros((2, 3), dtype=int)), cm)
    with pytest.raises(SegEvalError, match="outside"):
        accumulate_confusion(lm(np.full((2, 2), 30)), lm(np.zeros((2, 2), dtype=int)), cm)


def test_miou_perfect_and_disjoint():
    cm = ConfusionMatrix(num_classes=19)
    gt = np.arange(4).reshape(2, 2)
    accumulate_confusion(lm(gt), lm(gt), cm)
    assert miou(cm)[0] == 100.0
    cm2 = ConfusionMatrix(num_classes=19)
    accumulate_confusion(lm(np.zeros((2, 2), dtype=int)), lm(np.ones((2, 2), dtype=int)), cm2)
    assert miou(cm2)[0] == 0.0


def test_miou_hand_fixture():
    # gt: 150 px class A; pred: 50 correct A, 100 labelled B
    # IoU_A = 50/150, IoU_B = 0/100 -> mIoU = 100*(1/3)/2
    gt = np.zeros((10, 15), dtype=int)
    pred = np.zeros((10, 15), dtype=int)
    pred.ravel()[50:] = 1
    cm = ConfusionMatrix(num_classes=19)
    accumulate_confusion(lm(gt), lm(pred), cm)
    mean, per_class = miou(cm)
    assert per_class[0] == pytest.approx(100.0 / 3.0, abs=1e-9)
    assert per_class[1] == 0.0
    assert mean == pytest.approx(100.0 / 6.0, abs=1e-9)


def test_miou_class_permutation_invariance():
    rs = np.random.RandomState(0)
    gt = rs.randint(0, 5, size=(20, 20))
    pred = rs.randint(0, 5, size=(20, 20))
    cm = ConfusionMatrix(num_classes=5)
    accumulate_confusion(
        LabelMap.from_array(gt, "t"), LabelMap.from_array(pred, "t"), cm
    )
    perm = np.array([3, 0, 4, 1, 2])
    cm2 = ConfusionMatrix(num_classes=5)
    accumulate_confusion(
        LabelMap.from_array(perm[gt], "t"), LabelMap.from_array(perm[pred], "t"), cm2
    )
    assert miou(cm)[0] == pytest.approx(miou(cm2)[0], abs=1e-12)


def test_confusion_merge():
    a = ConfusionMatrix(num_classes=3)
    b = ConfusionMatrix(num_classes=3)
    accumulate_confusion(LabelMap.from_array(np.zeros((2, 2), dtype=int), "t"),
                         LabelMap.from_array(np.zeros((2, 2), dtype=int), "t"), a)
    accumulate_confusion(LabelMap.from_array(np.ones((2, 2), dtype=int), "t"),
                         LabelMap.from_array(np.ones((2, 2), dtype=int), "t"), b)
    a.merge(b)
    assert a.counts[0, 0] == 4 and a.counts[1, 1] == 4
    with pytest.raises(SegEvalError):
        a.merge(ConfusionMatrix(num_classes=4))


# ----------------------------------------------------------------------- pq

def test_pq_identical_single_segment():
    ids = np.full((8, 8), 11000)
    res = panoptic_quality(InstanceMap.from_array(ids), InstanceMap.from_array(ids))
    assert res.pq == 100.0 and res.sq == 100.0 and res.rq == 100.0


def test_pq_hand_fixture_60():
    # 8x8 grid; thing segment 32 px, prediction overlaps 24 -> IoU 24/40 = 0.6
    # background stuff class matches with IoU 24/40 too -> pooled PQ = 60.0
    gt = np.zeros((8, 8), dtype=int)
    gt[:, :4] = 11000
    pred = np.zeros((8, 8), dtype=int)
    pred[:6, :4] = 11000
    pred[:2, 4:] = 11000
    res = panoptic_quality(InstanceMap.from_array(gt), InstanceMap.from_array(pred))
    assert res.pq == pytest.approx(60.0, abs=1e-9)
    assert res.per_class[11][0] == pytest.approx(60.0, abs=1e-9)


def test_pq_missed_segment():
    gt = np.full((4, 4), 11000)
    pred = np.full((4, 4), 255)
    res = panoptic_quality(InstanceMap.from_array(gt), InstanceMap.from_array(pred))
    assert res.pq == 0.0


def test_pq_void_majority_prediction_unpenalized():
    gt = np.full((4, 4), 255)
    gt[0, 0] = 11000
    pred = np.full((4, 4), 12000)  # 15/16 px on void
    stats = accumulate_pq(InstanceMap.from_array(gt), InstanceMap.from_array(pred))
    assert 12 not in stats  # no FP recorded
    assert stats[11].fn == 1


def test_pq_void_removed_from_union():
    gt = np.full((4, 4), 255)
    gt[:2] = 11000
    pred = np.full((4, 4), 11000)  # half overlaps gt, half void
    res = pq_from_stats(accumulate_pq(InstanceMap.from_array(gt), InstanceMap.from_array(pred)))
    assert res.pq == 100.0  # union excludes the void half -> IoU 1.0


def random_instance_map(rs):
    ids = rs.choice([255, 0, 1, 11000, 11001, 12000], size=(16, 16))
    return InstanceMap.from_array(ids)


def test_pq_equals_sq_times_rq_randomized():
    for seed in range(100):
        rs = np.random.RandomState(seed)
        gt = random_instance_map(rs)
        pred = random_instance_map(rs)
        gt_segments = {int(v) for v in np.unique(gt.ids) if v != 255}
        stats = accumulate_pq(gt, pred)
        res = pq_from_stats(stats)
        assert res.pq == pytest.approx(res.sq * res.rq / 100.0, abs=1e-10)
        for cls, (pq, sq, rq) in res.per_class.items():
            assert pq == pytest.approx(sq * rq / 100.0, abs=1e-10)
        # matching uniqueness: every gt segment is either the unique match of
        # one TP or counted as FN, never both / twice
        n_gt_by_class = {}
        for seg in gt_segments:
            cls = gt.semantic_of(seg)
            n_gt_by_class[cls] = n_gt_by_class.get(cls, 0) + 1
        for cls, st_ in stats.items():
            assert st_.tp + st_.fn == n_gt_by_class.get(cls, 0)


def test_pq_size_mismatch():
    with pytest.raises(SegEvalError, match="size mismatch"):
        accumulate_pq(
            InstanceMap.from_array(np.zeros((2, 2), dtype=int)),
            InstanceMap.from_array(np.zeros((2, 3), dtype=int)),
        )


# ----------------------------------------------------------------------- rle

def test_rle_roundtrip_and_examples():
    mask = np.zeros((2, 4), dtype=bool)
    mask[0, 1:3] = True
    runs = encode_rle(mask)
    assert runs == [1, 2, 5]
    assert np.array_equal(decode_rle(runs, 4, 2), mask)
    lead = np.ones((1, 3), dtype=bool)
    assert encode_rle(lead) == [0, 3]


def test_rle_errors():
    with pytest.raises(SegEvalError, match="covers"):
        decode_rle([1, 2], 4, 2)
    with pytest.raises(SegEvalError, match="negative"):
        decode_rle([-1, 9], 4, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000),
       st.integers(min_value=1, max_value=9), st.integers(min_value=1, max_value=9))
def test_rle_roundtrip_property(seed, h, w):
    rs = np.random.RandomState(seed)
    mask = rs.rand(h, w) > 0.5
    assert np.array_equal(decode_rle(encode_rle(mask), w, h), mask)


# ------------------------------------------------------------------------ ap

def rect_mask(h, w, y0, y1, x0, x1):
    m = np.zeros((h, w), dtype=bool)
    m[y0:y1, x0:x1] = True
    return m


def test_ap_single_prediction_iou_060():
    # inter 24 / union 40 = 0.6 exactly; matched at t in {0.50, 0.55, 0.60}
    gt = np.zeros((8, 8), dtype=int)
    gt[:, :4] = 11000
    pred_mask = rect_mask(8, 8, 0, 6, 0, 4) | rect_mask(8, 8, 0, 2, 4, 8)
    preds = [InstancePrediction(class_id=11, score=0.9, mask=pred_mask)]
    mean_ap, per_class = instance_ap({"img": InstanceMap.from_array(gt)}, {"img": preds})
    assert mean_ap == pytest.approx(30.0, abs=1e-9)
    assert per_class[11] == pytest.approx(30.0, abs=1e-9)


def test_ap_perfect_and_empty():
    gt = np.zeros((8, 8), dtype=int)
    gt[:4] = 11000
    gt[4:] = 12000
    gmap = InstanceMap.from_array(gt)
    perfect = [
        InstancePrediction(class_id=11, score=0.8, mask=gt == 11000),
        InstancePrediction(class_id=12, score=0.7, mask=gt == 12000),
    ]
    assert instance_ap({"img": gmap}, {"img": perfect})[0] == 100.0
    assert instance_ap({"img": gmap}, {"img": []})[0] == 0.0


def test_ap_unknown_image_rejected():
    with pytest.raises(SegEvalError, match="unknown images"):
        instance_ap({}, {"ghost": []})


def ap_oracle(gts, preds):
    """Independent plain-python evaluation of the matching protocol.

    Pixel sets instead of arrays, explicit enumeration of every candidate
    (prediction, gt) pair at every threshold, no vectorized shortcuts.
    """
    gt_lists = {
        img: [(cls, {(y, x) for y, x in zip(*np.nonzero(mask))})
              for cls, mask in gt_instances(imap)]
        for img, imap in gts.items()
    }
    classes = sorted({cls for insts in gt_lists.values() for cls, _ in insts})
    per_class = {}
    for cls in classes:
        entries = []
        for img in sorted(preds):
            for p in preds[img]:
                if p.class_id == cls:
                    pix = {(y, x) for y, x in zip(*np.nonzero(p.mask))}
                    entries.append((p.score, img, pix))
        entries.sort(key=lambda e: (-e[0], e[1]))
        n_gt = sum(1 for insts in gt_lists.values() for c, _ in insts if c == cls)
        threshold_aps = []
        for t in IOU_THRESHOLDS:
            taken = {img: set() for img in gt_lists}
            flags = []
            for score, img, pix in entries:
                candidates = [
                    (len(pix & gpix) / len(pix | gpix), gi)
                    for gi, (c, gpix) in enumerate(gt_lists.get(img, []))
                    if c == cls and gi not in taken[img]
                ]
                best = max(candidates, default=(0.0, -1))
                if best[1] >= 0 and best[0] >= t:
                    taken[img].add(best[1])
                    flags.append(True)
                else:
                    flags.append(False)
            # 101-point interpolated AP, computed scalar-wise
            points = []
            tp = fp = 0
            curve = []
            for f in flags:
                tp, fp = tp + f, fp + (not f)
                curve.append((tp / n_gt, tp / (tp + fp)))
            for i in range(101):
                r = i / 100.0
                best_p = 0.0
                for rec, prec in curve:
                    if rec >= r and prec > best_p:
                        best_p = prec
                points.append(best_p)
            threshold_aps.append(sum(points) / 101.0)
        per_class[cls] = 100.0 * sum(threshold_aps) / len(threshold_aps)
    mean_ap = sum(per_class.values()) / len(per_class) if per_class else 0.0
    return mean_ap, per_class


def random_tiny_case(seed):
    rs = np.random.RandomState(seed)
    h = w = 8
    gt = np.zeros((h, w), dtype=int)
    for k in range(rs.randint(1, 4)):
        cls = rs.choice([11, 12])
        y0, x0 = rs.randint(0, h - 2), rs.randint(0, w - 2)
        gt[y0 : y0 + rs.randint(2, 4), x0 : x0 + rs.randint(2, 4)] = cls * 1000 + k
    preds = []
    for _ in range(rs.randint(1, 4)):
        cls = rs.choice([11, 12])
        y0, x0 = rs.randint(0, h - 2), rs.randint(0, w - 2)
        mask = rect_mask(h, w, y0, y0 + rs.randint(1, 4), x0, x0 + rs.randint(1, 4))
        preds.append(InstancePrediction(class_id=int(cls), score=float(rs.rand()), mask=mask))
    return {"img": InstanceMap.from_array(gt)}, {"img": preds}


def test_ap_matches_exhaustive_oracle():
    for seed in range(10):
        gts, preds = random_tiny_case(seed)
        got_mean, got_cls = instance_ap(gts, preds)
        exp_mean, exp_cls = ap_oracle(gts, preds)
        assert got_mean == pytest.approx(exp_mean, abs=1e-9), seed
        for cls in exp_cls:
            assert got_cls[cls] == pytest.approx(exp_cls[cls], abs=1e-9), (seed, cls)


def test_load_predictions_json(tmp_path):
    mask = rect_mask(4, 4, 0, 2, 0, 2)
    doc = {"instances": [{"class_id": 11, "score": 0.5, "mask_rle": encode_rle(mask)}]}
    p = tmp_path / "img.json"
    p.write_text(json.dumps(doc))
    preds = load_predictions(p, 4, 4)
    assert len(preds) == 1
    assert np.array_equal(preds[0].mask, mask)
    assert preds[0].class_id == 11


def test_instance_prediction_invariants():
    with pytest.raises(SegEvalError, match="empty"):
        InstancePrediction(class_id=1, score=0.5, mask=np.zeros((2, 2), dtype=bool))
    with pytest.raises(SegEvalError, match="finite"):
        InstancePrediction(class_id=1, score=float("nan"), mask=np.ones((2, 2), dtype=bool))
