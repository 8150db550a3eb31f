"""Batch metric execution over manifests.

Per-entry work runs in a process pool (width from SIM2REAL_THREADS or
--threads); results are reduced sequentially over lexicographically
sorted entry ids, so reports are byte-identical at any pool width.
Entry failures are isolated and recorded, never aborting the batch.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import distmetrics
from ..friqa import (
    cw_ssim,
    fsim,
    load_layer_features,
    load_lpips_weights,
    lpips_from_features,
    ms_ssim,
    psnr,
    ssim,
)
from ..imgcore import load_png, to_luma
from ..nriqa import brisque_score, load_niqe_model, load_svr_model, niqe_score
from ..segmetrics import (
    ConfusionMatrix,
    InstanceMap,
    SegEvalError,
    accumulate_confusion,
    accumulate_pq,
    instance_ap,
    load_predictions,
    miou,
    pq_from_stats,
)
from ..taxonomy import LabelMap
from .manifest import DatasetManifest, ManifestError
from .report import MetricReport

FR_METRICS = ("psnr", "ssim", "ms_ssim", "cw_ssim", "fsim", "lpips")
NR_METRICS = ("brisque", "niqe")
IQA_METRICS = FR_METRICS + NR_METRICS + ("fid",)

CONFIG_ECHO = {
    "ssim": {"window": 11, "sigma": 1.5, "c1": (0.01 * 255) ** 2, "c2": (0.03 * 255) ** 2},
    "ms_ssim": {"weights": [0.0448, 0.2856, 0.3001, 0.2363, 0.1333]},
    "cw_ssim": {"level": 4, "orientations": 8, "k": 2.55, "window": 7},
    "fsim": {"scales": 4, "orientations": 4, "min_wavelength": 6, "mult": 2,
             "sigma_onf": 0.55, "t1": 0.85, "t2": 160},
    "nriqa": {"mscn_window": 7, "mscn_sigma": 7 / 6, "niqe_patch": 96,
              "niqe_quantile": 0.75},
    "color_space": "bt601-luma",
    "ap_protocol": "101-point interpolation, IoU 0.50:0.05:0.95",
}

_MODEL_CACHE: dict = {}


def pool_width(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("SIM2REAL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _cached(kind: str, path: str):
    key = (kind, path)
    if key not in _MODEL_CACHE:
        loader = {"svr": load_svr_model, "niqe": load_niqe_model,
                  "lpips_weights": load_lpips_weights}[kind]
        _MODEL_CACHE[key] = loader(path)
    return _MODEL_CACHE[key]


def _score_entry(job: dict) -> tuple[str, dict[str, float], str | None]:
    """Worker: compute all requested per-image metrics for one entry."""
    entry_id = job["entry_id"]
    try:
        values: dict[str, float] = {}
        metrics = job["metrics"]
        test_img = None
        test_luma = None
        if any(m in metrics for m in ("psnr", "ssim", "ms_ssim", "cw_ssim", "fsim") + NR_METRICS):
            test_img = load_png(job["test_image"])
            test_luma = to_luma(test_img) if test_img.channels == 3 else test_img
        if any(m in metrics for m in ("psnr", "ssim", "ms_ssim", "cw_ssim", "fsim")):
            ref_img = load_png(job["ref_image"])
            ref_luma = to_luma(ref_img) if ref_img.channels == 3 else ref_img
            if "psnr" in metrics:
                values["psnr"] = psnr(ref_img, test_img).value
            if "ssim" in metrics:
                values["ssim"] = ssim(ref_luma, test_luma).value
            if "ms_ssim" in metrics:
                values["ms_ssim"] = ms_ssim(ref_luma, test_luma).value
            if "cw_ssim" in metrics:
                values["cw_ssim"] = cw_ssim(ref_luma, test_luma).value
            if "fsim" in metrics:
                values["fsim"] = fsim(ref_luma, test_luma).value
        if "lpips" in metrics:
            fa = load_layer_features(job["ref_features"])
            fb = load_layer_features(job["test_features"])
            weights = (_cached("lpips_weights", job["lpips_weights"])
                       if job.get("lpips_weights") else None)
            values["lpips"] = lpips_from_features(fa, fb, weights).value
        if "brisque" in metrics:
            values["brisque"] = brisque_score(test_luma, _cached("svr", job["brisque_model"]))
        if "niqe" in metrics:
            values["niqe"] = niqe_score(test_luma, _cached("niqe", job["niqe_model"]))
        return entry_id, values, None
    except Exception as exc:  # noqa: BLE001 - per-entry isolation
        return entry_id, {}, f"{type(exc).__name__}: {exc}"


class ModelFileMissing(Exception):
    """A requested metric needs a model file that was not supplied."""


def run_iqa(
    test_manifest: DatasetManifest,
    ref_manifest: DatasetManifest | None = None,
    metrics: set[str] | None = None,
    models: dict[str, str] | None = None,
    threads: int | None = None,
) -> MetricReport:
    metrics = set(metrics or IQA_METRICS) & set(IQA_METRICS)
    models = models or {}
    fr_requested = metrics & {"psnr", "ssim", "ms_ssim", "cw_ssim", "fsim", "lpips"}
    if fr_requested - {"lpips"} and ref_manifest is None:
        raise ManifestError(f"metrics {sorted(fr_requested)} need a reference manifest")
    for metric, key in (("brisque", "brisque"), ("niqe", "niqe")):
        if metric in metrics and not models.get(key):
            raise ModelFileMissing(f"{metric} requested but no model file supplied")

    test_entries = {e.entry_id: e for e in test_manifest.entries}
    ref_entries = {e.entry_id: e for e in ref_manifest.entries} if ref_manifest else {}
    if ref_manifest is not None and fr_requested:
        if set(test_entries) != set(ref_entries):
            only_t = sorted(set(test_entries) - set(ref_entries))[:3]
            only_r = sorted(set(ref_entries) - set(test_entries))[:3]
            raise ManifestError(
                f"entry correspondence mismatch (test-only {only_t}, ref-only {only_r})"
            )

    jobs = []
    for entry_id in sorted(test_entries):
        e = test_entries[entry_id]
        r = ref_entries.get(entry_id)
        jobs.append({
            "entry_id": entry_id,
            "metrics": sorted(metrics - {"fid"}),
            "test_image": e.image_path,
            "ref_image": r.image_path if r else None,
            "test_features": e.feature_path,
            "ref_features": r.feature_path if r else None,
            "lpips_weights": models.get("lpips_weights"),
            "brisque_model": models.get("brisque"),
            "niqe_model": models.get("niqe"),
        })

    width = pool_width(threads)
    if width == 1 or len(jobs) <= 1:
        results = [_score_entry(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=width) as pool:
            results = list(pool.map(_score_entry, jobs, chunksize=max(1, len(jobs) // (4 * width))))

    report = MetricReport(
        dataset_role=test_manifest.role,
        label=str(test_manifest.provenance.get("generator", "")),
        resolution=tuple(test_manifest.resolution),
        config_echo=CONFIG_ECHO,
    )
    for entry_id, values, error in sorted(results, key=lambda r: r[0]):
        if error is not None:
            report.record_failure(entry_id, error)
            continue
        for metric, value in values.items():
            report.record(entry_id, metric, value)
    report.finalize_aggregates()

    if "fid" in metrics:
        if not (test_manifest.fid_feature_path and ref_manifest and ref_manifest.fid_feature_path):
            raise ModelFileMissing("fid requested but manifests lack fid_feature_path")
        value = distmetrics.fid_from_files(
            ref_manifest.fid_feature_path, test_manifest.fid_feature_path
        )
        report.set_aggregate("fid", value=max(value, 0.0))
    return report


def run_seg_eval(
    gt_manifest: DatasetManifest,
    pred_manifest: DatasetManifest,
    tasks: set[str] | None = None,
    num_classes: int = 19,
) -> MetricReport:
    tasks = set(tasks or {"miou", "pq", "ap"})
    if tasks - {"miou", "pq", "ap"}:
        raise SegEvalError(f"unknown tasks {sorted(tasks - {'miou', 'pq', 'ap'})}")
    if tasks & {"pq", "ap"} and not gt_manifest.allows_panoptic:
        raise SegEvalError(
            f"panoptic annotations not provided for SHIFT-derived roles "
            f"(role {gt_manifest.role} permits mIoU only)"
        )
    gt_entries = {e.entry_id: e for e in gt_manifest.entries}
    pred_entries = {e.entry_id: e for e in pred_manifest.entries}
    if set(gt_entries) != set(pred_entries):
        raise ManifestError("gt/pred manifests cover different entry ids")

    report = MetricReport(
        dataset_role=pred_manifest.role,
        label=str(pred_manifest.provenance.get("generator", "")),
        resolution=tuple(pred_manifest.resolution),
        config_echo=CONFIG_ECHO,
    )
    cm = ConfusionMatrix(num_classes=num_classes)
    pq_stats: dict = {}
    ap_gts: dict[str, InstanceMap] = {}
    ap_preds: dict = {}
    for entry_id in sorted(gt_entries):
        g, p = gt_entries[entry_id], pred_entries[entry_id]
        if "miou" in tasks:
            gt_lm = LabelMap.from_array(
                np.rint(load_png(g.label_path).plane()).astype(np.int64), gt_manifest.taxonomy
            )
            pred_lm = LabelMap.from_array(
                np.rint(load_png(p.pred_sem_path).plane()).astype(np.int64), gt_manifest.taxonomy
            )
            accumulate_confusion(gt_lm, pred_lm, cm)
        if "pq" in tasks:
            gt_im = InstanceMap.from_array(
                np.rint(load_png(g.instance_path, instance_ids=True).plane()).astype(np.int64)
            )
            pred_im = InstanceMap.from_array(
                np.rint(load_png(p.pred_inst_path, instance_ids=True).plane()).astype(np.int64)
            )
            accumulate_pq(gt_im, pred_im, pq_stats)
        if "ap" in tasks:
            gt_im = InstanceMap.from_array(
                np.rint(load_png(g.instance_path, instance_ids=True).plane()).astype(np.int64)
            )
            ap_gts[entry_id] = gt_im
            json_path = Path(p.pred_inst_path)
            if json_path.suffix != ".json":
                json_path = json_path.with_suffix(".json")
            ap_preds[entry_id] = load_predictions(json_path, gt_im.width, gt_im.height)

    if "miou" in tasks:
        mean_iou, per_class = miou(cm)
        report.set_aggregate("miou", value=mean_iou)
        report.config_echo = dict(report.config_echo, per_class_iou=per_class)
    if "pq" in tasks:
        res = pq_from_stats(pq_stats)
        report.set_aggregate("pq", value=res.pq)
        report.set_aggregate("sq", value=res.sq)
        report.set_aggregate("rq", value=res.rq)
    if "ap" in tasks:
        mean_ap, per_class_ap = instance_ap(ap_gts, ap_preds)
        report.set_aggregate("ap", value=mean_ap)
        report.config_echo = dict(report.config_echo, per_class_ap=per_class_ap)
    return report
