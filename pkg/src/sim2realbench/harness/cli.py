"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 missing metric model.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..distmetrics import MomentError, fid_from_files
from ..fvec import FvecError
from ..imgcore import ImageBuffer, ImageError, load_png, save_png
from ..nriqa import NiqeError, fit_niqe, save_niqe_model
from ..segmetrics import SegEvalError
from ..taxonomy import (
    LabelMap,
    TaxonomyError,
    apply_mapping,
    builtin_mapping,
    builtin_taxonomy,
    decode_color,
    decode_simulator_labels,
    encode_color,
    load_mapping,
    load_taxonomy,
)
from .assemble import assemble
from .manifest import DatasetManifest, ManifestError
from .report import MetricReport, ReportError, emit_report
from .runner import IQA_METRICS, ModelFileMissing, run_iqa, run_seg_eval
from .sampling import sample_shift

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 0, 1, 2, 3

DATA_ERRORS = (ImageError, TaxonomyError, ManifestError, SegEvalError,
               ReportError, FvecError, MomentError, NiqeError, OSError, ValueError)


def _load_tax(spec: str):
    if spec.endswith(".json"):
        return load_taxonomy(spec)
    return builtin_taxonomy(spec)


def _cmd_convert_labels(args) -> int:
    src_tax = _load_tax(args.source_taxonomy)
    dst_tax = _load_tax(args.target_taxonomy)
    if args.mapping:
        mapping = load_mapping(args.mapping)
    else:
        mapping = builtin_mapping(src_tax.name, dst_tax.name)
    mapping.validate(src_tax, dst_tax)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(args.inputs).glob("*.png")):
        raw = load_png(path)
        if args.encoding == "simulator-red":
            lm = decode_simulator_labels(raw, src_tax)
        elif args.encoding == "color":
            lm = decode_color(raw, src_tax)
        else:  # trainid
            lm = LabelMap.from_array(np.rint(raw.plane()).astype(np.int64), src_tax.name)
        converted = apply_mapping(lm, mapping, dst_tax)
        save_png(
            ImageBuffer.from_array(converted.ids.astype(np.float64)),
            out_dir / path.name,
        )
        if args.color:
            save_png(encode_color(converted, dst_tax), out_dir / f"{path.stem}_color.png")
    return EXIT_OK


def _cmd_sample_shift(args) -> int:
    manifest = sample_shift(args.root, args.seed)
    manifest.save(args.out)
    print(f"{len(manifest.entries)} entries -> {args.out}")
    return EXIT_OK


def _cmd_assemble(args) -> int:
    manifest = DatasetManifest.load(args.manifest)
    out = assemble(manifest, args.out, target_res=(args.width, args.height))
    print(f"assembled {len(out.entries)} entries -> {args.out}")
    return EXIT_OK


def _cmd_iqa(args) -> int:
    test = DatasetManifest.load(args.test)
    ref = DatasetManifest.load(args.ref) if args.ref else None
    models = {}
    if args.brisque_model:
        models["brisque"] = args.brisque_model
    if args.niqe_model:
        models["niqe"] = args.niqe_model
    if args.lpips_weights:
        models["lpips_weights"] = args.lpips_weights
    report = run_iqa(
        test_manifest=test,
        ref_manifest=ref,
        metrics=set(args.metrics),
        models=models,
        threads=args.threads,
    )
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"scored {len(report.per_image)} entries "
          f"({len(report.failures)} failures) -> {args.out}")
    return EXIT_OK


def _cmd_fid(args) -> int:
    value = fid_from_files(args.a, args.b)
    print(f"{max(value, 0.0):.6f}")
    return EXIT_OK


def _cmd_seg_eval(args) -> int:
    gt = DatasetManifest.load(args.gt)
    pred = DatasetManifest.load(args.pred)
    report = run_seg_eval(gt, pred, tasks=set(args.tasks))
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    for metric in ("miou", "pq", "sq", "rq", "ap"):
        if metric in report.aggregate:
            print(f"{metric}: {report.aggregate[metric]['mean']:.3f}")
    return EXIT_OK


def _cmd_fit_niqe(args) -> int:
    paths = sorted(Path(args.corpus).glob("*.png"))
    images = []
    for p in paths:
        img = load_png(p)
        if img.channels == 3:
            from ..imgcore import to_luma

            img = to_luma(img)
        images.append(img)
    model = fit_niqe(images, patch=args.patch, sharpness_quantile=args.quantile)
    save_niqe_model(model, args.out)
    print(f"fitted on {len(images)} images -> {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    reports = []
    for path in args.reports:
        reports.append(MetricReport.from_dict(json.loads(Path(path).read_text())))
    doc = emit_report(reports, fmt=args.format,
                      allow_mixed_resolution=args.allow_mixed_resolution)
    if args.out:
        Path(args.out).write_text(doc)
    else:
        sys.stdout.write(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim2realbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert-labels", help="convert label maps between taxonomies")
    p.add_argument("--inputs", required=True, help="directory of label PNGs")
    p.add_argument("--out", required=True)
    p.add_argument("--source-taxonomy", default="carla")
    p.add_argument("--target-taxonomy", default="cityscapes-trainid")
    p.add_argument("--mapping", help="mapping JSON (default: builtin)")
    p.add_argument("--encoding", choices=("simulator-red", "color", "trainid"),
                   default="simulator-red")
    p.add_argument("--color", action="store_true", help="also write color maps")
    p.set_defaults(func=_cmd_convert_labels)

    p = sub.add_parser("sample-shift", help="pick one frame per scenario")
    p.add_argument("--root", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample_shift)

    p = sub.add_parser("assemble", help="normalize a manifest to the target resolution")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=1024)
    p.add_argument("--height", type=int, default=512)
    p.set_defaults(func=_cmd_assemble)

    p = sub.add_parser("iqa", help="image quality metrics over manifests")
    p.add_argument("--test", required=True)
    p.add_argument("--ref")
    p.add_argument("--metrics", nargs="+", choices=IQA_METRICS, default=list(IQA_METRICS))
    p.add_argument("--brisque-model")
    p.add_argument("--niqe-model")
    p.add_argument("--lpips-weights")
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_iqa)

    p = sub.add_parser("fid", help="Frechet distance between two FVEC files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=_cmd_fid)

    p = sub.add_parser("seg-eval", help="segmentation metrics over manifests")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--tasks", nargs="+", choices=("miou", "pq", "ap"),
                   default=["miou", "pq", "ap"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_seg_eval)

    p = sub.add_parser("fit-niqe", help="fit a pristine naturalness model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--patch", type=int, default=96)
    p.add_argument("--quantile", type=float, default=0.75)
    p.set_defaults(func=_cmd_fit_niqe)

    p = sub.add_parser("report", help="lay out reports as a table")
    p.add_argument("reports", nargs="+")
    p.add_argument("--format", choices=("json", "csv", "markdown"), default="markdown")
    p.add_argument("--allow-mixed-resolution", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ModelFileMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
