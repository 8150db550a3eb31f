"""Command line front end: run one adapter job from a JSON config."""

from __future__ import annotations

import argparse
import sys

from .features import extract_fid_features, extract_lpips_features
from .generate import generate_images
from .jobs import AdapterError, AdapterJob
from .segment import export_segmentation

RUNNERS = {
    "fid_features": extract_fid_features,
    "lpips_features": extract_lpips_features,
    "generate": generate_images,
    "segment": export_segmentation,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="s2radapters",
        description="Run a neural-adapter job described by a JSON config",
    )
    parser.add_argument("job", help="path to the job config JSON")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        job = AdapterJob.load(args.job)
        result = RUNNERS[job.kind](job)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result)
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
