"""Benchmark the compiled filtering kernels against the numpy/scipy fallback.

Runs the dense and separable correlation primitives, plus the metrics that
lean on them, on a synthetic 1024x512 frame and reports per-call timings
for both code paths. The fallback is selected the same way the package
selects it at import time: by re-importing with SIM2REALBENCH_NO_NATIVE=1
in a subprocess, so each path is measured in a clean interpreter.

Usage: python3 tools/bench_native.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from sim2realbench.imgcore import ImageBuffer
from sim2realbench.imgcore.filters import (
    HAVE_NATIVE, Kernel2D, convolve2d, gaussian_filter_plane, gaussian_taps,
)
from sim2realbench.friqa import fsim, ms_ssim, ssim
from sim2realbench.nriqa import brisque_features

repeats = int(sys.argv[1])
rs = np.random.RandomState(0)
plane = rs.rand(512, 1024) * 255
img = ImageBuffer.from_array(plane)
ref = ImageBuffer.from_array(np.clip(plane + rs.randn(512, 1024) * 8, 0, 255))
kernel = Kernel2D(np.outer(gaussian_taps(11, 1.5), gaussian_taps(11, 1.5)))

def timeit(fn):
    fn()  # warm up
    best = min(
        (lambda s=time.perf_counter(): (fn(), time.perf_counter() - s)[1])()
        for _ in range(repeats)
    )
    return best

results = {
    "native": HAVE_NATIVE,
    "correlate2d_11x11": timeit(lambda: convolve2d(img, kernel)),
    "gaussian_sep_11": timeit(lambda: gaussian_filter_plane(plane, 11, 1.5)),
    "ssim": timeit(lambda: ssim(img, ref)),
    "ms_ssim": timeit(lambda: ms_ssim(img, ref)),
    "fsim": timeit(lambda: fsim(img, ref)),
    "brisque_features": timeit(lambda: brisque_features(img)),
}
print(json.dumps(results))
"""


def run_path(no_native: bool, repeats: int) -> dict:
    env = dict(os.environ)
    env.pop("SIM2REALBENCH_NO_NATIVE", None)
    if no_native:
        env["SIM2REALBENCH_NO_NATIVE"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeats)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(out.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions per primitive (best is kept)")
    args = parser.parse_args()

    native = run_path(no_native=False, repeats=args.repeats)
    fallback = run_path(no_native=True, repeats=args.repeats)
    if not native["native"]:
        print("warning: compiled extension unavailable, both columns are the fallback")

    print(f"{'primitive':<20} {'native (ms)':>12} {'fallback (ms)':>14} {'speedup':>8}")
    for key in native:
        if key == "native":
            continue
        n, f = native[key] * 1e3, fallback[key] * 1e3
        print(f"{key:<20} {n:>12.2f} {f:>14.2f} {f / n:>7.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
