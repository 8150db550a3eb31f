"""Fit and export the default BRISQUE scoring model.

Trains an RBF support-vector regressor on synthetic pristine/degraded
image pairs (smoothed-noise scenes plus Gaussian noise and blur at graded
severities) and writes the JSON model consumed by the scorer. Re-run to
regenerate src/sim2realbench/data/brisque_svr.json.

If you hold the original LIBSVM release model, convert it instead with
tools/convert_libsvm_model.py to reproduce the reference scores.
"""

import json
from pathlib import Path

import numpy as np
from sklearn.svm import SVR

from sim2realbench.imgcore import ImageBuffer, gaussian_filter_plane
from sim2realbench.nriqa import brisque_features

OUT = Path(__file__).resolve().parents[1] / "src/sim2realbench/data/brisque_svr.json"


def synth_scene(rs: np.random.RandomState, size: int = 192) -> np.ndarray:
    """Natural-ish test card: band-limited noise + ramps + a few edges."""
    img = gaussian_filter_plane(rs.rand(size, size) * 255, 11, rs.uniform(1.5, 4.0))
    img = 0.6 * img + 0.4 * np.linspace(0, 255, size)[None, :]
    for _ in range(rs.randint(2, 6)):
        x0 = rs.randint(0, size - 20)
        img[:, x0 : x0 + rs.randint(5, 20)] += rs.uniform(-60, 60)
    return np.clip(img, 0, 255)


def degrade(rs, img, kind, severity):
    if kind == "noise":
        return np.clip(img + rs.randn(*img.shape) * severity, 0, 255)
    return gaussian_filter_plane(img, 2 * int(3 * severity) + 1, severity)


def main():
    rs = np.random.RandomState(7)
    feats, labels = [], []
    for _ in range(40):
        scene = synth_scene(rs)
        feats.append(brisque_features(ImageBuffer.from_array(scene)))
        labels.append(rs.uniform(5, 15))
        for kind, severities, base in (
            ("noise", (2, 5, 10, 20, 35), 25.0),
            ("blur", (0.8, 1.6, 3.2), 30.0),
        ):
            for i, s in enumerate(severities):
                feats.append(
                    brisque_features(ImageBuffer.from_array(degrade(rs, scene, kind, s)))
                )
                labels.append(base + 15.0 * i + rs.uniform(-3, 3))
    x = np.asarray(feats)
    y = np.asarray(labels)
    fmin, fmax = x.min(axis=0), x.max(axis=0)
    fmax = np.where(fmax - fmin < 1e-9, fmin + 1e-9, fmax)
    xs = -1.0 + 2.0 * (x - fmin) / (fmax - fmin)
    svr = SVR(kernel="rbf", gamma=0.05, C=100.0, epsilon=2.0)
    svr.fit(xs, y)
    model = {
        "gamma": float(svr.gamma if isinstance(svr.gamma, float) else svr._gamma),
        "rho": float(-svr.intercept_[0]),
        "sv": svr.support_vectors_.tolist(),
        "coeff": svr.dual_coef_[0].tolist(),
        "fmin": fmin.tolist(),
        "fmax": fmax.tolist(),
        "range": [0.0, 100.0],
        "provenance": "synthetic corpus v1 (tools/make_brisque_model.py)",
    }
    OUT.write_text(json.dumps(model) + "\n")
    pred = svr.predict(xs)
    print(f"train MAE {np.abs(pred - y).mean():.2f}; {len(svr.dual_coef_[0])} SVs -> {OUT}")


if __name__ == "__main__":
    main()
