"""Full-reference metrics against closed forms and brute-force oracles."""

import numpy as np
import pytest
from scipy.stats import spearmanr

from sim2realbench.friqa import (
    FeatureError,
    LayerFeatures,
    cw_ssim,
    fsim,
    load_layer_features,
    load_lpips_weights,
    lpips_from_features,
    ms_ssim,
    psnr,
    ssim,
)
from sim2realbench.friqa.psnr_ssim import SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW
from sim2realbench.fvec import write_fvec
from sim2realbench.imgcore import ImageBuffer, gaussian_filter_plane
from sim2realbench.imgcore.errors import ImageShapeError

from synth import natural_image, noisy


# ----------------------------------------------------------------- oracles

def reflect101(i, n):
    period = 2 * (n - 1)
    i = i % period
    return i if i < n else period - i


def ssim_oracle(a: np.ndarray, b: np.ndarray) -> float:
    """Direct per-window SSIM with explicit reflect-101 indexing."""
    r = SSIM_WINDOW // 2
    t = np.exp(-(np.arange(-r, r + 1) ** 2) / (2 * SSIM_SIGMA**2))
    t /= t.sum()
    w = np.outer(t, t)
    h, wdt = a.shape
    total = 0.0
    for y in range(h):
        for x in range(wdt):
            wa = np.empty((SSIM_WINDOW, SSIM_WINDOW))
            wb = np.empty((SSIM_WINDOW, SSIM_WINDOW))
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    yy = reflect101(y + dy, h)
                    xx = reflect101(x + dx, wdt)
                    wa[dy + r, dx + r] = a[yy, xx]
                    wb[dy + r, dx + r] = b[yy, xx]
            mu_a = (w * wa).sum()
            mu_b = (w * wb).sum()
            var_a = (w * wa * wa).sum() - mu_a**2
            var_b = (w * wb * wb).sum() - mu_b**2
            cov = (w * wa * wb).sum() - mu_a * mu_b
            lum = (2 * mu_a * mu_b + SSIM_C1) / (mu_a**2 + mu_b**2 + SSIM_C1)
            cs = (2 * cov + SSIM_C2) / (var_a + var_b + SSIM_C2)
            total += lum * cs
    return total / (h * wdt)


def lpips_oracle(fa, fb, weights) -> float:
    """Scalar-loop evaluation of the normalized weighted feature distance."""
    total = 0.0
    for la, lb, w in zip(fa.layers, fb.layers, weights):
        c, h, wdt = la.shape
        layer_sum = 0.0
        for y in range(h):
            for x in range(wdt):
                na = sum(la[k, y, x] ** 2 for k in range(c)) ** 0.5 + 1e-10
                nb = sum(lb[k, y, x] ** 2 for k in range(c)) ** 0.5 + 1e-10
                for k in range(c):
                    d = la[k, y, x] / na - lb[k, y, x] / nb
                    layer_sum += w[k] * d * d
        total += layer_sum / (h * wdt)
    return total


# -------------------------------------------------------------------- psnr

def test_psnr_examples(scene):
    assert psnr(scene, scene).value == 100.0
    shifted = ImageBuffer.from_array(scene.data[:, :, 0] + 1.0)
    assert psnr(scene, shifted).value == pytest.approx(48.1308, abs=1e-3)
    black = ImageBuffer.from_array(np.zeros((8, 8)))
    white = ImageBuffer.from_array(np.full((8, 8), 255.0))
    assert psnr(black, white).value == pytest.approx(0.0, abs=1e-9)


def test_psnr_mismatch():
    with pytest.raises(ImageShapeError, match="pair mismatch"):
        psnr(ImageBuffer.from_array(np.zeros((4, 4))), ImageBuffer.from_array(np.zeros((4, 5))))


# -------------------------------------------------------------------- ssim

def test_ssim_identity(scene):
    assert ssim(scene, scene).value == pytest.approx(1.0, abs=1e-12)


def test_ssim_constant_pair_luminance_only():
    a = ImageBuffer.from_array(np.full((16, 16), 100.0))
    b = ImageBuffer.from_array(np.full((16, 16), 200.0))
    assert ssim(a, b).value == pytest.approx(0.80001, abs=1e-4)


def test_ssim_matches_bruteforce_oracle():
    for seed in range(5):
        rs = np.random.RandomState(seed)
        a = rs.rand(32, 32) * 255
        b = np.clip(a + rs.randn(32, 32) * 12, 0, 255)
        got = ssim(ImageBuffer.from_array(a), ImageBuffer.from_array(b)).value
        assert got == pytest.approx(ssim_oracle(a, b), abs=1e-9)


def test_ssim_too_small():
    with pytest.raises(ImageShapeError, match="window"):
        ssim(ImageBuffer.from_array(np.zeros((8, 8))), ImageBuffer.from_array(np.zeros((8, 8))))


def test_ssim_symmetry(scene):
    b = noisy(scene, 10, seed=3)
    assert ssim(scene, b).value == pytest.approx(ssim(b, scene).value, abs=1e-12)


# ----------------------------------------------------------------- ms_ssim

def test_ms_ssim_identity(scene):
    assert ms_ssim(scene, scene).value == pytest.approx(1.0, abs=1e-12)


def test_ms_ssim_tiny_noise_band(scene):
    value = ms_ssim(scene, noisy(scene, 1.0)).value
    assert 0.9 < value < 1.0


def test_ms_ssim_rank_agreement_with_ssim(scene):
    sigmas = np.linspace(1.0, 20.0, 10)
    s1 = [ssim(scene, noisy(scene, s, seed=i)).value for i, s in enumerate(sigmas)]
    s2 = [ms_ssim(scene, noisy(scene, s, seed=i)).value for i, s in enumerate(sigmas)]
    rho = spearmanr(s1, s2).statistic
    assert rho > 0.9


def test_ms_ssim_too_small():
    img = ImageBuffer.from_array(np.zeros((64, 64)))
    with pytest.raises(ImageShapeError, match="5-scale"):
        ms_ssim(img, img)


# ----------------------------------------------------------------- cw_ssim

def test_cw_ssim_identity(scene):
    assert cw_ssim(scene, scene).value == pytest.approx(1.0, abs=1e-6)


def test_cw_ssim_shift_robustness():
    wins = 0
    for seed in range(20):
        big = natural_image(100 + seed, 160, 160)
        a = ImageBuffer.from_array(big.data[8:136, 8:136, 0])
        b = ImageBuffer.from_array(big.data[8:136, 9:137, 0])
        if cw_ssim(a, b).value > ssim(a, b).value:
            wins += 1
    assert wins == 20


def test_cw_ssim_inversion_degrades(scene):
    inverted = ImageBuffer.from_array(255.0 - scene.data[:, :, 0])
    assert cw_ssim(scene, inverted).value < cw_ssim(scene, scene).value


def test_cw_ssim_symmetry(scene):
    b = noisy(scene, 8, seed=5)
    assert cw_ssim(scene, b).value == pytest.approx(cw_ssim(b, scene).value, abs=1e-12)


def test_cw_ssim_too_small():
    img = ImageBuffer.from_array(np.zeros((64, 64)))
    with pytest.raises(ImageShapeError, match="decomposition"):
        cw_ssim(img, img)


# -------------------------------------------------------------------- fsim

def test_fsim_identity(scene):
    assert fsim(scene, scene).value == pytest.approx(1.0, abs=1e-6)


def test_fsim_blur_monotone(scene):
    plane = scene.data[:, :, 0]
    mild = ImageBuffer.from_array(gaussian_filter_plane(plane, 7, 1.0))
    heavy = ImageBuffer.from_array(gaussian_filter_plane(plane, 31, 5.0))
    assert fsim(scene, heavy).value < fsim(scene, mild).value


def test_fsim_constant_pair_guard():
    a = ImageBuffer.from_array(np.full((32, 32), 80.0))
    b = ImageBuffer.from_array(np.full((32, 32), 80.0))
    assert fsim(a, b).value == 1.0


def test_fsim_symmetry(scene):
    b = noisy(scene, 6, seed=2)
    assert fsim(scene, b).value == pytest.approx(fsim(b, scene).value, abs=1e-12)


# ------------------------------------------------------- degradation ladder

def test_fr_metrics_noise_monotone(scene):
    values = {m: [] for m in ("psnr", "ssim", "ms_ssim", "cw_ssim", "fsim")}
    for sigma in (1, 2, 4, 8, 16):
        b = noisy(scene, sigma, seed=0)
        values["psnr"].append(psnr(scene, b).value)
        values["ssim"].append(ssim(scene, b).value)
        values["ms_ssim"].append(ms_ssim(scene, b).value)
        values["cw_ssim"].append(cw_ssim(scene, b).value)
        values["fsim"].append(fsim(scene, b).value)
    for metric, vals in values.items():
        assert all(x > y for x, y in zip(vals, vals[1:])), (metric, vals)


# ------------------------------------------------------------------- lpips

def rand_features(seed, shapes=((3, 4, 5), (6, 2, 3))):
    rs = np.random.RandomState(seed)
    return LayerFeatures(layers=tuple(rs.randn(*s) for s in shapes))


def test_lpips_identity():
    fa = rand_features(0)
    assert lpips_from_features(fa, fa).value == pytest.approx(0.0, abs=1e-9)


def test_lpips_sign_collapse():
    fa = LayerFeatures(layers=(np.full((1, 1, 1), 3.0),))
    fb = LayerFeatures(layers=(np.full((1, 1, 1), 4.0),))
    assert lpips_from_features(fa, fb).value == pytest.approx(0.0, abs=1e-9)


def test_lpips_matches_scalar_oracle():
    fa, fb = rand_features(1), rand_features(2)
    weights = [np.ones(3), np.ones(6)]
    got = lpips_from_features(fa, fb, weights).value
    assert got == pytest.approx(lpips_oracle(fa, fb, weights), abs=1e-6)


def test_lpips_weighted_matches_oracle():
    rs = np.random.RandomState(3)
    fa, fb = rand_features(4), rand_features(5)
    weights = [rs.rand(3), rs.rand(6)]
    got = lpips_from_features(fa, fb, weights).value
    assert got == pytest.approx(lpips_oracle(fa, fb, weights), abs=1e-6)


def test_lpips_error_paths():
    fa = rand_features(0)
    fb = rand_features(1, shapes=((3, 4, 4), (6, 2, 3)))
    with pytest.raises(FeatureError, match="shape mismatch"):
        lpips_from_features(fa, fb)
    with pytest.raises(FeatureError, match="weight"):
        lpips_from_features(fa, fa, [np.ones(2), np.ones(6)])
    with pytest.raises(FeatureError, match="negative"):
        lpips_from_features(fa, fa, [-np.ones(3), np.ones(6)])


def test_lpips_file_roundtrip(tmp_path):
    import json

    fa = rand_features(7)
    doc = {"image_id": "img0", "layers": []}
    for i, layer in enumerate(fa.layers):
        c, h, w = layer.shape
        fname = f"layer{i}.fvec"
        write_fvec(tmp_path / fname, layer.reshape(c, h * w).T)
        doc["layers"].append(
            {"channels": c, "height": h, "width": w, "file": fname}
        )
    sidecar = tmp_path / "img0.json"
    sidecar.write_text(json.dumps(doc))
    loaded = load_layer_features(sidecar)
    assert loaded.source_image_id == "img0"
    assert loaded.shapes() == fa.shapes()
    # float32 storage: compare at storage precision
    score = lpips_from_features(
        loaded,
        LayerFeatures(layers=tuple(l.astype(np.float32).astype(np.float64) for l in fa.layers)),
    )
    assert score.value == pytest.approx(0.0, abs=1e-9)

    weights_doc = {"layers": [{"channels": 3, "weights": [1, 1, 1]},
                              {"channels": 6, "weights": [0.5] * 6}]}
    wp = tmp_path / "weights.json"
    wp.write_text(json.dumps(weights_doc))
    weights = load_lpips_weights(wp)
    assert [w.size for w in weights] == [3, 6]

    bad = {"layers": [{"channels": 3, "weights": [1, -1, 1]}]}
    wp.write_text(json.dumps(bad))
    with pytest.raises(FeatureError, match="negative"):
        load_lpips_weights(wp)
