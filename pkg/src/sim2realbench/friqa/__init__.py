from .scores import FRScore, Metric
from .psnr_ssim import psnr, ssim, ms_ssim
from .cwssim import cw_ssim
from .fsim import fsim
from .lpips import (
    FeatureError,
    LayerFeatures,
    lpips_from_features,
    load_lpips_weights,
    load_layer_features,
)

__all__ = [
    "FRScore",
    "FeatureError",
    "Metric",
    "psnr",
    "ssim",
    "ms_ssim",
    "cw_ssim",
    "fsim",
    "LayerFeatures",
    "lpips_from_features",
    "load_lpips_weights",
    "load_layer_features",
]
