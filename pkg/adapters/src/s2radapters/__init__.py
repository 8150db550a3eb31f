"""Adapters bridging neural checkpoints to the benchmark's file formats."""

from .features import extract_fid_features, extract_lpips_features
from .generate import generate_images
from .jobs import DEFAULT_PROMPT, AdapterError, AdapterJob
from .segment import export_segmentation

__all__ = [
    "AdapterError",
    "AdapterJob",
    "DEFAULT_PROMPT",
    "extract_fid_features",
    "extract_lpips_features",
    "generate_images",
    "export_segmentation",
]
