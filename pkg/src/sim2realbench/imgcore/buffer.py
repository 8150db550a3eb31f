"""Decoded raster buffers and PNG I/O.

Pixels live as float64 in the nominal [0, 255] range while computing;
8-bit (or 16-bit, for instance-ID maps) only at the file boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageDecodeError, ImageShapeError

# ITU-R BT.601 luma weights
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class ImageBuffer:
    """Row-major raster, 1 (luma) or 3 (RGB) channels, float64 samples."""

    width: int
    height: int
    channels: int
    data: np.ndarray  # shape (height, width, channels), float64

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ImageShapeError(f"degenerate image size {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise ImageShapeError(f"unsupported channel count {self.channels}")
        if self.data.shape != (self.height, self.width, self.channels):
            raise ImageShapeError(
                f"data shape {self.data.shape} inconsistent with "
                f"{self.width}x{self.height}x{self.channels}"
            )
        if not np.isfinite(self.data).all():
            raise ImageShapeError("non-finite pixel values")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ImageBuffer":
        """Wrap a (H, W) or (H, W, C) array, copying to float64."""
        a = np.asarray(arr, dtype=np.float64)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3:
            raise ImageShapeError(f"expected 2-D or 3-D array, got shape {arr.shape}")
        h, w, c = a.shape
        return cls(width=w, height=h, channels=c, data=np.ascontiguousarray(a))

    def plane(self) -> np.ndarray:
        """The single channel as a (H, W) view; requires channels == 1."""
        if self.channels != 1:
            raise ImageShapeError(f"expected 1 channel, got {self.channels}")
        return self.data[:, :, 0]


def load_png(path, instance_ids: bool = False) -> ImageBuffer:
    """Decode an 8-bit gray/RGB PNG (or 16-bit gray when ``instance_ids``).

    Returns exact pixel values as float64.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("L", "RGB"):
                arr = np.asarray(im)
            elif mode in ("I", "I;16") and instance_ids:
                arr = np.asarray(im, dtype=np.int64)
            elif mode in ("I", "I;16"):
                raise ImageDecodeError(
                    f"{path}: 16-bit PNG only supported in instance-ID mode"
                )
            elif mode == "P":
                arr = np.asarray(im.convert("RGB"))
            else:
                raise ImageDecodeError(f"{path}: unsupported PNG mode {mode!r}")
    except FileNotFoundError:
        raise ImageDecodeError(f"{path}: file not found")
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageDecodeError(f"{path}: malformed PNG ({exc})")
    return ImageBuffer.from_array(arr)


def save_png(img: ImageBuffer, path, instance_ids: bool = False) -> None:
    """Encode to PNG; values are rounded and clipped to the target bit depth."""
    path = Path(path)
    if instance_ids:
        if img.channels != 1:
            raise ImageShapeError("instance-ID PNGs are single channel")
        arr = np.rint(img.plane())
        if arr.min() < 0 or arr.max() > 0xFFFF:
            raise ImageShapeError("instance ids outside the 16-bit range")
        Image.fromarray(arr.astype(np.uint16)).save(path, format="PNG")
        return
    arr = np.clip(np.rint(img.data), 0, 255).astype(np.uint8)
    if img.channels == 1:
        Image.fromarray(arr[:, :, 0], mode="L").save(path, format="PNG")
    else:
        Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def to_luma(img: ImageBuffer) -> ImageBuffer:
    """BT.601 luma, unrounded float64."""
    if img.channels != 3:
        raise ImageShapeError(f"to_luma expects 3 channels, got {img.channels}")
    y = img.data @ _LUMA_WEIGHTS
    return ImageBuffer.from_array(y)
