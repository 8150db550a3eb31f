from .buffer import ImageBuffer, load_png, save_png, to_luma
from .errors import ImageDecodeError, ImageError, ImageShapeError
from .filters import (
    HAVE_NATIVE,
    Kernel2D,
    convolve2d,
    downsample2,
    gaussian_filter_plane,
    gaussian_kernel,
    gaussian_taps,
)
from .resample import resize

__all__ = [
    "ImageBuffer",
    "ImageDecodeError",
    "ImageError",
    "ImageShapeError",
    "Kernel2D",
    "HAVE_NATIVE",
    "convolve2d",
    "downsample2",
    "gaussian_filter_plane",
    "gaussian_kernel",
    "gaussian_taps",
    "load_png",
    "save_png",
    "to_luma",
    "resize",
]
