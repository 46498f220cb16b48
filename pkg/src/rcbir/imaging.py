"""2-D 8-bit grayscale images: loading, validation, histograms.

Everything downstream (thresholding, texture, indexing) works on the
``GrayImage`` defined here. Images are immutable after construction and
safe to share between threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import UnsupportedFormatError

GRAY_LEVELS = 256

# ITU-R 601 luminance weights, applied with round-half-up
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False)
class GrayImage:
    """A width x height raster of gray levels in [0, 255]."""

    pixels: np.ndarray  # shape (height, width), uint8, read-only

    def __post_init__(self):
        px = self.pixels
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D raster, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image dimensions must be >= 1, got {px.shape}")
        if px.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixels, got {px.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def levels(self) -> int:
        return GRAY_LEVELS


@dataclass(frozen=True, eq=False)
class Histogram:
    """Gray-level counts over the 256 levels of a source image."""

    counts: np.ndarray  # shape (256,), int64
    total: int

    def normalized(self) -> np.ndarray:
        """Counts as a probability distribution (sums to 1 for total > 0)."""
        if self.total == 0:
            return np.zeros(GRAY_LEVELS)
        return self.counts / self.total


def from_array(arr, copy: bool = True) -> GrayImage:
    """Build a GrayImage from any integer array with values in [0, 255]."""
    a = np.asarray(arr)
    if a.dtype != np.uint8:
        if not np.issubdtype(a.dtype, np.integer):
            raise ValueError(f"expected integer gray levels, got {a.dtype}")
        if a.size and (a.min() < 0 or a.max() > 255):
            raise ValueError("gray levels must lie in [0, 255]")
        a = a.astype(np.uint8)
    elif copy:
        a = a.copy()
    a.setflags(write=False)
    return GrayImage(a)


def _to_gray(img: Image.Image) -> np.ndarray:
    """Convert a PIL image of any supported mode to an 8-bit gray array."""
    mode = img.mode
    if mode == "L":
        return np.asarray(img, dtype=np.uint8)
    if mode == "1":
        return np.asarray(img, dtype=np.uint8) * 255
    if mode in ("I", "I;16", "I;16B", "I;16L"):
        # deeper-than-8-bit inputs: rescale by right shift
        a = np.asarray(img).astype(np.int64)
        return np.clip(a >> 8, 0, 255).astype(np.uint8)
    if mode in ("P", "RGB", "RGBA", "LA", "PA", "CMYK"):
        rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
        luma = np.floor(rgb @ _LUMA + 0.5)
        return np.clip(luma, 0, 255).astype(np.uint8)
    raise UnsupportedFormatError(f"unsupported raster mode {mode!r}")


def load_image(path) -> GrayImage:
    """Load PNG/GIF/BMP/PGM (and friends) as a validated GrayImage.

    Color inputs are reduced to luminance; palette and alpha variants are
    flattened through RGB first. Raises OSError for unreadable or truncated
    files and UnsupportedFormatError for rasters we cannot normalize.
    """
    path = os.fspath(path)
    try:
        with Image.open(path) as img:
            img.load()
            arr = _to_gray(img)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError(str(exc)) from exc
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return GrayImage(arr)


def histogram(img: GrayImage) -> Histogram:
    """Count pixels per gray level."""
    counts = np.bincount(img.pixels.ravel(), minlength=GRAY_LEVELS).astype(np.int64)
    counts.setflags(write=False)
    return Histogram(counts, int(counts.sum()))


def mean_gray(img: GrayImage) -> float:
    """Arithmetic mean over all pixels."""
    return float(img.pixels.mean(dtype=np.float64))


def encode_pgm(arr: np.ndarray) -> bytes:
    """Serialize a 2-D uint8 array as binary PGM (P5, maxval 255)."""
    a = np.ascontiguousarray(arr, dtype=np.uint8)
    if a.ndim != 2:
        raise ValueError("PGM output requires a 2-D raster")
    h, w = a.shape
    return b"P5\n%d %d\n255\n" % (w, h) + a.tobytes()


def save_pgm(arr: np.ndarray, path) -> None:
    """Write a 2-D uint8 array to a binary PGM file."""
    with open(path, "wb") as fh:
        fh.write(encode_pgm(arr))
