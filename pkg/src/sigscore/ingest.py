"""Loading image directories into normalised pixel arrays and streams.

Preprocessing is pinned so that two runs (or two implementations) agree bit
for bit: 8-bit samples are divided by 255 and 16-bit samples by 65535, colour
goes to grayscale with the Rec. 601 luma weights, and resizing is plain
bilinear interpolation on half-pixel centres without antialiasing.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ._parallel import ordered_map
from .signature import Stream
from .tensor_algebra import ContractError

__all__ = [
    "EXTENSIONS",
    "CorruptImageError",
    "ImageRecord",
    "ImageSet",
    "scan_directory",
    "load_image",
    "to_grayscale",
    "resize",
    "preprocess",
    "image_to_stream",
    "load_directory",
]

log = logging.getLogger(__name__)

EXTENSIONS = frozenset({".png", ".jpg", ".jpeg"})

LUMA_R, LUMA_B = 0.299, 0.114


class CorruptImageError(OSError):
    pass


@dataclass(eq=False)
class ImageRecord:
    source_path: str
    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim == 2:
            p = p[:, :, None]
        if p.ndim != 3 or p.shape[2] not in (1, 3) or min(p.shape[:2]) < 1:
            raise ContractError(f"{self.source_path}: unsupported pixel shape {self.pixels.shape}")
        self.pixels = p

    @cached_property
    def descriptor(self) -> float:
        return float(self.pixels.mean())


def scan_directory(path) -> list[Path]:
    """Image files under ``path`` (recursive), sorted by the bytes of their full path."""
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    found = []

    def onerror(exc):
        raise exc

    for dirpath, _dirnames, filenames in os.walk(root, onerror=onerror):
        for name in filenames:
            if os.path.splitext(name)[1].lower() in EXTENSIONS:
                found.append(Path(dirpath) / name)
    return sorted(found, key=os.fsencode)


def _decode(img: Image.Image) -> np.ndarray:
    mode = img.mode
    if mode.startswith("I;16"):
        return np.asarray(img, dtype=np.uint16).astype(np.float64) / 65535.0
    if mode == "I":
        raw = np.asarray(img, dtype=np.int64)
        if raw.min() < 0 or raw.max() > 65535:
            raise ValueError("32-bit integer image outside the 16-bit range")
        return raw.astype(np.float64) / 65535.0
    if mode in ("L", "RGB"):
        return np.asarray(img, dtype=np.uint8).astype(np.float64) / 255.0
    if mode in ("1", "LA"):
        return _decode(img.convert("L"))
    if mode in ("P", "PA", "RGBA", "RGBX", "CMYK", "YCbCr", "LAB", "HSV"):
        return _decode(img.convert("RGB"))
    raise ValueError(f"unsupported image mode {mode}")


def load_image(path) -> ImageRecord:
    """Decode one PNG/JPEG into an ``h x w x c`` float array in [0, 1]."""
    path = str(path)
    try:
        with Image.open(path) as img:
            img.load()
            pixels = _decode(img)
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise CorruptImageError(f"cannot decode {path}: {exc}") from exc
    if not np.all(np.isfinite(pixels)):
        raise CorruptImageError(f"cannot decode {path}: non-finite pixel values")
    return ImageRecord(path, pixels)


def to_grayscale(pixels) -> np.ndarray:
    """Rec. 601 luma ``0.299 R + 0.587 G + 0.114 B``; single-channel input is returned as is.

    Written as ``G + 0.299 (R - G) + 0.114 (B - G)`` so neutral greys,
    white included, map to themselves exactly.
    """
    p = np.asarray(pixels, dtype=np.float64)
    if p.ndim == 2:
        return p
    if p.ndim != 3 or p.shape[2] not in (1, 3):
        raise ContractError(f"expected 1 or 3 channels, got shape {p.shape}")
    if p.shape[2] == 1:
        return p[:, :, 0]
    r, g, b = p[:, :, 0], p[:, :, 1], p[:, :, 2]
    return np.clip(g + LUMA_R * (r - g) + LUMA_B * (b - g), 0.0, 1.0)


def _axis_weights(n_in: int, n_out: int):
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, src - lo


def resize(pixels, size) -> np.ndarray:
    """Bilinear resize of a 2-D array to ``size`` (int for square, or ``(h, w)``)."""
    p = np.asarray(pixels, dtype=np.float64)
    if p.ndim != 2 or min(p.shape) < 1:
        raise ContractError(f"resize expects a non-empty 2-D array, got shape {p.shape}")
    out_h, out_w = (size, size) if np.isscalar(size) else size
    if out_h <= 0 or out_w <= 0:
        raise ContractError(f"target size must be positive, got {size}")
    if p.shape == (out_h, out_w):
        return p.copy()
    lo, hi, w = _axis_weights(p.shape[0], out_h)
    rows = p[lo] + w[:, None] * (p[hi] - p[lo])
    lo, hi, w = _axis_weights(p.shape[1], out_w)
    out = rows[:, lo] + w[None, :] * (rows[:, hi] - rows[:, lo])
    return np.clip(out, 0.0, 1.0)


def preprocess(pixels, size: int = 64) -> np.ndarray:
    return resize(to_grayscale(pixels), size)


def image_to_stream(image, column_mode: bool = False) -> Stream:
    """Square grayscale image as a stream of ``s`` points in R^s.

    Rows, top to bottom, are the successive points; ``column_mode`` uses the
    columns left to right instead.
    """
    if isinstance(image, ImageRecord):
        image = image.pixels
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 3 and img.shape[2] == 1:
        img = img[:, :, 0]
    if img.ndim != 2:
        raise ContractError(f"image_to_stream needs a grayscale image, got shape {img.shape}")
    if img.shape[0] != img.shape[1]:
        raise ContractError(f"image_to_stream needs a square image, got shape {img.shape}")
    return Stream(img.T if column_mode else img)


@dataclass
class ImageSet:
    """Preprocessed images of one directory, in scan order."""

    root: str
    paths: list[str]
    images: np.ndarray
    descriptors: np.ndarray
    skipped: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.paths)

    def streams(self, column_mode: bool = False) -> list[Stream]:
        return [image_to_stream(img, column_mode) for img in self.images]

    def flat(self) -> np.ndarray:
        return self.images.reshape(len(self), -1)

    def relative_ids(self) -> list[str]:
        return [Path(p).relative_to(self.root).as_posix() for p in self.paths]


def load_directory(path, size: int = 64, skip_corrupt: bool = False,
                   threads: int | None = None) -> ImageSet:
    """Decode, grayscale and resize every image under ``path``.

    The mean-intensity descriptor is taken at full resolution before any
    preprocessing.  A file that fails to decode aborts the load unless
    ``skip_corrupt`` is set, in which case it is logged and left out.
    """
    files = scan_directory(path)

    def work(f):
        try:
            rec = load_image(f)
        except CorruptImageError as exc:
            if not skip_corrupt:
                raise
            log.warning("skipping %s", exc)
            return str(f), None, None
        return rec.source_path, preprocess(rec.pixels, size), rec.descriptor

    paths, images, descriptors, skipped = [], [], [], []
    for p, img, desc in ordered_map(work, files, threads):
        if img is None:
            skipped.append(p)
            continue
        paths.append(p)
        images.append(img)
        descriptors.append(desc)
    stack = np.stack(images) if images else np.zeros((0, size, size))
    return ImageSet(str(Path(path)), paths, stack, np.asarray(descriptors, dtype=np.float64),
                    skipped)
