"""Seeded procedural grayscale textures for experiments without real data."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

__all__ = ["FAMILIES", "texture_family", "save_pngs"]

FAMILIES = ("gratings", "blobs", "checkers")


def _gratings(rng, n, size):
    yy, xx = np.mgrid[0:size, 0:size] / size
    out = np.empty((n, size, size))
    for i in range(n):
        theta = rng.uniform(0, np.pi)
        freq = rng.uniform(2, 6)
        phase = rng.uniform(0, 2 * np.pi)
        wave = np.sin(2 * np.pi * freq * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)
        out[i] = 0.5 + 0.4 * wave + 0.05 * rng.standard_normal((size, size))
    return out


def _blobs(rng, n, size):
    yy, xx = np.mgrid[0:size, 0:size] / size
    out = np.empty((n, size, size))
    for i in range(n):
        img = np.full((size, size), 0.15)
        for _ in range(rng.integers(3, 7)):
            cx, cy = rng.uniform(0, 1, 2)
            r = rng.uniform(0.05, 0.2)
            img += rng.uniform(0.3, 0.7) * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * r * r))
        out[i] = img + 0.05 * rng.standard_normal((size, size))
    return out


def _checkers(rng, n, size):
    yy, xx = np.mgrid[0:size, 0:size]
    out = np.empty((n, size, size))
    for i in range(n):
        cell = int(rng.integers(4, 17))
        board = ((yy // cell + xx // cell) % 2).astype(float)
        out[i] = 0.2 + 0.6 * board + 0.05 * rng.standard_normal((size, size))
    return out


_GENERATORS = {"gratings": _gratings, "blobs": _blobs, "checkers": _checkers}


def texture_family(kind: str, n: int, size: int = 64, seed: int = 0) -> np.ndarray:
    """``n`` images of shape ``(size, size)`` with values clipped to [0, 1]."""
    if kind not in _GENERATORS:
        raise ValueError(f"unknown texture family {kind!r}; choose from {FAMILIES}")
    rng = np.random.default_rng(seed)
    return np.clip(_GENERATORS[kind](rng, n, size), 0.0, 1.0)


def save_pngs(images: np.ndarray, directory, prefix: str = "img") -> list[Path]:
    """Write 8-bit grayscale PNGs named ``<prefix>_00000.png`` and so on."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(images):
        p = directory / f"{prefix}_{i:05d}.png"
        Image.fromarray(np.round(img * 255).astype(np.uint8), mode="L").save(p)
        paths.append(p)
    return paths
