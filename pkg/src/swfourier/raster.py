"""Grayscale rendering of 2D maps, written as binary PGM (P5)."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np


def render_colormap(matrix: np.ndarray, scale: str = "linear") -> np.ndarray:
    """Return an 8-bit image of ``matrix`` with matrix row 0 at the bottom.

    Values are min-max scaled to 0..255, after ``log10(1 + x)`` when
    ``scale == "log"``. A constant matrix has no range and renders black.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("colormap input must be a non-empty 2D array")
    if scale == "log":
        a = np.log10(1.0 + a)
    elif scale != "linear":
        raise ValueError(f"scale must be 'linear' or 'log', got {scale!r}")
    lo, hi = float(a.min()), float(a.max())
    if hi > lo:
        img = np.rint((a - lo) * (255.0 / (hi - lo))).astype(np.uint8)
    else:
        img = np.zeros(a.shape, dtype=np.uint8)
    return img[::-1]


def write_pgm(path, image: np.ndarray) -> Path:
    path = Path(path)
    image = np.ascontiguousarray(image, dtype=np.uint8)
    h, w = image.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + image.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    """Read a P5 file written by :func:`write_pgm` (no comment lines)."""
    raw = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if m is None or int(m.group(3)) != 255:
        raise ValueError(f"{path}: not an 8-bit binary PGM")
    w, h = int(m.group(1)), int(m.group(2))
    return np.frombuffer(raw, dtype=np.uint8, count=w * h, offset=m.end()).reshape(h, w)
