"""Dolph-Chebyshev tapers for the dispersion transform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadAttenuation, BadLength

DEFAULT_ATTENUATION_DB = 100.0


@dataclass(frozen=True)
class Window1D:
    length: int
    attenuation_db: float
    weights: np.ndarray


def _chebyshev_poly(order: int, x: np.ndarray) -> np.ndarray:
    """Chebyshev polynomial of the first kind, valid for any real x."""
    out = np.empty_like(x)
    inner = np.abs(x) <= 1
    out[inner] = np.cos(order * np.arccos(x[inner]))
    hi = x > 1
    out[hi] = np.cosh(order * np.arccosh(x[hi]))
    lo = x < -1
    out[lo] = (-1) ** order * np.cosh(order * np.arccosh(-x[lo]))
    return out


def chebyshev_window(length: int, attenuation_db: float = DEFAULT_ATTENUATION_DB) -> Window1D:
    """Symmetric Dolph-Chebyshev window with all sidelobes ``attenuation_db`` below the mainlobe.

    The frequency response is the Chebyshev polynomial T_{M-1} sampled on M
    points; an inverse DFT gives the taper. Even lengths take a half-sample
    phase shift so the result is symmetric about the centre.
    """
    if int(length) != length or length < 2:
        raise BadLength(length)
    if not attenuation_db > 0:
        raise BadAttenuation(attenuation_db)
    m = int(length)
    order = m - 1
    r = 10.0 ** (attenuation_db / 20.0)
    beta = np.cosh(np.arccosh(r) / order)
    k = np.arange(m)
    response = _chebyshev_poly(order, beta * np.cos(np.pi * k / m))
    if m % 2:
        w = np.real(np.fft.fft(response))
        half = (m + 1) // 2
        w = np.concatenate((w[half - 1 : 0 : -1], w[:half]))
    else:
        w = np.real(np.fft.fft(response * np.exp(1j * np.pi * k / m)))
        half = m // 2 + 1
        w = np.concatenate((w[half - 1 : 0 : -1], w[1:half]))
    w = w / np.max(w)
    # enforce exact symmetry; the two halves agree to rounding anyway
    w = 0.5 * (w + w[::-1])
    w.flags.writeable = False
    return Window1D(m, float(attenuation_db), w)


def window_2d(wt: Window1D, wx: Window1D) -> np.ndarray:
    """Outer-product taper for an (x, t) array: ``W[i, j] = wx[i] * wt[j]``."""
    return np.outer(wx.weights, wt.weights)
