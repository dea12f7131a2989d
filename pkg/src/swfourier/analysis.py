"""Frequency spectrum, spatial power map and dispersion map of a SpaceTimeMatrix.

All three transform along time; the dispersion map additionally transforms
along x, which must be the propagation direction of the waves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpace, DegenerateTime, ShapeMismatch
from .ingest import SpaceTimeMatrix

SCALES = ("amplitude", "power", "db")
DETRENDS = ("none", "mean")
DB_FLOOR = -400.0

# rows per rfft batch in fft_spectrum; bounds the complex scratch buffer
_ROW_BLOCK = 4096


@dataclass(frozen=True)
class SpectrumResult:
    freqs: np.ndarray
    amplitude: np.ndarray


@dataclass(frozen=True)
class SpatialSpectrum:
    x_positions: np.ndarray
    freqs: np.ndarray
    power: np.ndarray  # (len(x_positions), len(freqs))


@dataclass(frozen=True)
class DispersionMap:
    k_axis: np.ndarray
    f_axis: np.ndarray
    magnitude: np.ndarray  # (len(f_axis), len(k_axis))


def apply_scale(values: np.ndarray, scale: str) -> np.ndarray:
    """Map non-negative magnitudes to the requested display scale.

    ``db`` is 20*log10 relative to the global maximum, floored at ``DB_FLOOR``.
    """
    if scale == "amplitude":
        return values
    if scale == "power":
        return values**2
    if scale == "db":
        peak = float(np.max(values)) if values.size else 0.0
        if peak == 0.0:
            return np.full_like(values, DB_FLOOR)
        with np.errstate(divide="ignore"):
            out = 20.0 * np.log10(values / peak)
        return np.maximum(out, DB_FLOOR)
    raise ValueError(f"scale must be one of {SCALES}, got {scale!r}")


def _time_length(cols: int, pad_to: int | None) -> int:
    if cols < 2:
        raise DegenerateTime(cols)
    if pad_to is None:
        return cols
    if pad_to < cols:
        raise ValueError(f"--pad-to {pad_to} is shorter than the {cols} time samples")
    return int(pad_to)


def _detrend(a: np.ndarray, detrend: str) -> np.ndarray:
    if detrend == "none":
        return a
    if detrend == "mean":
        return a - a.mean(axis=-1, keepdims=True)
    raise ValueError(f"detrend must be one of {DETRENDS}, got {detrend!r}")


def fft_spectrum(
    m: SpaceTimeMatrix,
    detrend: str = "none",
    pad_to: int | None = None,
    scale: str = "amplitude",
) -> SpectrumResult:
    """Row-averaged one-sided DFT magnitude over time, normalized to a peak of 1."""
    nt = _time_length(m.cols, pad_to)
    total = np.zeros(nt // 2 + 1)
    for r0 in range(0, m.rows, _ROW_BLOCK):
        block = _detrend(m.data[r0 : r0 + _ROW_BLOCK], detrend)
        total += np.abs(np.fft.rfft(block, n=nt, axis=1)).sum(axis=0)
    amplitude = total / m.rows
    peak = amplitude.max()
    if peak > 0:
        amplitude = amplitude / peak
    freqs = np.fft.rfftfreq(nt, d=m.dt)
    return SpectrumResult(freqs, apply_scale(amplitude, scale))


def spatial_spectrum(
    m: SpaceTimeMatrix,
    detrend: str = "none",
    pad_to: int | None = None,
    scale: str = "amplitude",
) -> SpatialSpectrum:
    """One-sided DFT magnitude per x position of the cross-section mean.

    No normalization across x, so decay along the propagation direction stays visible.
    """
    nt = _time_length(m.cols, pad_to)
    series = _detrend(m.cross_section_mean(), detrend)
    power = np.abs(np.fft.rfft(series, n=nt, axis=1))
    return SpatialSpectrum(
        x_positions=np.asarray(m.x_positions, dtype=np.float64),
        freqs=np.fft.rfftfreq(nt, d=m.dt),
        power=apply_scale(power, scale),
    )


def dft2_xt(a: np.ndarray) -> np.ndarray:
    """Full 2D DFT of an (x, t) array, unshifted.

    Time uses the usual exp(-i w t) kernel and x uses exp(+i k x), so a wave
    cos(w0 t - k0 x) travelling towards +x peaks at (+k0, +w0).
    """
    nx = a.shape[0]
    return np.fft.ifft(np.fft.fft(a, axis=1), axis=0) * nx


def dispersion(
    m: SpaceTimeMatrix,
    window: np.ndarray | None = None,
    detrend: str = "none",
    pad_to: int | None = None,
    scale: str = "amplitude",
) -> DispersionMap:
    """Magnitude of the (k, f) transform of the cross-section mean, f >= 0 only.

    The k axis is fftshifted: for even N_x, index 0 holds the most negative k.
    """
    sx = m.sel_shape[0]
    if sx < 2:
        raise DegenerateSpace(sx)
    nt = _time_length(m.cols, pad_to)
    a = _detrend(m.cross_section_mean(), detrend)
    if window is not None:
        window = np.asarray(window, dtype=np.float64)
        if window.shape != a.shape:
            raise ShapeMismatch(a.shape, window.shape)
        a = a * window
    if nt > a.shape[1]:
        a = np.pad(a, ((0, 0), (0, nt - a.shape[1])))
    spec = np.fft.fftshift(dft2_xt(a), axes=0)[:, : nt // 2 + 1]
    k_axis = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(sx, d=m.dx))
    f_axis = np.fft.rfftfreq(nt, d=m.dt)
    return DispersionMap(k_axis, f_axis, apply_scale(np.abs(spec).T, scale))
