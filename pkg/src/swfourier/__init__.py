"""Spin-wave Fourier analysis of OVF snapshot series and MuMax3 script sweeps."""

__version__ = "0.1.0"

from .analysis import DispersionMap, SpatialSpectrum, SpectrumResult, dispersion, fft_spectrum, spatial_spectrum
from .ingest import Roi, SpaceTimeMatrix, discover_files, ingest
from .ovf import Component, OvfHeader, ScalarSlab, parse_component, parse_header, read_component, read_header
from .window import chebyshev_window, window_2d

__all__ = [
    "Component",
    "DispersionMap",
    "OvfHeader",
    "Roi",
    "ScalarSlab",
    "SpaceTimeMatrix",
    "SpatialSpectrum",
    "SpectrumResult",
    "chebyshev_window",
    "discover_files",
    "dispersion",
    "fft_spectrum",
    "ingest",
    "parse_component",
    "parse_header",
    "read_component",
    "read_header",
    "spatial_spectrum",
    "window_2d",
]
