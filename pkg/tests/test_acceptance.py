"""Exit criteria. Each test records a ``criterion`` property; the terminal
summary prints one PASS/FAIL/SKIP line per criterion."""

import os
import re
import time
from pathlib import Path

import numpy as np
import pytest

from oracles import naive_dispersion, naive_onesided_magnitude, rel_err, signed_bins
from swfourier.analysis import dispersion, fft_spectrum, spatial_spectrum
from swfourier.ingest import Roi, discover_files, ingest
from swfourier.ovf import Component
from swfourier.scriptgen import generate
from swfourier.synth import PlaneWaveSpec, Wave, synth_dataset
from swfourier.window import chebyshev_window, window_2d

from conftest import make_matrix
from test_scriptgen import EXAMPLE, GOLDEN
from test_window import sidelobe_peaks

ROOT = Path(__file__).resolve().parents[1]


def _peak(d):
    fi, ki = np.unravel_index(np.argmax(d.magnitude), d.magnitude.shape)
    return fi, ki


def test_1_plane_wave_dispersion(tmp_path, record_property):
    record_property("criterion", "1 plane-wave dispersion lands on (+k0, f0) and (-k0, f0), exact bin, < 10 s")
    start = time.perf_counter()
    nx, nt, dt, cx = 512, 256, 1e-12, 1.5e-9
    b, c = 40, 24
    f0, k0 = b / (nt * dt), 2 * np.pi * c / (nx * cx)
    for sign, name in ((+1, "fwd"), (-1, "back")):
        spec = PlaneWaveSpec((nx, 1, 1), (cx, cx, 1e-8), nt, dt, (Wave(1.0, f0, sign * k0, 0.0, Component.Y),))
        files = synth_dataset(spec, tmp_path / name)
        d = dispersion(ingest(discover_files(tmp_path / name), Component.Y))
        fi, ki = _peak(d)
        assert fi == b
        assert signed_bins(nx)[ki] == sign * c
        assert d.k_axis[ki] == pytest.approx(sign * k0, rel=1e-12)
        assert d.f_axis[fi] == pytest.approx(f0, rel=1e-12)
        assert len(files) == nt
    assert time.perf_counter() - start < 10.0


def test_2_brute_force_dft_equivalence(record_property):
    record_property("criterion", "2 fft/spectrum/dispersion equal naive DFT for random matrices <= 16x16, rel err < 1e-9, < 30 s")
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    shapes = [(2, 2), (2, 16), (16, 2), (5, 7), (8, 8), (13, 16), (16, 11), (16, 16)]
    shapes += [tuple(rng.integers(2, 17, size=2)) for _ in range(8)]
    for sx, nt in shapes:
        a = rng.normal(size=(sx, nt))
        m = make_matrix(a)
        rows = np.array([naive_onesided_magnitude(r) for r in a])
        mean = rows.mean(axis=0)
        assert rel_err(fft_spectrum(m).amplitude, mean / mean.max()) < 1e-9
        assert rel_err(spatial_spectrum(m).power, rows) < 1e-9
        assert rel_err(dispersion(m).magnitude, naive_dispersion(a)) < 1e-9
    assert time.perf_counter() - start < 30.0


def test_3_chebyshev_window_spec(record_property):
    record_property("criterion", "3 chebyshev_window(64, 100 dB): sidelobes -100 +/- 0.5 dB, equiripple std < 0.1 dB")
    peaks = sidelobe_peaks(chebyshev_window(64, 100.0).weights, nfft=8192)
    assert abs(peaks.max() + 100.0) <= 0.5
    assert abs(peaks.min() + 100.0) <= 0.5
    assert np.std(peaks) < 0.1


def test_4_window_concentration(record_property):
    record_property("criterion", "4 windowed dispersion is more concentrated within +/-2 bins of an off-bin wave")
    nx, nt, dt, dx = 128, 256, 1e-12, 1.5e-9
    # off-bin on both axes
    f0, k0 = 37.4 / (nt * dt), 2 * np.pi * 11.6 / (nx * dx)
    x = (0.5 + np.arange(nx))[:, None] * dx
    t = np.arange(nt)[None, :] * dt
    m = make_matrix(np.cos(2 * np.pi * f0 * t - k0 * x), dt=dt, dx=dx)
    plain = dispersion(m)
    windowed = dispersion(m, window=window_2d(chebyshev_window(nt, 100.0), chebyshev_window(nx, 100.0)))
    fi = int(np.argmin(np.abs(plain.f_axis - f0)))
    ki = int(np.argmin(np.abs(plain.k_axis - k0)))

    def fraction(mag):
        e = mag**2
        return e[fi - 2 : fi + 3, ki - 2 : ki + 3].sum() / e.sum()

    assert fraction(windowed.magnitude) > fraction(plain.magnitude)


# --- criterion 5: large dataset ------------------------------------------------

LARGE_FILES = 1000
LARGE_GRID = (200, 100, 1)
ONE_GB = 1 << 30


@pytest.fixture(scope="module")
def large_dataset(tmp_path_factory):
    d = tmp_path_factory.mktemp("large")
    dt, cx = 1e-12, 1.5e-9
    waves = (
        Wave(1.0, 1.0e11, 2e8, 0.1, Component.X),
        Wave(0.5, 2.3e11, -1e8, 0.7, Component.Y),
        Wave(0.8, 0.6e11, 4e8, 1.3, Component.Z),
    )
    spec = PlaneWaveSpec(LARGE_GRID, (cx, cx, 1e-8), LARGE_FILES, dt, waves, noise_sigma=0.01, seed=5)
    files = synth_dataset(spec, d, workers=os.cpu_count() or 1)
    return files


@pytest.mark.slow
def test_5a_parallel_determinism(large_dataset, record_property):
    record_property("criterion", "5a ingest of >= 1000 files (>= 1 GiB) is byte-identical for workers 1, 2, 4")
    assert len(large_dataset) >= 1000
    assert sum(f.stat().st_size for f in large_dataset) >= ONE_GB
    ref = ingest(large_dataset, Component.Y, workers=1).data.tobytes()
    for w in (2, 4):
        assert ingest(large_dataset, Component.Y, workers=w).data.tobytes() == ref


@pytest.mark.slow
def test_5b_parallel_scaling(large_dataset, record_property):
    record_property("criterion", "5b workers=4 wall time <= 0.6 x workers=1 (needs >= 4 cores)")
    cores = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    if cores < 4:
        pytest.skip(f"scaling criterion is defined on >= 4 cores; this machine has {cores}")
    ingest(large_dataset[:50], Component.Y, workers=4)  # warm the page cache path
    t0 = time.perf_counter()
    ingest(large_dataset, Component.Y, workers=1)
    single = time.perf_counter() - t0
    t0 = time.perf_counter()
    ingest(large_dataset, Component.Y, workers=4)
    quad = time.perf_counter() - t0
    print(f"workers=1 {single:.2f} s, workers=4 {quad:.2f} s, ratio {quad / single:.2f}")
    assert quad <= 0.6 * single


def test_6_script_generation(tmp_path, record_property):
    record_property("criterion", "6 example sweep writes 90 scripts incl. byte-identical e_1000_20_1_1.0e+00_1.0e+11.txt")
    names = generate(EXAMPLE, tmp_path)
    assert len(names) == 90
    assert len(list(tmp_path.glob("*.txt"))) == 90
    assert (tmp_path / "e_1000_20_1_1.0e+00_1.0e+11.txt").read_bytes() == GOLDEN.read_bytes()


def test_7_waveguide_recipe_documented(record_property):
    record_property("criterion", "7 band-gap reproduction needs MuMax3 + GPU; recipe documented, golden script carries the model")
    recipe = (ROOT / "docs" / "waveguide_recipe.md").read_text()
    for cmd in ("swfourier generate", "mumax3", "swfourier fft", "swfourier spectrum", "swfourier dispersion"):
        assert cmd in recipe
    script = GOLDEN.read_text()
    assert "Msat = 8.6e5" in script and "Aex = 1.3e-11" in script and "alpha = 0.01" in script
    assert "SetCellSize(1.5e-09, 1.5e-09, 1e-08)" in script
    assert re.search(r"1\.0e\+00\*sinc\(2\*pi\*1\.0e\+11\*\(t\+1e-13\)\)", script)
    assert "OutputFormat = OVF2_TEXT" in script


def test_8_ovf_round_trip(tmp_path, record_property):
    record_property("criterion", "8 ingest(synth) equals the closed-form signal on random ROIs, 100 specs, rel err < 1e-12, < 20 s")
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    worst = 0.0
    for case in range(100):
        grid = tuple(int(v) for v in rng.integers(1, [9, 5, 4]))
        cell = tuple(float(v) for v in rng.uniform(0.5e-9, 5e-9, 3))
        frames = int(rng.integers(2, 9))
        dt = float(rng.uniform(0.5e-12, 5e-12))
        comp = Component(int(rng.integers(0, 3)))
        waves = []
        for _ in range(int(rng.integers(1, 4))):
            waves.append(
                Wave(
                    float(rng.uniform(-2, 2)),
                    float(rng.uniform(-0.49, 0.49) / dt),
                    float(rng.uniform(-0.99, 0.99) * np.pi / cell[0]),
                    float(rng.uniform(0, 2 * np.pi)),
                    Component(int(rng.integers(0, 3))),
                )
            )
        spec = PlaneWaveSpec(grid, cell, frames, dt, tuple(waves))
        files = synth_dataset(spec, tmp_path / f"c{case}")

        bounds = []
        for extent in (frames, *grid):
            lo = int(rng.integers(0, extent))
            bounds.append((lo, int(rng.integers(lo + 1, extent + 1))))
        roi = Roi(*bounds)
        got = ingest(files, comp, roi).data

        (t0, t1), (x0, x1), (y0, y1), (z0, z1) = bounds
        want = np.zeros((z1 - z0, y1 - y0, x1 - x0, t1 - t0))
        xs = 0.5 * cell[0] + np.arange(x0, x1) * cell[0]
        ts = np.arange(t0, t1) * dt
        for w in waves:
            if w.component == comp:
                want += w.amplitude * np.cos(2 * np.pi * w.f0 * ts[None, :] - w.k0 * xs[:, None] + w.phase)
        want = want.reshape(-1, t1 - t0)
        scale = max(np.linalg.norm(want), 1e-300)
        err = np.linalg.norm(got - want) / scale if np.any(want) else np.max(np.abs(got))
        worst = max(worst, err)
    print(f"worst relative error {worst:.3e}")
    assert worst < 1e-12
    assert time.perf_counter() - start < 20.0
