import math

import numpy as np
import pytest

from swfourier.analysis import fft_spectrum
from swfourier.ingest import discover_files, ingest
from swfourier.ovf import Component, read_component, read_header
from swfourier.synth import PlaneWaveSpec, Wave, frame_values, synth_dataset


def test_closed_form_values(tmp_path):
    dt, cx = 1e-12, 1.5e-9
    wave = Wave(1.0, 1.0e11, 2e8, 0.3, Component.Y)
    spec = PlaneWaveSpec((2, 1, 1), (cx, cx, 1e-8), 4, dt, (wave,))
    files = synth_dataset(spec, tmp_path)
    assert [f.name for f in files] == ["m000000.ovf", "m000001.ovf", "m000002.ovf", "m000003.ovf"]
    for n, f in enumerate(files):
        assert read_header(f).total_sim_time == n * dt
        got = read_component(f, Component.Y).values
        for i in range(2):
            x = 0.5 * cx + i * cx
            want = math.cos(2 * math.pi * 1.0e11 * n * dt - 2e8 * x + 0.3)
            assert abs(got[i] - want) <= 1e-12 * max(1.0, abs(want))
        assert np.all(read_component(f, Component.X).values == 0)
        assert np.all(read_component(f, Component.Z).values == 0)


def test_seeded_noise_is_reproducible(tmp_path):
    spec = PlaneWaveSpec((3, 2, 1), (1e-9,) * 3, 5, 1e-12, (Wave(0.5, 1e10, 0, 0, Component.Z),), 0.1, seed=7)
    a = synth_dataset(spec, tmp_path / "a")
    b = synth_dataset(spec, tmp_path / "b")
    for fa, fb in zip(a, b):
        assert fa.read_bytes() == fb.read_bytes()


def test_bytes_independent_of_writer_count(tmp_path):
    spec = PlaneWaveSpec((3, 2, 1), (1e-9,) * 3, 6, 1e-12, (Wave(0.5, 1e10, 0, 0, Component.Z),), 0.1, seed=3)
    a = synth_dataset(spec, tmp_path / "a", workers=1)
    b = synth_dataset(spec, tmp_path / "b", workers=3)
    assert [f.read_bytes() for f in a] == [f.read_bytes() for f in b]


def test_noise_changes_with_seed():
    base = dict(grid=(4, 1, 1), cell=(1e-9,) * 3, frames=2, dt=1e-12, noise_sigma=1.0)
    a = frame_values(PlaneWaveSpec(seed=1, **base), 1)
    b = frame_values(PlaneWaveSpec(seed=2, **base), 1)
    assert not np.array_equal(a, b)


def test_zero_waves_zero_spectrum(tmp_path):
    spec = PlaneWaveSpec((3, 1, 1), (1e-9,) * 3, 8, 1e-12)
    files = synth_dataset(spec, tmp_path)
    m = ingest(files, Component.Z)
    assert np.all(m.data == 0)
    res = fft_spectrum(m)
    assert np.all(res.amplitude == 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(frames=0),
        dict(dt=0.0),
        dict(waves=(Wave(1, 6e11, 0),)),  # above Nyquist for dt = 1e-12
        dict(waves=(Wave(1, 1e10, 4e9),)),  # |k0| >= pi / 1e-9
        dict(grid=(0, 1, 1)),
    ],
)
def test_invalid_spec(kwargs):
    base = dict(grid=(2, 1, 1), cell=(1e-9,) * 3, frames=2, dt=1e-12)
    base.update(kwargs)
    with pytest.raises(ValueError):
        PlaneWaveSpec(**base)


def test_wave_cli_syntax():
    w = Wave.parse("1,1e10,2e8,0.5,y")
    assert w == Wave(1.0, 1e10, 2e8, 0.5, Component.Y)
    with pytest.raises(ValueError):
        Wave.parse("1,2,3")
