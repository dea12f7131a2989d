"""Synthetic OVF datasets made of superposed plane waves plus gaussian noise.

The signal is known in closed form, which makes these datasets the reference
input for the analysis tests and the load generator for ingest benchmarks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ovf import Component


@dataclass(frozen=True)
class Wave:
    amplitude: float
    f0: float
    k0: float
    phase: float = 0.0
    component: Component = Component.Z

    @classmethod
    def parse(cls, text: str) -> "Wave":
        """Parse ``A,F0,K0,PHASE,COMP`` (the CLI ``--wave`` syntax)."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 5:
            raise ValueError(f"--wave expects A,F0,K0,PHASE,COMP, got {text!r}")
        a, f0, k0, phase = (float(p) for p in parts[:4])
        return cls(a, f0, k0, phase, Component.parse(parts[4]))


@dataclass(frozen=True)
class PlaneWaveSpec:
    grid: tuple[int, int, int]
    cell: tuple[float, float, float]
    frames: int
    dt: float
    waves: tuple[Wave, ...] = ()
    noise_sigma: float = 0.0
    seed: int = 0
    title: str = "m"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(int(n) for n in self.grid))
        object.__setattr__(self, "cell", tuple(float(c) for c in self.cell))
        object.__setattr__(self, "waves", tuple(self.waves))
        if min(self.grid) < 1 or len(self.grid) != 3:
            raise ValueError(f"grid must be three counts >= 1, got {self.grid}")
        if min(self.cell) <= 0 or len(self.cell) != 3:
            raise ValueError(f"cell sizes must be > 0, got {self.cell}")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.noise_sigma < 0:
            raise ValueError("noise sigma must be >= 0")
        nyquist = 1.0 / (2.0 * self.dt)
        k_limit = math.pi / self.cell[0]
        for w in self.waves:
            if not abs(w.f0) < nyquist:
                raise ValueError(f"wave frequency {w.f0} Hz is not below Nyquist {nyquist} Hz")
            if not abs(w.k0) < k_limit:
                raise ValueError(f"wave vector {w.k0} rad/m is not below pi/cx = {k_limit}")

    @property
    def xbase(self) -> float:
        return 0.5 * self.cell[0]

    def noisy_components(self) -> list[Component]:
        """Components that receive noise: those carrying a wave, or all three if there are none."""
        if not self.waves:
            return list(Component)
        return sorted({w.component for w in self.waves})


def frame_values(spec: PlaneWaveSpec, frame: int) -> np.ndarray:
    """Return the ``(n_cells, 3)`` vector field of one frame in file order."""
    nx, ny, nz = spec.grid
    t = frame * spec.dt
    x = spec.xbase + np.arange(nx) * spec.cell[0]
    out = np.zeros((nx * ny * nz, 3))
    for w in spec.waves:
        profile = w.amplitude * np.cos(2 * np.pi * w.f0 * t - w.k0 * x + w.phase)
        out[:, w.component] += np.tile(profile, ny * nz)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng([spec.seed, frame])
        for comp in spec.noisy_components():
            out[:, comp] += rng.normal(0.0, spec.noise_sigma, size=out.shape[0])
    return out


def ovf_text(
    values: np.ndarray,
    grid: tuple[int, int, int],
    cell: tuple[float, float, float],
    time: float | None = None,
    title: str = "m",
) -> bytes:
    """Render a ``(n_cells, 3)`` array as an OVF 2.0 text file.

    Floats are written with ``repr`` so a 64-bit parse recovers them exactly.
    """
    nx, ny, nz = grid
    cx, cy, cz = cell
    lines = [
        "# OOMMF OVF 2.0",
        "# Segment count: 1",
        "# Begin: Segment",
        "# Begin: Header",
        f"# Title: {title}",
        "# meshtype: rectangular",
        "# meshunit: m",
        "# xmin: 0",
        "# ymin: 0",
        "# zmin: 0",
        f"# xmax: {nx * cx!r}",
        f"# ymax: {ny * cy!r}",
        f"# zmax: {nz * cz!r}",
        "# valuedim: 3",
        f"# valuelabels: {title}_x {title}_y {title}_z",
        "# valueunits: 1 1 1",
    ]
    if time is not None:
        lines.append(f"# Desc: Total simulation time:  {time!r}  s")
    lines += [
        f"# xbase: {cx / 2!r}",
        f"# ybase: {cy / 2!r}",
        f"# zbase: {cz / 2!r}",
        f"# xnodes: {nx}",
        f"# ynodes: {ny}",
        f"# znodes: {nz}",
        f"# xstepsize: {cx!r}",
        f"# ystepsize: {cy!r}",
        f"# zstepsize: {cz!r}",
        "# End: Header",
        "# Begin: Data Text",
    ]
    it = iter(map(repr, np.asarray(values, dtype=np.float64).ravel().tolist()))
    lines += map(" ".join, zip(it, it, it))
    lines += ["# End: Data Text", "# End: Segment", ""]
    return "\n".join(lines).encode("ascii")


def write_ovf(path, values, grid, cell, time=None, title="m") -> Path:
    path = Path(path)
    path.write_bytes(ovf_text(values, grid, cell, time, title))
    return path


def frame_name(frame: int) -> str:
    return f"m{frame:06d}.ovf"


def _write_frames(spec: PlaneWaveSpec, out_dir: Path, frames: range) -> None:
    for n in frames:
        write_ovf(out_dir / frame_name(n), frame_values(spec, n), spec.grid, spec.cell, n * spec.dt, spec.title)


def synth_dataset(spec: PlaneWaveSpec, out_dir, workers: int = 1) -> list[Path]:
    """Write ``spec.frames`` snapshot files into ``out_dir`` and return their paths.

    Output bytes do not depend on ``workers``: noise for frame n is drawn from
    a generator seeded with ``(seed, n)``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = max(1, min(int(workers), spec.frames))
    if workers == 1:
        _write_frames(spec, out_dir, range(spec.frames))
    else:
        bounds = np.linspace(0, spec.frames, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [
                pool.submit(_write_frames, spec, out_dir, range(lo, hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for job in jobs:
                job.result()
    return [out_dir / frame_name(n) for n in range(spec.frames)]

