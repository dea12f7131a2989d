"""Parallel reading of a snapshot directory into a cell-by-time matrix.

Files are split into contiguous chunks, one per worker process. Each worker
parses its files and writes the selected ROI cells straight into its own
column range of a shared, pre-allocated matrix, so the result never depends
on how many workers were used.
"""

from __future__ import annotations

import logging
import math
import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import shared_memory
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyDataset, GridMismatch, NoTimeBase, RoiError
from .ovf import Component, OvfHeader, read_component, read_header

log = logging.getLogger(__name__)

WORKERS_ENV = "SWFOURIER_WORKERS"
_TRAILING_INT = re.compile(r"(\d+)$")

Bounds = tuple[int | None, int | None]


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Roi:
    """Half-open index bounds per axis; ``None`` means the full extent."""

    t: Bounds = (None, None)
    x: Bounds = (None, None)
    y: Bounds = (None, None)
    z: Bounds = (None, None)

    @classmethod
    def parse(cls, text: str | None) -> "Roi":
        """Parse ``tmin:tmax,xmin:xmax,ymin:ymax,zmin:zmax``; empty fields are unbounded."""
        if not text:
            return cls()
        fields = _split_roi(text)
        bounds = []
        for axis, field in zip("txyz", fields):
            lo, hi = field
            try:
                bounds.append((None if not lo else int(lo), None if not hi else int(hi)))
            except ValueError:
                raise RoiError(f"ROI bound for {axis} must be integers, got {lo!r}:{hi!r}") from None
        return cls(*bounds)

    @classmethod
    def parse_nm(cls, text: str, header: OvfHeader) -> "Roi":
        """Like :meth:`parse`, but x/y/z bounds are positions in nanometres.

        A position maps to the index of the cell containing it.
        """
        fields = _split_roi(text)
        lo, hi = fields[0]
        bounds: list[Bounds] = [(None if not lo else int(lo), None if not hi else int(hi))]
        for axis, (lo, hi) in zip("xyz", fields[1:]):
            step = getattr(header, f"{axis}step")
            origin = getattr(header, f"{axis}base") - 0.5 * step
            bounds.append(tuple(None if not v else _cell_index(float(v) * 1e-9, origin, step) for v in (lo, hi)))
        return cls(*bounds)

    def resolve(self, n_frames: int, grid: tuple[int, int, int]) -> tuple[slice, slice, slice, slice]:
        """Clamp to the dataset extent; returns slices for (t, x, y, z)."""
        out = []
        for axis, (lo, hi), extent in zip("txyz", (self.t, self.x, self.y, self.z), (n_frames, *grid)):
            a = 0 if lo is None else max(0, lo)
            b = extent if hi is None else min(extent, hi)
            if a >= b:
                raise RoiError(f"ROI along {axis} is empty after clamping to [0, {extent}): [{a}, {b})")
            out.append(slice(a, b))
        return tuple(out)

    def __str__(self) -> str:
        def fmt(b):
            return f"{'' if b[0] is None else b[0]}:{'' if b[1] is None else b[1]}"

        return ",".join(fmt(b) for b in (self.t, self.x, self.y, self.z))


def _split_roi(text: str) -> list[tuple[str, str]]:
    parts = text.split(",")
    if len(parts) != 4:
        raise RoiError(f"ROI must have 4 comma-separated fields t,x,y,z, got {text!r}")
    fields = []
    for part in parts:
        lo, sep, hi = part.strip().partition(":")
        if not sep and part.strip():
            raise RoiError(f"ROI field {part!r} must look like min:max")
        fields.append((lo.strip(), hi.strip()))
    return fields


def _cell_index(pos: float, origin: float, step: float) -> int:
    # tolerance absorbs nm -> m rounding for positions on a cell boundary
    return max(0, math.floor((pos - origin) / step + 1e-9))


@dataclass(frozen=True)
class SpaceTimeMatrix:
    """Row r is one cell (x fastest, then y, then z); column c is snapshot ``t_start + c``."""

    data: np.ndarray
    dt: float
    dx: float
    sel_shape: tuple[int, int, int]
    component: Component
    x_positions: np.ndarray
    t_start: int = 0

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def cross_section_mean(self) -> np.ndarray:
        """Average over the selected (y, z) cells; returns an (sx, cols) array."""
        sx, sy, sz = self.sel_shape
        return self.data.reshape(sz, sy, sx, self.cols).mean(axis=(0, 1))


def discover_files(directory, pattern: str = "*.ovf") -> list[Path]:
    """Files matching ``pattern``, in natural order of the trailing integer of their stem."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"{directory} is not a directory")
    files = [p for p in directory.glob(pattern) if p.is_file()]
    if not files:
        raise EmptyDataset(str(directory), pattern)

    def key(p: Path):
        m = _TRAILING_INT.search(p.stem)
        return (m is None, int(m.group(1)) if m else 0, p.name)

    return sorted(files, key=key)


def partition(n: int, workers: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into at most ``workers`` contiguous, non-empty chunks."""
    workers = max(1, min(workers, n))
    edges = [n * i // workers for i in range(workers + 1)]
    return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _read_columns(
    paths: Sequence[str],
    out: np.ndarray,
    col0: int,
    component: Component,
    grid: tuple[int, int, int],
    sel: tuple[slice, slice, slice],
) -> list[float | None]:
    nx, ny, nz = grid
    xs, ys, zs = sel
    times = []
    for c, path in enumerate(paths, start=col0):
        slab = read_component(path, component)
        if slab.header.grid != grid:
            raise GridMismatch(str(path), grid, slab.header.grid)
        out[:, c] = slab.values.reshape(nz, ny, nx)[zs, ys, xs].ravel()
        times.append(slab.header.total_sim_time)
    return times


def _worker(shm_name, shape, paths, col0, component, grid, sel):
    shm = shared_memory.SharedMemory(name=shm_name)
    out = np.ndarray(shape, dtype=np.float64, buffer=shm.buf)
    try:
        return _read_columns(paths, out, col0, component, grid, sel)
    finally:
        del out  # the buffer must be released before close()
        shm.close()


def _time_base(files: Sequence[Path]) -> float:
    if len(files) < 2:
        raise NoTimeBase("fewer than two snapshot files")
    t0 = read_header(files[0]).total_sim_time
    t1 = read_header(files[1]).total_sim_time
    if t0 is None or t1 is None:
        raise NoTimeBase("no 'Total simulation time' in the first two headers")
    if not t1 > t0:
        raise NoTimeBase(f"non-increasing timestamps {t0} -> {t1}")
    return t1 - t0


def _check_spacing(times: list[float | None], dt: float) -> None:
    if any(t is None for t in times) or len(times) < 3:
        return
    gaps = np.diff(np.asarray(times, dtype=np.float64))
    worst = float(np.max(np.abs(gaps - dt))) / dt
    if worst > 0.01:
        warnings.warn(
            f"snapshot spacing deviates from dt={dt:g} s by up to {100 * worst:.1f}%; "
            "FFT assumes uniform sampling",
            stacklevel=3,
        )


def ingest(
    files: Sequence[Path],
    component: Component,
    roi: Roi | None = None,
    workers: int = 1,
    dt_override: float | None = None,
) -> SpaceTimeMatrix:
    """Read ``files`` (snapshot order) into a :class:`SpaceTimeMatrix`.

    The returned matrix is bit-identical for every ``workers`` value.
    """
    component = Component.parse(component)
    roi = roi or Roi()
    files = [Path(f) for f in files]
    if not files:
        raise EmptyDataset("<file list>", "")
    if workers < 1:
        raise ValueError("workers must be >= 1")

    header = read_header(files[0])
    ts, xs, ys, zs = roi.resolve(len(files), header.grid)
    if dt_override is not None:
        if not dt_override > 0:
            raise ValueError("dt must be > 0")
        dt = float(dt_override)
    else:
        dt = _time_base(files)

    selected = [str(p) for p in files[ts]]
    sel_shape = (xs.stop - xs.start, ys.stop - ys.start, zs.stop - zs.start)
    shape = (sel_shape[0] * sel_shape[1] * sel_shape[2], len(selected))
    chunks = partition(len(selected), workers)
    log.info("ingesting %d files as a %dx%d matrix with %d worker(s)", len(selected), *shape, len(chunks))

    sel = (xs, ys, zs)
    if len(chunks) == 1:
        data = np.empty(shape)
        times = _read_columns(selected, data, 0, component, header.grid, sel)
    else:
        shm = shared_memory.SharedMemory(create=True, size=max(1, shape[0] * shape[1] * 8))
        try:
            with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
                jobs = [
                    pool.submit(_worker, shm.name, shape, selected[a:b], a, component, header.grid, sel)
                    for a, b in chunks
                ]
                times = [t for job in jobs for t in job.result()]
            data = np.ndarray(shape, dtype=np.float64, buffer=shm.buf).copy()
        finally:
            shm.close()
            shm.unlink()

    if dt_override is None:
        _check_spacing(times, dt)
    data.flags.writeable = False
    x_positions = header.xbase + np.arange(xs.start, xs.stop) * header.xstep
    return SpaceTimeMatrix(
        data=data,
        dt=dt,
        dx=header.xstep,
        sel_shape=sel_shape,
        component=component,
        x_positions=x_positions,
        t_start=ts.start,
    )
