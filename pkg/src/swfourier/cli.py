"""Command-line entry point.

Exit codes: 0 on success, 1 for data errors (bad files, degenerate input,
refused overwrite), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DETRENDS, SCALES, dispersion, fft_spectrum, spatial_spectrum
from .errors import SwFourierError
from .ingest import WORKERS_ENV, Roi, default_workers, discover_files, ingest
from .ovf import Component, read_header
from .raster import render_colormap, write_pgm
from .scriptgen import generate
from .synth import PlaneWaveSpec, Wave, synth_dataset
from .window import DEFAULT_ATTENUATION_DB, chebyshev_window, window_2d

log = logging.getLogger("swfourier")


# --- argument types ----------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _triple(kind):
    def parse(text: str):
        parts = text.split(",")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
        return tuple(kind(p) for p in parts)

    parse.__name__ = f"{kind.__name__} triple"
    return parse


def _wave(text: str) -> Wave:
    try:
        return Wave.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --- output ------------------------------------------------------------------


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> Path:
    """Write equal-length columns with ``%.17g`` so a float64 re-parse is exact."""
    data = np.column_stack([np.asarray(c, dtype=np.float64).ravel() for c in columns.values()])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(columns), comments="")
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    path = Path(path)
    with open(path) as f:
        names = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(names)}


def _grid_columns(row_axis: np.ndarray, col_axis: np.ndarray, values: np.ndarray):
    rr, cc = np.meshgrid(row_axis, col_axis, indexing="ij")
    return rr.ravel(), cc.ravel(), values.ravel()


# --- analysis commands -------------------------------------------------------


def _load_matrix(args):
    files = discover_files(args.dir, args.pattern)
    header = read_header(files[0])
    if args.roi_nm:
        roi = Roi.parse_nm(args.roi_nm, header)
    else:
        roi = Roi.parse(args.roi)
    ts, xs, ys, zs = roi.resolve(len(files), header.grid)
    resolved = Roi(*((s.start, s.stop) for s in (ts, xs, ys, zs)))
    workers = args.workers or default_workers()
    log.info("reading %d files from %s (component %s, ROI %s)", len(files), args.dir, args.component, resolved)
    matrix = ingest(files, Component.parse(args.component), resolved, workers, args.dt)
    manifest = {
        "tool": "swfourier",
        "version": __version__,
        "command": args.command,
        "input_dir": str(Path(args.dir).resolve()),
        "pattern": args.pattern,
        "n_files": len(files),
        "first_file": files[0].name,
        "last_file": files[-1].name,
        "component": Component.parse(args.component).name.lower(),
        "roi": str(resolved),
        "dt": matrix.dt,
        "dt_source": "flag" if args.dt is not None else "header",
        "workers": workers,
        "matrix_shape": [matrix.rows, matrix.cols],
        "sel_shape": list(matrix.sel_shape),
        "detrend": args.detrend,
        "pad_to": args.pad_to,
        "power_scale": args.power_scale,
    }
    return matrix, manifest


def _regen_argv(args, manifest: dict) -> list[str]:
    argv = [
        args.command,
        "--dir", manifest["input_dir"],
        "--pattern", args.pattern,
        "--component", manifest["component"],
        "--roi", manifest["roi"],
        "--detrend", args.detrend,
        "--power-scale", args.power_scale,
        "--image-scale", args.image_scale,
    ]  # fmt: skip
    if args.dt is not None:
        argv += ["--dt", repr(args.dt)]
    if args.pad_to is not None:
        argv += ["--pad-to", str(args.pad_to)]
    if args.command == "dispersion":
        argv += ["--window", args.window, "--attenuation", repr(args.attenuation)]
    if args.no_image:
        argv.append("--no-image")
    return argv


def _finish(args, manifest: dict, csv_columns: dict, image_matrix: np.ndarray | None) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.command
    outputs = {"csv": str(write_csv(out / f"{stem}.csv", csv_columns))}
    if image_matrix is not None and not args.no_image:
        image = render_colormap(image_matrix, args.image_scale)
        outputs["image"] = str(write_pgm(out / f"{stem}.pgm", image))
    manifest["image_scale"] = args.image_scale
    manifest["argv"] = _regen_argv(args, manifest)
    manifest["outputs"] = {k: Path(v).name for k, v in outputs.items()}
    meta = out / f"{stem}.json"
    meta.write_text(json.dumps(manifest, indent=2) + "\n")
    log.info("wrote %s", ", ".join([*outputs.values(), str(meta)]))
    return 0


def cmd_fft(args) -> int:
    m, manifest = _load_matrix(args)
    res = fft_spectrum(m, detrend=args.detrend, pad_to=args.pad_to, scale=args.power_scale)
    return _finish(args, manifest, {"freq_hz": res.freqs, "amplitude": res.amplitude}, None)


def cmd_spectrum(args) -> int:
    m, manifest = _load_matrix(args)
    res = spatial_spectrum(m, detrend=args.detrend, pad_to=args.pad_to, scale=args.power_scale)
    x, f, p = _grid_columns(res.x_positions, res.freqs, res.power)
    # image: frequency upward, x to the right
    image = res.power.T if args.power_scale != "db" else res.power.T - res.power.min()
    return _finish(args, manifest, {"x_m": x, "freq_hz": f, "power": p}, image)


def cmd_dispersion(args) -> int:
    m, manifest = _load_matrix(args)
    window = None
    manifest["window"] = {"kind": args.window}
    if args.window == "chebyshev":
        manifest["window"]["attenuation_db"] = args.attenuation
        if m.sel_shape[0] >= 2:  # otherwise dispersion() reports DegenerateSpace
            wt = chebyshev_window(m.cols, args.attenuation)
            wx = chebyshev_window(m.sel_shape[0], args.attenuation)
            window = window_2d(wt, wx)
    res = dispersion(m, window=window, detrend=args.detrend, pad_to=args.pad_to, scale=args.power_scale)
    f, k, mag = _grid_columns(res.f_axis, res.k_axis, res.magnitude)
    image = res.magnitude if args.power_scale != "db" else res.magnitude - res.magnitude.min()
    return _finish(args, manifest, {"freq_hz": f, "k_rad_per_m": k, "magnitude": mag}, image)


# --- other commands ----------------------------------------------------------


def cmd_generate(args) -> int:
    names = generate(args.spec, args.out, force=args.force, dry_run=args.dry_run, precision=args.precision)
    if args.dry_run:
        print("\n".join(names))
    else:
        log.info("wrote %d scripts to %s", len(names), args.out)
    return 0


def cmd_synth(args) -> int:
    spec = PlaneWaveSpec(
        grid=args.grid,
        cell=args.cell,
        frames=args.frames,
        dt=args.dt,
        waves=tuple(args.wave),
        noise_sigma=args.noise,
        seed=args.seed,
    )
    files = synth_dataset(spec, args.out, workers=args.workers or 1)
    log.info("wrote %d files to %s", len(files), args.out)
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swfourier",
        description="MuMax3 script sweeps and Fourier analysis of OVF snapshot series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per stage")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    g = sub.add_parser("generate", help="write one MuMax3 script per sweep point")
    g.add_argument("--spec", required=True, help="TOML sweep file")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--force", action="store_true", help="overwrite existing scripts")
    g.add_argument("--dry-run", action="store_true", help="print filenames, write nothing")
    g.add_argument("--precision", type=int, default=1, help="digits after the point for amp/f (default 1)")
    g.set_defaults(func=cmd_generate)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dir", required=True, help="directory holding the snapshot files")
    common.add_argument("--pattern", default="*.ovf", help="glob for snapshot files (default *.ovf)")
    common.add_argument("--component", required=True, choices=["x", "y", "z"], type=str.lower)
    common.add_argument(
        "--workers", type=_positive_int, default=None,
        help=f"reader processes (default: ${WORKERS_ENV} or the core count)",
    )  # fmt: skip
    common.add_argument("--dt", type=_positive_float, default=None, help="sampling interval in seconds")
    roi = common.add_mutually_exclusive_group()
    roi.add_argument("--roi", default=None, help="tmin:tmax,xmin:xmax,ymin:ymax,zmin:zmax (cell/snapshot indices)")
    roi.add_argument("--roi-nm", default=None, help="like --roi but x/y/z bounds in nanometres")
    common.add_argument("--detrend", choices=DETRENDS, default="none")
    common.add_argument("--pad-to", type=_positive_int, default=None, help="zero-pad the time axis to N samples")
    common.add_argument("--power-scale", choices=SCALES, default="amplitude")
    common.add_argument("--image-scale", choices=["linear", "log"], default="linear")
    common.add_argument("--no-image", action="store_true", help="skip the PGM raster")
    common.add_argument("--out", default=".", help="output directory (default: current)")

    a = sub.add_parser("fft", parents=[common], help="row-averaged frequency spectrum")
    a.set_defaults(func=cmd_fft)
    a = sub.add_parser("spectrum", parents=[common], help="spatial power map along x")
    a.set_defaults(func=cmd_spectrum)
    a = sub.add_parser("dispersion", parents=[common], help="k-f dispersion map")
    a.add_argument("--window", choices=["none", "chebyshev"], default="none")
    a.add_argument("--attenuation", type=_positive_float, default=DEFAULT_ATTENUATION_DB, help="sidelobe level, dB")
    a.set_defaults(func=cmd_dispersion)

    s = sub.add_parser("synth", help="write a synthetic plane-wave dataset")
    s.add_argument("--grid", type=_triple(int), required=True, help="NX,NY,NZ")
    s.add_argument("--cell", type=_triple(float), default=(1.5e-9, 1.5e-9, 1e-8), help="CX,CY,CZ in metres")
    s.add_argument("--frames", type=_positive_int, required=True)
    s.add_argument("--dt", type=_positive_float, required=True)
    s.add_argument("--wave", type=_wave, action="append", default=[], help="A,F0,K0,PHASE,COMP (repeatable)")
    s.add_argument("--noise", type=float, default=0.0, help="gaussian noise sigma")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="swfourier: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except SwFourierError as exc:
        print(f"swfourier: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"swfourier: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return run(sys.argv[1:])
