"""Batch generation of MuMax3 input scripts from a TOML sweep file.

A sweep file describes one script template. Geometry, region and parameter
bodies may use the whole-word tokens ``x``, ``y`` and ``z`` for the node
counts along each axis; the excitation function uses ``amp`` and ``f``.
Every combination of node counts, amplitudes and frequencies becomes one
script, named after its values.

See ``sweeps/waveguide.toml`` for a complete, commented example.
"""

from __future__ import annotations

import itertools
import os
import re
import sys
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import EmptySweep, OverwriteRefused, SpecParseError, UnboundTokenWarning

BLOCK_KINDS = (
    "mesh",
    "geometry",
    "regions",
    "parameters",
    "initial_m",
    "excitation",
    "misc_raw",
    "output",
    "run",
)
# block kinds in which x/y/z resp. amp/f are substituted
XYZ_KINDS = frozenset({"mesh", "geometry", "regions", "parameters"})
EXCITATION_KINDS = frozenset({"excitation"})

_EXCITATION_TARGET = {"field": "B_ext", "current": "J"}


def _token(name: str) -> re.Pattern:
    return re.compile(rf"(?<![A-Za-z0-9_]){name}(?![A-Za-z0-9_])")


_TOKENS = {name: _token(name) for name in ("x", "y", "z", "amp", "f")}


@dataclass(frozen=True)
class AxisSweep:
    start: int
    end: int
    step: int = 1

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"sweep step must be > 0, got {self.step}")
        if self.start > self.end:
            raise ValueError(f"sweep start {self.start} exceeds end {self.end}")
        if self.start < 1:
            raise ValueError(f"node counts must be >= 1, got {self.start}")

    def values(self) -> list[int]:
        return list(range(self.start, self.end + 1, self.step))


@dataclass(frozen=True)
class MeshSpec:
    mode: str
    nodes: tuple  # three ints (fixed) or three AxisSweep (sweep)
    cell: tuple[float, float, float]
    pbc: tuple[int, int, int] = (0, 0, 0)

    def axis_values(self) -> list[list[int]]:
        if self.mode == "fixed":
            return [[int(n)] for n in self.nodes]
        return [s.values() for s in self.nodes]


@dataclass(frozen=True)
class ExcitationSpec:
    kind: str
    function: str
    amp_values: tuple[float, ...]
    freq_values: tuple[float, ...]
    method: str | None = None
    region: int | None = None

    def statement(self) -> str:
        target = _EXCITATION_TARGET[self.kind]
        method = self.method or ("SetRegion" if self.region is not None else None)
        if method is None:
            return f"{target} = {self.function}"
        args = self.function if self.region is None else f"{self.region}, {self.function}"
        return f"{target}.{method}({args})"


@dataclass
class ScriptTemplate:
    blocks: list[tuple[str, str]] = field(default_factory=list)

    def bodies(self, kinds) -> list[str]:
        return [body for kind, body in self.blocks if kind in kinds]


class SweepPoint(NamedTuple):
    nx: int
    ny: int
    nz: int
    amp: float
    f: float


def expand_sweep(mesh: MeshSpec, excitation: ExcitationSpec) -> list[SweepPoint]:
    """Cartesian product of the node sequences and amplitude/frequency lists, nx outermost."""
    axes = mesh.axis_values()
    for name, seq in zip(("nx", "ny", "nz"), axes):
        if not seq:
            raise EmptySweep(name)
    if not excitation.amp_values:
        raise EmptySweep("amp")
    if not excitation.freq_values:
        raise EmptySweep("f")
    return [
        SweepPoint(*p)
        for p in itertools.product(*axes, excitation.amp_values, excitation.freq_values)
    ]


def format_value(value: float, precision: int = 1) -> str:
    return f"{value:.{precision}e}"


def substitute(template: ScriptTemplate, point: SweepPoint, precision: int = 1) -> str:
    """Render ``template`` for one sweep point.

    Only whole-word tokens are replaced; surrounding arithmetic is left for
    MuMax3 to evaluate.
    """
    xyz = {"x": str(point.nx), "y": str(point.ny), "z": str(point.nz)}
    exc = {"amp": format_value(point.amp, precision), "f": format_value(point.f, precision)}
    parts = []
    for kind, body in template.blocks:
        if kind in XYZ_KINDS:
            for name, value in xyz.items():
                body = _TOKENS[name].sub(value, body)
        elif kind in EXCITATION_KINDS:
            for name, value in exc.items():
                body = _TOKENS[name].sub(value, body)
        parts.append(body.strip("\n"))
    return "\n\n".join(p for p in parts if p) + "\n"


def make_filename(base: str, point: SweepPoint, precision: int = 1) -> str:
    amp = format_value(point.amp, precision)
    f = format_value(point.f, precision)
    return f"{base}_{point.nx}_{point.ny}_{point.nz}_{amp}_{f}.txt"


def unbound_tokens(template: ScriptTemplate, mesh: MeshSpec, excitation: ExcitationSpec) -> list[str]:
    """Swept quantities whose token appears in no body that would receive it."""
    geometry_like = template.bodies(XYZ_KINDS - {"mesh"})
    exc_bodies = template.bodies(EXCITATION_KINDS)
    missing = []
    for name, seq in zip("xyz", mesh.axis_values()):
        if len(seq) > 1 and not any(_TOKENS[name].search(b) for b in geometry_like):
            missing.append(name)
    for name, seq in (("amp", excitation.amp_values), ("f", excitation.freq_values)):
        if len(seq) > 1 and not any(_TOKENS[name].search(b) for b in exc_bodies):
            missing.append(name)
    return missing


# --- sweep file --------------------------------------------------------------


@dataclass
class SweepFile:
    name: str
    mesh: MeshSpec
    excitation: ExcitationSpec
    template: ScriptTemplate

    def points(self) -> list[SweepPoint]:
        return expand_sweep(self.mesh, self.excitation)


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    lines = text.splitlines()
    head = re.compile(rf"^\s*\[\[?\s*{re.escape(section)}\s*\]\]?\s*(#.*)?$")
    start = next((i for i, line in enumerate(lines) if head.match(line)), None)
    if start is None:
        return None
    if key is None:
        return start + 1
    key_re = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for i in range(start + 1, len(lines)):
        if re.match(r"^\s*\[", lines[i]):
            break
        if key_re.match(lines[i]):
            return i + 1
    return start + 1


class _Reader:
    """Typed access to a parsed TOML table, reporting errors with line numbers."""

    def __init__(self, text: str, data: dict, section: str):
        self.text = text
        self.data = data
        self.section = section

    def fail(self, message: str, key: str | None = None):
        raise SpecParseError(f"[{self.section}] {message}", _line_of(self.text, self.section, key))

    def get(self, key: str, kind, default=...):
        if key not in self.data:
            if default is ...:
                self.fail(f"missing key {key!r}")
            return default
        value = self.data[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
            self.fail(f"{key!r} has the wrong type ({type(value).__name__})", key)
        return value

    def triple(self, key: str, kind, default=...):
        value = self.get(key, list, default)
        if value is default:
            return default
        if len(value) != 3:
            self.fail(f"{key!r} must have three entries", key)
        try:
            return tuple(kind(v) for v in value)
        except (TypeError, ValueError):
            self.fail(f"{key!r} entries must be numbers", key)

    def number_list(self, key: str) -> tuple[float, ...]:
        value = self.get(key, (list, int, float))
        value = value if isinstance(value, list) else [value]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            self.fail(f"{key!r} must be a number or a list of numbers", key)
        return tuple(float(v) for v in value)

    def body(self, default: str = "") -> str:
        return self.get("body", str, default)


def _parse_axis(r: _Reader, key: str) -> AxisSweep:
    value = r.get(key, (dict, int))
    try:
        if isinstance(value, int):
            return AxisSweep(value, value, 1)
        return AxisSweep(int(value["start"]), int(value["end"]), int(value.get("step", 1)))
    except KeyError as exc:
        r.fail(f"{key!r} needs 'start' and 'end' (missing {exc.args[0]!r})", key)
    except ValueError as exc:
        r.fail(f"{key!r}: {exc}", key)


def _parse_mesh(text: str, table: dict) -> MeshSpec:
    r = _Reader(text, table, "mesh")
    mode = r.get("mode", str, "fixed")
    if mode == "fixed":
        nodes = r.triple("nodes", int)
        if min(nodes) < 1:
            r.fail("node counts must be >= 1", "nodes")
    elif mode == "sweep":
        nodes = tuple(_parse_axis(r, key) for key in ("nx", "ny", "nz"))
    else:
        r.fail(f"mode must be 'fixed' or 'sweep', got {mode!r}", "mode")
    cell = r.triple("cell", float)
    if min(cell) <= 0:
        r.fail("cell sizes must be > 0", "cell")
    pbc = r.triple("pbc", int, (0, 0, 0))
    if min(pbc) < 0:
        r.fail("PBC repetition counts must be >= 0", "pbc")
    return MeshSpec(mode, nodes, cell, pbc)


def _parse_excitation(text: str, table: dict) -> ExcitationSpec:
    r = _Reader(text, table, "excitation")
    kind = r.get("kind", str, "field")
    if kind not in _EXCITATION_TARGET:
        r.fail(f"kind must be 'field' or 'current', got {kind!r}", "kind")
    region = r.get("region", int, None)
    return ExcitationSpec(
        kind=kind,
        function=r.get("function", str),
        amp_values=r.number_list("amp"),
        freq_values=r.number_list("f"),
        method=r.get("method", str, None),
        region=region,
    )


def _mesh_body(mesh: MeshSpec) -> str:
    cx, cy, cz = mesh.cell
    px, py, pz = mesh.pbc
    return f"SetGridSize(x, y, z)\nSetCellSize({cx!r}, {cy!r}, {cz!r})\nSetPBC({px}, {py}, {pz})"


def parse_sweep(text: str) -> SweepFile:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise SpecParseError(str(exc), int(m.group(1)) if m else None) from None

    known = {"name", "mesh", "geometry", "region", "parameters", "initial_m", "excitation", "misc", "output", "run"}
    for key in data:
        if key not in known:
            raise SpecParseError(f"unknown key or section {key!r}", _line_of(text, key))

    top = _Reader(text, data, "<top level>")
    name = top.get("name", str)
    if not name or re.search(r"[\\/\s]", name):
        raise SpecParseError(f"'name' must be a plain filename stem, got {name!r}", 1)
    for section in ("mesh", "excitation"):
        if not isinstance(data.get(section), dict):
            raise SpecParseError(f"missing [{section}] section")

    mesh = _parse_mesh(text, data["mesh"])
    excitation = _parse_excitation(text, data["excitation"])

    def section_body(section: str) -> str:
        table = data.get(section, {})
        if not isinstance(table, dict):
            raise SpecParseError(f"[{section}] must be a table", _line_of(text, section))
        return _Reader(text, table, section).body()

    regions = data.get("region", [])
    if not isinstance(regions, list):
        raise SpecParseError("regions are given as [[region]] entries", _line_of(text, "region"))
    region_bodies = []
    for index, table in enumerate(regions, start=1):
        body = _Reader(text, table, "region").body()
        # regions are numbered in order of appearance
        region_bodies.append(body.replace("%d", str(index)))

    output_table = data.get("output", {})
    out = _Reader(text, output_table, "output")
    fmt = out.get("format", str, None)
    output_body = out.body()
    if fmt:
        output_body = f"OutputFormat = {fmt}\n{output_body}"

    template = ScriptTemplate(
        [
            ("mesh", _mesh_body(mesh)),
            ("geometry", section_body("geometry")),
            ("regions", "\n".join(region_bodies)),
            ("parameters", section_body("parameters")),
            ("initial_m", section_body("initial_m")),
            ("excitation", excitation.statement()),
            ("misc_raw", section_body("misc")),
            ("output", output_body),
            ("run", section_body("run")),
        ]
    )
    return SweepFile(name, mesh, excitation, template)


def load_sweep(path) -> SweepFile:
    path = Path(path)
    try:
        return parse_sweep(path.read_text())
    except SpecParseError as exc:
        raise exc.with_path(path)


def render_all(sweep: SweepFile, precision: int = 1) -> list[tuple[str, str]]:
    """(filename, content) for every sweep point, in sweep order."""
    missing = unbound_tokens(sweep.template, sweep.mesh, sweep.excitation)
    if missing:
        warnings.warn(
            f"swept value(s) {', '.join(missing)} never appear as tokens in any body",
            UnboundTokenWarning,
            stacklevel=2,
        )
    scripts = [
        (make_filename(sweep.name, p, precision), substitute(sweep.template, p, precision))
        for p in sweep.points()
    ]
    names = [n for n, _ in scripts]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise SpecParseError(f"sweep produces duplicate filenames, raise the precision: {dupes[:3]}")
    return scripts


def _atomic_write(path: Path, content: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as f:
            f.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def generate(
    spec_path,
    out_dir,
    force: bool = False,
    dry_run: bool = False,
    precision: int = 1,
) -> list[str]:
    """Write one script per sweep point into ``out_dir``; returns the filenames.

    Nothing is written when ``dry_run`` is set, or when any target exists and
    ``force`` is not.
    """
    sweep = load_sweep(spec_path)
    scripts = render_all(sweep, precision)
    names = [n for n, _ in scripts]
    if dry_run:
        return names
    out_dir = Path(out_dir)
    existing = [n for n in names if (out_dir / n).exists()]
    if existing and not force:
        raise OverwriteRefused(existing)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in scripts:
        _atomic_write(out_dir / name, content)
    return names
