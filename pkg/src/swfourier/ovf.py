"""Reader for OVF 2.0 text files as written by MuMax3 with ``OVF2_TEXT``.

Only one of the three vector components is ever kept in memory. Values are
returned in file order: x index fastest, then y, then z.
"""

from __future__ import annotations

import enum
import io
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .errors import (
    BadValueDim,
    DataCountMismatch,
    MalformedHeader,
    MalformedRecord,
    MissingKey,
    NonNumericToken,
    OvfError,
    UnsupportedEncoding,
)

_SIM_TIME = re.compile(r"total\s+simulation\s+time\s*:\s*([-+0-9.eE]+)\s*s\b", re.IGNORECASE)
_END_DATA = re.compile(rb"^[ \t]*#[ \t]*end[ \t]*:[ \t]*data\b[^\n]*$", re.IGNORECASE | re.MULTILINE)
_BEGIN_ANY = re.compile(rb"^[ \t]*#[ \t]*begin[ \t]*:", re.IGNORECASE | re.MULTILINE)

_INT_KEYS = {"xnodes": "nx", "ynodes": "ny", "znodes": "nz", "valuedim": "value_dim"}
_FLOAT_KEYS = {
    "xstepsize": "xstep",
    "ystepsize": "ystep",
    "zstepsize": "zstep",
    "xbase": "xbase",
    "ybase": "ybase",
    "zbase": "zbase",
}


class Component(enum.IntEnum):
    """Vector component; the value is the data column it selects."""

    X = 0
    Y = 1
    Z = 2

    @classmethod
    def parse(cls, text: str | "Component") -> "Component":
        if isinstance(text, Component):
            return text
        try:
            return cls[str(text).strip().upper()]
        except KeyError:
            raise ValueError(f"component must be one of x, y, z (got {text!r})") from None


@dataclass(frozen=True)
class OvfHeader:
    title: str
    mesh_type: str
    value_dim: int
    nx: int
    ny: int
    nz: int
    xstep: float
    ystep: float
    zstep: float
    xbase: float
    ybase: float
    zbase: float
    total_sim_time: float | None = None

    @property
    def grid(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz


@dataclass(frozen=True)
class ScalarSlab:
    header: OvfHeader
    values: np.ndarray


def _read_header(stream: BinaryIO) -> tuple[OvfHeader, int]:
    """Parse header lines up to ``# Begin: Data Text``; returns (header, lines consumed)."""
    fields: dict[str, object] = {"title": "", "mesh_type": "rectangular", "total_sim_time": None}
    line_no = 0
    while True:
        raw = stream.readline()
        if not raw:
            raise MalformedHeader(line_no + 1, "<end of file before '# Begin: Data Text'>")
        line_no += 1
        line = raw.decode("ascii", errors="replace").strip()
        if line_no == 1:
            if " ".join(line.lstrip("#").split()).lower() != "oommf ovf 2.0":
                raise MalformedHeader(1, line)
            continue
        if not line:
            continue
        if not line.startswith("#"):
            raise MalformedHeader(line_no, line)
        if line.startswith("##"):
            continue
        key, sep, value = line.lstrip("#").partition(":")
        if not sep:
            continue
        key = key.strip().lower()
        value = value.strip()
        if key == "begin" and value.lower().startswith("data"):
            encoding = value[4:].strip()
            if encoding.lower() != "text":
                raise UnsupportedEncoding(encoding or "<unspecified>")
            break
        try:
            if key in _INT_KEYS:
                fields[_INT_KEYS[key]] = int(value)
            elif key in _FLOAT_KEYS:
                fields[_FLOAT_KEYS[key]] = float(value)
            elif key == "title":
                fields["title"] = value
            elif key == "meshtype":
                if value.lower() != "rectangular":
                    raise MalformedHeader(line_no, line)
                fields["mesh_type"] = value.lower()
            elif key == "desc":
                m = _SIM_TIME.search(line)
                if m:
                    fields["total_sim_time"] = float(m.group(1))
        except ValueError:
            raise MalformedHeader(line_no, line) from None

    for key, name in _INT_KEYS.items():
        if name not in fields:
            raise MissingKey(key)
    for axis in "xyz":
        step = fields.setdefault(f"{axis}step", 1.0)
        fields.setdefault(f"{axis}base", 0.5 * step)
    header = OvfHeader(**fields)
    if min(header.grid) < 1 or min(header.xstep, header.ystep, header.zstep) <= 0:
        raise MalformedHeader(line_no, f"<invalid grid {header.grid}>")
    return header, line_no


def parse_header(stream: BinaryIO) -> OvfHeader:
    """Read the header block and leave ``stream`` at the first data line."""
    return _read_header(stream)[0]


def parse_component(stream: BinaryIO, component: Component) -> ScalarSlab:
    """Read one column of the data block.

    Only the selected column is converted to floats; the other two columns
    are checked for record structure but not stored.
    """
    component = Component.parse(component)
    header, header_lines = _read_header(stream)
    if header.value_dim != 3:
        raise BadValueDim(header.value_dim)
    rest = stream.read()

    end = _END_DATA.search(rest)
    if end is None:
        block = rest
    else:
        block = rest[: end.start()]
        if _BEGIN_ANY.search(rest, end.end()):
            warnings.warn("file has more than one data segment; only the first is read", stacklevel=2)

    expected = header.n_cells
    tokens = block.split()
    if len(tokens) != 3 * expected:
        _raise_structure_error(block, header_lines, expected)
    try:
        values = np.array(tokens[component::3], dtype=np.float64)
    except ValueError:
        _raise_token_error(block, header_lines, component)
        raise  # pragma: no cover
    values.flags.writeable = False
    return ScalarSlab(header, values)


def _data_lines(block: bytes, first_line_no: int):
    for offset, line in enumerate(block.split(b"\n")):
        parts = line.split()
        if parts:
            yield first_line_no + offset, parts


def _raise_structure_error(block: bytes, header_lines: int, expected: int):
    records = 0
    for line_no, parts in _data_lines(block, header_lines + 1):
        if len(parts) != 3:
            raise MalformedRecord(line_no, len(parts))
        records += 1
    raise DataCountMismatch(expected, records)


def _raise_token_error(block: bytes, header_lines: int, component: Component):
    for line_no, parts in _data_lines(block, header_lines + 1):
        try:
            float(parts[component])
        except ValueError:
            raise NonNumericToken(line_no, parts[component].decode("ascii", "replace")) from None


def read_header(path: str | Path) -> OvfHeader:
    try:
        with open(path, "rb") as f:
            return parse_header(f)
    except OvfError as exc:
        raise exc.with_path(path)


def read_component(path: str | Path, component: Component) -> ScalarSlab:
    """Parse ``path`` and keep only ``component``; errors carry the file path."""
    try:
        with open(path, "rb") as f:
            # one read() call: the data block is split as a whole anyway
            return parse_component(io.BytesIO(f.read()), component)
    except OvfError as exc:
        raise exc.with_path(path)
