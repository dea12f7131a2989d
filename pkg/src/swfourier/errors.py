"""Exception types raised across the package.

Every exception keeps its constructor arguments in ``args`` so instances
survive pickling across process boundaries (the ingest workers rely on it).
"""

from __future__ import annotations


class SwFourierError(Exception):
    """Base class for all data and configuration errors."""

    def __init__(self, *args):
        super().__init__(*args)
        self.path: str | None = None

    def __reduce__(self):
        return (self.__class__, self.args, {"path": self.path})

    def with_path(self, path) -> "SwFourierError":
        self.path = str(path)
        return self

    def describe(self) -> str:
        return str(self)

    def __str__(self) -> str:
        msg = f"{type(self).__name__}: {self.describe()}"
        if self.path:
            msg = f"{self.path}: {msg}"
        return msg


# --- OVF parsing -----------------------------------------------------------


class OvfError(SwFourierError):
    pass


class MalformedHeader(OvfError):
    def __init__(self, line_no: int, line: str):
        super().__init__(line_no, line)

    def describe(self) -> str:
        return f"line {self.args[0]}: unexpected header line {self.args[1]!r}"


class MissingKey(OvfError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def describe(self) -> str:
        return f"header key {self.name!r} is missing"


class UnsupportedEncoding(OvfError):
    def __init__(self, encoding: str):
        super().__init__(encoding)
        self.encoding = encoding

    def describe(self) -> str:
        return f"data encoding {self.encoding!r} is not supported (only 'Text'; export with OVF2_TEXT)"


class BadValueDim(OvfError):
    def __init__(self, value_dim: int):
        super().__init__(value_dim)

    def describe(self) -> str:
        return f"valuedim is {self.args[0]}, a 3-component vector field is required"


class DataCountMismatch(OvfError):
    def __init__(self, expected: int, got: int):
        super().__init__(expected, got)
        self.expected = expected
        self.got = got

    def describe(self) -> str:
        return f"expected {self.expected} data records, got {self.got}"


class NonNumericToken(OvfError):
    def __init__(self, line_no: int, token: str = ""):
        super().__init__(line_no, token)
        self.line_no = line_no

    def describe(self) -> str:
        return f"line {self.line_no}: non-numeric token {self.args[1]!r}"


class MalformedRecord(OvfError):
    def __init__(self, line_no: int, n_tokens: int):
        super().__init__(line_no, n_tokens)
        self.line_no = line_no

    def describe(self) -> str:
        return f"line {self.line_no}: expected 3 values per record, got {self.args[1]}"


# --- ingestion -------------------------------------------------------------


class EmptyDataset(SwFourierError):
    def __init__(self, directory: str, pattern: str):
        super().__init__(directory, pattern)

    def describe(self) -> str:
        return f"no files matching {self.args[1]!r} in {self.args[0]}"


class GridMismatch(SwFourierError):
    def __init__(self, file: str, expected: tuple, got: tuple):
        super().__init__(file, expected, got)
        self.file, self.expected, self.got = file, expected, got

    def describe(self) -> str:
        return f"{self.file}: grid {self.got} differs from {self.expected} of the first file"


class NoTimeBase(SwFourierError):
    def __init__(self, reason: str):
        super().__init__(reason)

    def describe(self) -> str:
        return f"cannot determine the sampling interval ({self.args[0]}); pass --dt"


class RoiError(SwFourierError):
    def __init__(self, reason: str):
        super().__init__(reason)

    def describe(self) -> str:
        return self.args[0]


# --- analysis / windows ----------------------------------------------------


class DegenerateTime(SwFourierError):
    def __init__(self, cols: int):
        super().__init__(cols)

    def describe(self) -> str:
        return f"at least 2 time samples are required, got {self.args[0]}"


class DegenerateSpace(SwFourierError):
    def __init__(self, sx: int):
        super().__init__(sx)

    def describe(self) -> str:
        return f"dispersion needs at least 2 cells along x, got {self.args[0]}"


class ShapeMismatch(SwFourierError):
    def __init__(self, expected: tuple, got: tuple):
        super().__init__(expected, got)

    def describe(self) -> str:
        return f"window shape {self.args[1]} does not match data shape {self.args[0]}"


class BadLength(SwFourierError):
    def __init__(self, length):
        super().__init__(length)

    def describe(self) -> str:
        return f"window length must be >= 2, got {self.args[0]}"


class BadAttenuation(SwFourierError):
    def __init__(self, attenuation):
        super().__init__(attenuation)

    def describe(self) -> str:
        return f"attenuation must be > 0 dB, got {self.args[0]}"


# --- script generation -----------------------------------------------------


class EmptySweep(SwFourierError):
    def __init__(self, what: str):
        super().__init__(what)

    def describe(self) -> str:
        return f"sweep over {self.args[0]} has no values"


class SpecParseError(SwFourierError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message, line)
        self.line = line

    def describe(self) -> str:
        if self.line is None:
            return self.args[0]
        return f"line {self.line}: {self.args[0]}"


class OverwriteRefused(SwFourierError):
    def __init__(self, existing: list):
        super().__init__(existing)

    def describe(self) -> str:
        files = self.args[0]
        head = ", ".join(files[:3]) + (" ..." if len(files) > 3 else "")
        return f"{len(files)} output file(s) already exist ({head}); use --force"


class UnboundTokenWarning(UserWarning):
    """A swept quantity has several values but its token appears in no body."""
