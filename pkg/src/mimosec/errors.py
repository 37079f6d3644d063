"""Exception types shared across the package."""


class MimosecError(ValueError):
    """Base class for all errors raised by this package."""


class ConfigurationError(MimosecError):
    """Inconsistent or out-of-range system parameters."""


class DegenerateChannelError(MimosecError):
    """A channel coefficient required to be non-zero is exactly zero."""


class SingularChannelError(MimosecError):
    """Effective channel too ill-conditioned for zero-forcing inversion."""


class InfeasibleSelectionError(MimosecError):
    """Requested antenna selection cannot be satisfied (e.g. L > M)."""


class FitError(MimosecError):
    """Curve fit is undefined for the given data (degenerate regressor)."""


class ConfigParseError(MimosecError):
    """Malformed configuration document.

    Carries the offending key and line number when they are known.
    """

    def __init__(self, message: str, *, path: str | None = None,
                 key: str | None = None, line: int | None = None):
        self.path = path
        self.key = key
        self.line = line
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = " ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
