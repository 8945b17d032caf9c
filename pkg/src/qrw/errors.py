"""Exception types shared across the package."""


class QrwError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(QrwError, ValueError):
    """An argument violates an operation's contract."""


class ResourceBoundError(QrwError, RuntimeError):
    """A requested computation exceeds the configured resource caps."""


class InternalDefectError(QrwError, RuntimeError):
    """An exact internal invariant failed; indicates a bug, not user error."""


class OracleMismatchError(QrwError, RuntimeError):
    """Two independent computation routes disagreed on an exact value."""
