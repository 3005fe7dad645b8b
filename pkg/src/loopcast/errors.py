"""Exception types shared across the package."""


class LoopcastError(Exception):
    """Base class for all package-specific errors."""


class EdgeListError(LoopcastError):
    """Malformed edge-list input (bad line, bad probability, duplicate edge)."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ConfigError(LoopcastError):
    """Invalid or unsatisfiable configuration (bad radius, horizon, caps...)."""


class UsageError(LoopcastError):
    """API misuse: mismatched networks, radii, or incomparable reports."""
