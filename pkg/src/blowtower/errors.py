"""Exception types shared across the package."""

from __future__ import annotations


class MathError(ValueError):
    """A mathematically invalid request (bad index, degenerate data, ...).

    ``step`` carries the tower step index when the problem is tied to one.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step

    def __str__(self) -> str:
        msg = super().__str__()
        if self.step is not None:
            return f"step {self.step}: {msg}"
        return msg


class UnsupportedProduct(MathError):
    """A monomial whose evaluation needs restriction data the tower lacks."""


class ConfigError(ValueError):
    """Malformed configuration input; ``location`` is a JSON-pointer-ish path."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(message)
        self.location = location

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.location}: {msg}" if self.location else msg
