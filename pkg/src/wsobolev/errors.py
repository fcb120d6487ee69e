"""Exception types shared across the toolkit."""

from __future__ import annotations


class WSobolevError(Exception):
    """Base class for toolkit errors."""


class DivergentIntegralError(WSobolevError):
    """An integral was detected to diverge.

    ``side`` identifies the offending endpoint: "lower", "upper" or "both".
    """

    def __init__(self, message: str, side: str = "unknown", partial: float | None = None):
        super().__init__(message)
        self.side = side
        self.partial = partial


class UndeterminedIntegralError(WSobolevError):
    """Growth probing neither converged nor crossed the divergence threshold."""

    def __init__(self, message: str, partial: float | None = None):
        super().__init__(message)
        self.partial = partial


class WindowUnsolvableError(WSobolevError):
    """The equilibrium window equations have no solution at the requested point.

    ``endpoint`` names the limiting side ("lower" when the mass toward 0 is
    exhausted, "upper" toward infinity).
    """

    def __init__(self, t: float, endpoint: str, message: str | None = None):
        super().__init__(message or f"window unsolvable at t={t!r} (limiting endpoint: {endpoint})")
        self.t = t
        self.endpoint = endpoint


class GridRangeError(WindowUnsolvableError):
    """The eta-grid walk left the solvable region before reaching the requested index."""

    def __init__(self, t: float, endpoint: str, reached: tuple[int, int], partial_values: dict):
        super().__init__(t, endpoint, f"grid walk stopped at t={t!r}; reachable index range {reached}")
        self.reached = reached
        self.partial_values = partial_values


class DerivativeRequiredError(WSobolevError):
    """A declared derivative is required but missing and fallbacks are disabled."""


class BlockBudgetExceededError(WSobolevError):
    """The oscillator construction would need more blocks than the configured limit."""

    def __init__(self, needed: int, limit: int):
        super().__init__(f"oscillator needs {needed} blocks, limit is {limit}")
        self.needed = needed
        self.limit = limit


class QuadratureFaultError(WSobolevError):
    """An internal consistency check failed, indicating a quadrature fault."""


class ConfigError(WSobolevError):
    """The run configuration file could not be parsed or validated."""
