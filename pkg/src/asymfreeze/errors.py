"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class AsymmetryError(Exception):
    """Base class for all errors raised by asymfreeze."""


class NonFinite(AsymmetryError, ValueError):
    pass


class NotHermitian(AsymmetryError, ValueError):
    pass


class NotPSD(AsymmetryError, ValueError):
    pass


class DomainError(AsymmetryError, ValueError):
    pass


class ShapeMismatch(AsymmetryError, ValueError):
    pass


class DimMismatch(ShapeMismatch):
    pass


class TraceNotOne(AsymmetryError, ValueError):
    pass


class NotNormalized(AsymmetryError, ValueError):
    pass


class TraceLoss(AsymmetryError):
    """A channel lost more trace than it declared."""

    def __init__(self, amount: float, allowed: float):
        self.amount = float(amount)
        self.allowed = float(allowed)
        super().__init__(f"trace deficit {amount:.3e} exceeds the allowed {allowed:.3e}")


class NotUnitary(AsymmetryError, ValueError):
    pass


class NotClosed(AsymmetryError, ValueError):
    pass


class WrongVariant(AsymmetryError, TypeError):
    pass


class NotTracePreserving(AsymmetryError):
    def __init__(self, residual: float):
        self.residual = float(residual)
        super().__init__(f"recovery map completeness residual {residual:.3e} exceeds 1e-8")


class EmptyTrajectory(AsymmetryError, ValueError):
    pass


class OutOfRange(AsymmetryError, ValueError):
    pass


class GuardBandViolation(AsymmetryError, ValueError):
    pass


class ConfigParse(AsymmetryError, ValueError):
    pass


class ConsistencyError(AsymmetryError):
    """Two routes to the same quantity disagree beyond tolerance."""
