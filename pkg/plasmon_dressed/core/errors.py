"""Exception hierarchy shared by every plasmon_dressed module."""

from typing import List, Optional


class PlasmonError(Exception):
    """Base class for all errors raised by plasmon_dressed."""


class DomainError(PlasmonError, ValueError):
    """A physical input is outside the domain of an operation."""


class GeometryError(DomainError):
    """Emitter or detector placed inside (or on) the sphere."""


class GridError(DomainError):
    """A sampling grid is too narrow, too coarse or not strictly increasing."""


class ConfigError(PlasmonError):
    """Configuration document rejected.

    Attributes:
        problems: One "field: message" string per offending key.
    """

    def __init__(self, message: str, problems: Optional[List[str]] = None):
        super().__init__(message)
        self.problems = problems or []


class NumericalError(PlasmonError):
    """A numerical routine produced a result that violates its contract."""


class FitError(NumericalError):
    """Lorentzian extraction failed for one multipole order."""

    def __init__(self, message: str, order: Optional[int] = None):
        if order is not None:
            message = f"order {order}: {message}"
        super().__init__(message)
        self.order = order


class DefectiveMatrixError(NumericalError):
    """Effective Hamiltonian is (numerically) not diagonalizable."""
