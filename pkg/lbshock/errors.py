"""Exception hierarchy shared by the solver, the exact oracle and the CLI."""
from __future__ import annotations

from typing import Optional, Tuple


class LBShockError(RuntimeError):
    """Root of every numerical failure raised by lbshock."""


class NegativeEnergy(LBShockError):
    pass


class DegenerateDensity(LBShockError):
    pass


class NegativeLevelDensity(LBShockError):
    pass


class NumericalFailure(LBShockError):
    def __init__(
        self,
        message: str,
        *,
        step: Optional[int] = None,
        node: Optional[Tuple[int, ...]] = None,
    ) -> None:
        super().__init__(message)
        self.step = step
        self.node = node


class VacuumGenerated(LBShockError):
    pass


class NoConvergence(LBShockError):
    pass


class GridMismatch(LBShockError):
    pass


class ShockNotFound(LBShockError):
    pass


__all__ = [
    "LBShockError",
    "NegativeEnergy",
    "DegenerateDensity",
    "NegativeLevelDensity",
    "NumericalFailure",
    "VacuumGenerated",
    "NoConvergence",
    "GridMismatch",
    "ShockNotFound",
]
