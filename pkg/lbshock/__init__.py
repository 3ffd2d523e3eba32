"""Adaptive-velocity lattice Boltzmann solver for compressible shock tubes."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import LBShockError
from .gas import FlowField, GasModel, NodeState

__all__ = ["FlowField", "GasModel", "LBShockError", "NodeState", "__version__"]
