"""Macroscopic state and ideal-gas thermodynamics in lattice units (dx = dt = 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence, Tuple

import numpy as np

from .errors import NegativeEnergy

ENERGY_CLAMP = 1e-12
SIGMA_RANGE = (0.4, 0.55)
DEFAULT_GHOST = 4

Boundary = Literal["ghost", "periodic"]


@dataclass(frozen=True)
class GasModel:
    """Specific-heat ratio, lattice dimension and rest-density fraction.

    ``sigma`` is the fraction of the node density kept at rest (1-D only).
    ``strict_sigma`` enforces the 0.4-0.55 band; relaxing it still requires
    ``0 <= sigma < 1`` so the moving levels keep positive density.
    """

    gamma: float = 1.4
    dim: int = 1
    sigma: float = 0.5
    tau: float = 1.0
    strict_sigma: bool = True

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"[lbshock] lattice dimension must be 1 or 2, got {self.dim}")
        upper = 1.0 + 2.0 / self.dim
        if not (1.0 < self.gamma <= upper):
            raise ValueError(
                f"[lbshock] gamma={self.gamma} outside (1, {upper:g}] for D={self.dim}"
            )
        if self.tau != 1.0:
            raise ValueError(f"[lbshock] only tau=1 is supported, got {self.tau}")
        if self.dim == 1:
            lo, hi = SIGMA_RANGE
            if self.strict_sigma and not (lo <= self.sigma <= hi):
                raise ValueError(
                    f"[lbshock] sigma={self.sigma} outside [{lo}, {hi}]"
                )
            if not (0.0 <= self.sigma < 1.0):
                raise ValueError(f"[lbshock] sigma={self.sigma} outside [0, 1)")

    def with_dim(self, dim: int) -> "GasModel":
        return GasModel(
            gamma=self.gamma,
            dim=dim,
            sigma=self.sigma,
            tau=self.tau,
            strict_sigma=self.strict_sigma,
        )


@dataclass(frozen=True)
class NodeState:
    rho: float
    vel: Tuple[float, ...]
    etot: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "vel", tuple(float(v) for v in self.vel))
        if not self.rho > 0.0:
            raise ValueError(f"[lbshock] node density must be positive, got {self.rho}")

    @property
    def dim(self) -> int:
        return len(self.vel)


def clamp_internal_energy(e: np.ndarray | float) -> np.ndarray | float:
    """Clamp round-off negatives to zero; anything below -ENERGY_CLAMP is fatal."""
    arr = np.asarray(e, dtype=np.float64)
    if np.any(arr < -ENERGY_CLAMP):
        worst = float(arr.min())
        raise NegativeEnergy(f"[lbshock] internal energy {worst:.3e} below clamp band")
    clamped = np.where(arr < 0.0, 0.0, arr)
    if np.ndim(e) == 0:
        return float(clamped)
    return clamped


def specific_internal_energy(vel: np.ndarray, etot: np.ndarray) -> np.ndarray:
    vel = np.asarray(vel, dtype=np.float64)
    return clamp_internal_energy(
        np.asarray(etot, dtype=np.float64) - 0.5 * np.sum(vel * vel, axis=-1)
    )


def internal_energy(s: NodeState) -> float:
    kinetic = 0.5 * math.fsum(v * v for v in s.vel)
    return float(clamp_internal_energy(s.etot - kinetic))


def pressure(rho, e, g: GasModel):
    return (g.gamma - 1.0) * rho * e


def phi(e, g: GasModel):
    return (1.0 - 0.5 * g.dim * (g.gamma - 1.0)) * e


def sound_speed(rho, e, g: GasModel):
    p = pressure(rho, e, g)
    return np.sqrt(g.gamma * p / rho)


def internal_energy_from_pressure(rho, p, gamma: float):
    return p / ((gamma - 1.0) * rho)


@dataclass
class FlowField:
    """Per-node (rho, vel, etot) over the interior plus ghost bands.

    Arrays are stored struct-of-arrays: ``rho`` and ``etot`` have the stored
    shape, ``vel`` has the stored shape plus a trailing axis of length D.
    Periodic axes carry no ghost storage.
    """

    shape: Tuple[int, ...]
    boundary: Tuple[str, ...]
    ghost: Tuple[int, ...]
    rho: np.ndarray
    vel: np.ndarray
    etot: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.shape = tuple(int(n) for n in self.shape)
        self.boundary = tuple(self.boundary)
        self.ghost = tuple(int(w) for w in self.ghost)
        if not (len(self.shape) == len(self.boundary) == len(self.ghost)):
            raise ValueError("[lbshock] shape, boundary and ghost must have equal rank")
        for mode, width in zip(self.boundary, self.ghost):
            if mode not in ("ghost", "periodic"):
                raise ValueError(f"[lbshock] unknown boundary mode {mode!r}")
            if mode == "periodic" and width != 0:
                raise ValueError("[lbshock] periodic axes carry no ghost band")
        expected = self.stored_shape
        if self.rho.shape != expected or self.etot.shape != expected:
            raise ValueError(
                f"[lbshock] state arrays have shape {self.rho.shape}, expected {expected}"
            )
        if self.vel.shape != expected + (self.dim,):
            raise ValueError(
                f"[lbshock] velocity array has shape {self.vel.shape}, "
                f"expected {expected + (self.dim,)}"
            )

    @classmethod
    def from_interior(
        cls,
        rho: np.ndarray,
        vel: np.ndarray,
        etot: np.ndarray,
        boundary: Sequence[str],
        ghost_width: int = DEFAULT_GHOST,
    ) -> "FlowField":
        rho = np.asarray(rho, dtype=np.float64)
        vel = np.asarray(vel, dtype=np.float64)
        etot = np.asarray(etot, dtype=np.float64)
        ghost = tuple(ghost_width if mode == "ghost" else 0 for mode in boundary)
        pad = [(w, w) for w in ghost]
        return cls(
            shape=rho.shape,
            boundary=tuple(boundary),
            ghost=ghost,
            rho=np.pad(rho, pad, mode="edge"),
            vel=np.pad(vel, pad + [(0, 0)], mode="edge"),
            etot=np.pad(etot, pad, mode="edge"),
        )

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def stored_shape(self) -> Tuple[int, ...]:
        return tuple(n + 2 * w for n, w in zip(self.shape, self.ghost))

    @property
    def interior_slices(self) -> Tuple[slice, ...]:
        return tuple(slice(w, w + n) for n, w in zip(self.shape, self.ghost))

    def interior(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        sl = self.interior_slices
        return self.rho[sl], self.vel[sl], self.etot[sl]

    def node(self, index: Sequence[int]) -> NodeState:
        """State of an interior node, indexed in interior coordinates."""
        stored = tuple(int(i) + w for i, w in zip(index, self.ghost))
        return NodeState(
            rho=float(self.rho[stored]),
            vel=tuple(self.vel[stored]),
            etot=float(self.etot[stored]),
        )

    def copy(self) -> "FlowField":
        return FlowField(
            shape=self.shape,
            boundary=self.boundary,
            ghost=self.ghost,
            rho=self.rho.copy(),
            vel=self.vel.copy(),
            etot=self.etot.copy(),
        )

    def internal_energy(self) -> np.ndarray:
        """Interior specific internal energy."""
        _, vel, etot = self.interior()
        return specific_internal_energy(vel, etot)

    def totals(self) -> Tuple[float, np.ndarray, float]:
        """Interior sums of rho, rho*v and rho*E."""
        rho, vel, etot = self.interior()
        mass = float(np.sum(rho))
        momentum = np.sum(rho[..., None] * vel, axis=tuple(range(self.dim)))
        energy = float(np.sum(rho * etot))
        return mass, momentum, energy


__all__ = [
    "Boundary",
    "DEFAULT_GHOST",
    "ENERGY_CLAMP",
    "FlowField",
    "GasModel",
    "NodeState",
    "SIGMA_RANGE",
    "clamp_internal_energy",
    "internal_energy",
    "internal_energy_from_pressure",
    "phi",
    "pressure",
    "sound_speed",
    "specific_internal_energy",
]
