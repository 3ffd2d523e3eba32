"""Equilibrium decomposition of a node into weighted packets.

A node with state (rho, v, E) splits its velocity end point over the
surrounding lattice corners (weight alpha per corner). From each corner it
emits one packet per velocity level and direction. A packet moves by the
corner offset plus the level speed along its direction, and carries mass
``alpha * d``, momentum ``alpha * d * xi`` and energy
``alpha * d * (0.5 |xi|^2 + phi)``, where ``d`` is the level density and
``xi`` is v plus the level velocity.

The scalar API (``emit_packets`` and friends) works on a single NodeState;
``emit_batch`` is the array form the streaming engine uses for whole fields.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DegenerateDensity, NegativeLevelDensity
from .gas import GasModel, NodeState, phi, specific_internal_energy

LEVEL_DENSITY_TOL = 1e-12


@dataclass(frozen=True)
class DirectionSet:
    dim: int
    b0: int
    b: int
    unit_dirs: np.ndarray

    @classmethod
    def for_dim(cls, dim: int) -> "DirectionSet":
        if dim == 1:
            dirs = np.array([[1], [-1]], dtype=np.int64)
        elif dim == 2:
            dirs = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=np.int64)
        else:
            raise ValueError(f"[lbshock] no direction set for D={dim}")
        dirs.setflags(write=False)
        return cls(dim=dim, b0=1, b=len(dirs), unit_dirs=dirs)

    def symmetry_sums(self, speed: int = 1) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """First, second and third moment tensors of the scaled directions."""
        c = self.unit_dirs * speed
        first = c.sum(axis=0)
        second = np.einsum("ji,jk->ik", c, c)
        third = np.einsum("ji,jk,jl->ikl", c, c, c)
        return first, second, third

    def level_table(self) -> Tuple[np.ndarray, np.ndarray]:
        """(level index, unit direction) per emitted direction, in emission order.

        Level 0 (rest) exists only on the 1-D lattice.
        """
        levels: List[int] = []
        dirs: List[np.ndarray] = []
        if self.dim == 1:
            levels.append(0)
            dirs.append(np.zeros(self.dim, dtype=np.int64))
        for level in (1, 2):
            for unit in self.unit_dirs:
                levels.append(level)
                dirs.append(unit)
        return np.array(levels, dtype=np.int64), np.array(dirs, dtype=np.int64)


@dataclass(frozen=True)
class NodeEquilibrium:
    c1: int
    c2: int
    d0: float
    d1: float
    d2: float
    phi: float


@dataclass(frozen=True)
class CornerWeight:
    offset: Tuple[int, ...]
    alpha: float


@dataclass(frozen=True)
class Packet:
    dest_offset: Tuple[int, ...]
    mass: float
    momentum: Tuple[float, ...]
    energy: float


@dataclass(frozen=True)
class PacketBatch:
    """Packets of N nodes, P packets each, ordered corner, level, direction.

    ``offsets`` (N, P, D) int, ``mass`` (N, P), ``momentum`` (N, P, D),
    ``energy`` (N, P).
    """

    offsets: np.ndarray
    mass: np.ndarray
    momentum: np.ndarray
    energy: np.ndarray

    def moments(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            self.mass.sum(axis=1),
            self.momentum.sum(axis=1),
            self.energy.sum(axis=1),
        )


def rest_density(rho, g: GasModel):
    if g.dim == 1:
        return g.sigma * rho
    return 0.0 * rho


def _levels(rho: np.ndarray, e: np.ndarray, d0: np.ndarray, g: GasModel):
    moving = rho - d0
    if np.any(moving <= 0.0):
        raise DegenerateDensity(
            f"[lbshock] rest density leaves no moving mass (min rho - d0 = "
            f"{float(np.min(moving)):.3e}); check sigma"
        )
    arg = g.dim * (g.gamma - 1.0) * e * rho / moving
    c1 = np.floor(np.sqrt(arg)).astype(np.int64)
    # sqrt may round across an integer; pin c1^2 <= arg < (c1 + 1)^2
    c1 = np.where(c1 * c1 > arg, c1 - 1, c1)
    c1 = np.where((c1 + 1) * (c1 + 1) <= arg, c1 + 1, c1)
    return c1, c1 + 1


def _level_densities(rho, e, d0, c1, c2, g: GasModel, b: int):
    moving = rho - d0
    thermal = g.dim * (g.gamma - 1.0) * rho * e
    c1sq = (c1 * c1).astype(np.float64)
    c2sq = (c2 * c2).astype(np.float64)
    spread = c2sq - c1sq
    d1 = (c2sq * moving - thermal) / (b * spread)
    d2 = (thermal - c1sq * moving) / (b * spread)
    floor = -LEVEL_DENSITY_TOL * np.maximum(rho, 1.0)
    if np.any(d1 < floor) or np.any(d2 < floor):
        worst = float(min(np.min(d1), np.min(d2)))
        raise NegativeLevelDensity(
            f"[lbshock] level density {worst:.3e} < 0; level speeds do not bracket the state"
        )
    return np.maximum(d1, 0.0), np.maximum(d2, 0.0)


def velocity_levels(rho: float, e: float, d0: float, g: GasModel) -> Tuple[int, int]:
    c1, c2 = _levels(np.asarray(rho), np.asarray(e), np.asarray(d0), g)
    return int(c1), int(c2)


def level_densities(
    rho: float, e: float, d0: float, c1: int, c2: int, g: GasModel
) -> Tuple[float, float]:
    b = DirectionSet.for_dim(g.dim).b
    d1, d2 = _level_densities(
        np.asarray(rho), np.asarray(e), np.asarray(d0), np.asarray(c1), np.asarray(c2), g, b
    )
    return float(d1), float(d2)


def node_equilibrium(s: NodeState, g: GasModel) -> NodeEquilibrium:
    vel = np.asarray(s.vel, dtype=np.float64)
    e = float(specific_internal_energy(vel, s.etot))
    d0 = float(rest_density(s.rho, g))
    c1, c2 = velocity_levels(s.rho, e, d0, g)
    d1, d2 = level_densities(s.rho, e, d0, c1, c2, g)
    return NodeEquilibrium(c1=c1, c2=c2, d0=d0, d1=d1, d2=d2, phi=float(phi(e, g)))


def _corners(vel: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Lexicographic corners of the cell holding each velocity end point."""
    base = np.floor(vel)
    frac = vel - base
    base = base.astype(np.int64)
    n, dim = vel.shape
    bits = np.array(list(itertools.product((0, 1), repeat=dim)), dtype=np.int64)
    offsets = base[:, None, :] + bits[None, :, :]
    weights = np.where(bits[None, :, :] == 1, frac[:, None, :], 1.0 - frac[:, None, :])
    return offsets, np.prod(weights, axis=2)


def corner_weights(vel: Sequence[float]) -> List[CornerWeight]:
    v = np.atleast_1d(np.asarray(vel, dtype=np.float64))
    if not np.all(np.isfinite(v)):
        raise ValueError(f"[lbshock] non-finite velocity {tuple(v)}")
    offsets, alpha = _corners(v[None, :])
    return [
        CornerWeight(offset=tuple(int(o) for o in off), alpha=float(a))
        for off, a in zip(offsets[0], alpha[0])
        if a > 0.0
    ]


def emit_batch(
    rho: np.ndarray,
    vel: np.ndarray,
    etot: np.ndarray,
    g: GasModel,
    dirs: DirectionSet,
) -> PacketBatch:
    rho = np.asarray(rho, dtype=np.float64).reshape(-1)
    vel = np.asarray(vel, dtype=np.float64).reshape(rho.shape[0], g.dim)
    etot = np.asarray(etot, dtype=np.float64).reshape(-1)

    e = specific_internal_energy(vel, etot)
    d0 = rest_density(rho, g)
    c1, c2 = _levels(rho, e, d0, g)
    d1, d2 = _level_densities(rho, e, d0, c1, c2, g, dirs.b)

    level_of, unit = dirs.level_table()
    speeds = np.stack([np.zeros_like(c1), c1, c2], axis=1)[:, level_of]
    dens = np.stack([d0, d1, d2], axis=1)[:, level_of]
    # (N, L, D) lattice displacement of each direction
    cvec = speeds[:, :, None] * unit[None, :, :]

    corner_off, alpha = _corners(vel)
    n, k = alpha.shape
    lvl = level_of.shape[0]

    xi = vel[:, None, :] + cvec
    zeta = 0.5 * np.sum(xi * xi, axis=2) + phi(e, g)[:, None]
    mass = alpha[:, :, None] * dens[:, None, :]
    dest = corner_off[:, :, None, :] + cvec[:, None, :, :]

    return PacketBatch(
        offsets=dest.reshape(n, k * lvl, g.dim),
        mass=mass.reshape(n, k * lvl),
        momentum=(mass[..., None] * xi[:, None, :, :]).reshape(n, k * lvl, g.dim),
        energy=(mass * zeta[:, None, :]).reshape(n, k * lvl),
    )


def emit_packets(s: NodeState, g: GasModel, dirs: DirectionSet) -> List[Packet]:
    if s.dim != g.dim:
        raise ValueError(f"[lbshock] state has D={s.dim}, gas model D={g.dim}")
    batch = emit_batch(
        np.array([s.rho]), np.array([s.vel]), np.array([s.etot]), g, dirs
    )
    _, alpha = _corners(np.asarray([s.vel], dtype=np.float64))
    per_corner = batch.mass.shape[1] // alpha.shape[1]
    keep = np.repeat(alpha[0] > 0.0, per_corner)
    return [
        Packet(
            dest_offset=tuple(int(o) for o in batch.offsets[0, i]),
            mass=float(batch.mass[0, i]),
            momentum=tuple(float(m) for m in batch.momentum[0, i]),
            energy=float(batch.energy[0, i]),
        )
        for i in np.flatnonzero(keep)
    ]


def reconstruct_moments(
    packets: Sequence[Packet], dim: int = 1
) -> Tuple[float, np.ndarray, float]:
    if not packets:
        return 0.0, np.zeros(dim), 0.0
    mass = math.fsum(p.mass for p in packets)
    momentum = np.array(
        [math.fsum(p.momentum[i] for p in packets) for i in range(len(packets[0].momentum))]
    )
    energy = math.fsum(p.energy for p in packets)
    return mass, momentum, energy


__all__ = [
    "CornerWeight",
    "DirectionSet",
    "LEVEL_DENSITY_TOL",
    "NodeEquilibrium",
    "Packet",
    "PacketBatch",
    "corner_weights",
    "emit_batch",
    "emit_packets",
    "level_densities",
    "node_equilibrium",
    "reconstruct_moments",
    "rest_density",
    "velocity_levels",
]
