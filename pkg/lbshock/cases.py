"""Initial fields for the shock-tube and periodic cases."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .gas import DEFAULT_GHOST, FlowField, GasModel, internal_energy_from_pressure
from .riemann import SOD_LEFT, SOD_RIGHT, PrimitiveState

MIN_NODES = 4


def riemann_field(
    nx: int,
    ny: int,
    g: GasModel,
    left: PrimitiveState = SOD_LEFT,
    right: PrimitiveState = SOD_RIGHT,
    x0: Optional[float] = None,
    ghost: int = DEFAULT_GHOST,
) -> FlowField:
    """Two-state tube along x; nodes with x = i + 0.5 < x0 hold the left state.

    The 2-D lattice is periodic across y, so every row carries the same data.
    """
    if nx < MIN_NODES:
        raise ValueError(f"[lbshock] nx must be >= {MIN_NODES}, got {nx}")
    if ghost < 1:
        raise ValueError(f"[lbshock] ghost width must be >= 1, got {ghost}")
    x0 = 0.5 * nx if x0 is None else float(x0)
    x = np.arange(nx, dtype=np.float64) + 0.5
    is_left = x < x0

    rho = np.where(is_left, left.rho, right.rho)
    u = np.where(is_left, left.u, right.u)
    p = np.where(is_left, left.p, right.p)
    etot = internal_energy_from_pressure(rho, p, g.gamma) + 0.5 * u * u

    if g.dim == 1:
        return FlowField.from_interior(rho, u[:, None], etot, ("ghost",), ghost_width=ghost)
    if ny < 1:
        raise ValueError(f"[lbshock] ny must be >= 1, got {ny}")
    vel = np.zeros((nx, ny, 2))
    vel[..., 0] = u[:, None]
    return FlowField.from_interior(
        np.repeat(rho[:, None], ny, axis=1),
        vel,
        np.repeat(etot[:, None], ny, axis=1),
        ("ghost", "periodic"),
        ghost_width=ghost,
    )


def periodic_field(
    shape: Sequence[int], g: GasModel, seed: int = 0, amplitude: float = 0.1
) -> FlowField:
    """Smooth random data on a fully periodic lattice.

    Each quantity is a base value plus a few low-wavenumber sinusoids with
    random phases, so the field stays well inside the admissible region.
    """
    shape = tuple(int(n) for n in shape)
    if len(shape) != g.dim:
        raise ValueError(f"[lbshock] shape {shape} does not match D={g.dim}")
    rng = np.random.default_rng(seed)
    grids = np.meshgrid(
        *[np.arange(n, dtype=np.float64) / n for n in shape], indexing="ij"
    )

    def wave(base: float, scale: float) -> np.ndarray:
        out = np.full(shape, base)
        for _ in range(3):
            k = rng.integers(1, 3, size=len(shape))
            phase = rng.uniform(0.0, 2.0 * np.pi)
            arg = sum(2.0 * np.pi * kk * xx for kk, xx in zip(k, grids))
            out += scale * rng.uniform(-1.0, 1.0) * np.sin(arg + phase)
        return out

    rho = wave(1.0, amplitude)
    p = wave(1.0, amplitude)
    vel = np.stack([wave(rng.uniform(-0.5, 0.5), amplitude) for _ in shape], axis=-1)
    etot = internal_energy_from_pressure(rho, p, g.gamma) + 0.5 * np.sum(vel * vel, axis=-1)
    return FlowField.from_interior(rho, vel, etot, ("periodic",) * len(shape))


__all__ = ["MIN_NODES", "periodic_field", "riemann_field"]
