"""Scatter/gather time stepping with tau = 1.

Every stored node (interior and ghost) re-emits its full equilibrium as
packets; each interior node's new (rho, rho v, rho E) is the sum of the
packets landing on it. Periodic axes wrap destinations; ghost axes drop
packets leaving the stored band and are refilled by zero-gradient copies.
"""
from __future__ import annotations

import concurrent.futures
import contextlib
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .equilibrium import DirectionSet, emit_batch
from .errors import DegenerateDensity, NegativeEnergy, NegativeLevelDensity, NumericalFailure
from .gas import ENERGY_CLAMP, FlowField, GasModel


@dataclass(frozen=True)
class StepConfig:
    deterministic: bool = True
    max_steps: int = 0
    record_diagnostics: bool = True
    threads: int = 1

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise ValueError(f"[lbshock] max_steps must be >= 0, got {self.max_steps}")
        if self.threads < 1:
            raise ValueError(f"[lbshock] threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class StepReport:
    step_index: int
    total_mass: float
    total_momentum: Tuple[float, ...]
    total_energy: float
    min_density: float
    min_internal_energy: float
    wall_time: float
    ghost_overflow: int = 0


def apply_boundaries(field: FlowField) -> FlowField:
    """Refill ghost bands with copies of the nearest interior node."""
    if not any(field.ghost):
        return field
    rho, vel, etot = field.interior()
    return FlowField.from_interior(
        rho, vel, etot, field.boundary, ghost_width=max(field.ghost)
    )


class _Scatter:
    """Packet accumulation onto the stored grid for one step.

    On periodic axes every destination receives its packets in an order set
    by (ghost-axis source, periodic offset, packet slot) only, so fields that
    are uniform along a periodic axis stay bit-identical along it.
    """

    def __init__(self, field: FlowField, g: GasModel) -> None:
        self.field = field
        self.g = g
        self.dirs = DirectionSet.for_dim(g.dim)
        self.stored = field.stored_shape
        self.size = int(np.prod(self.stored))
        self.rho = field.rho.reshape(-1)
        self.vel = field.vel.reshape(self.size, g.dim)
        self.etot = field.etot.reshape(-1)
        self.coords = np.indices(self.stored).reshape(g.dim, -1).T
        self.periodic = "periodic" in field.boundary

    def _order(self, lo: int, hi: int, offsets: np.ndarray) -> np.ndarray:
        n, per_node = offsets.shape[:2]
        keys = [np.broadcast_to(np.arange(per_node), (n, per_node)).reshape(-1)]
        for axis in reversed(range(self.g.dim)):
            if self.field.boundary[axis] == "periodic":
                keys.append(offsets[..., axis].reshape(-1))
            else:
                source = self.coords[lo:hi, axis]
                keys.append(np.broadcast_to(source[:, None], (n, per_node)).reshape(-1))
        return np.lexsort(keys)

    def chunk(self, lo: int, hi: int) -> Tuple[np.ndarray, int]:
        """Partial grid sums (mass, momentum..., energy) for sources [lo, hi)."""
        dim = self.g.dim
        batch = emit_batch(self.rho[lo:hi], self.vel[lo:hi], self.etot[lo:hi], self.g, self.dirs)
        dest = self.coords[lo:hi, None, :] + batch.offsets
        valid = np.ones(batch.mass.shape, dtype=bool)
        overflow = np.zeros(batch.mass.shape, dtype=bool)
        for axis, (n, mode, width) in enumerate(
            zip(self.stored, self.field.boundary, self.field.ghost)
        ):
            if mode == "periodic":
                dest[..., axis] %= n
            else:
                valid &= (dest[..., axis] >= 0) & (dest[..., axis] < n)
                overflow |= np.abs(batch.offsets[..., axis]) > width
        flat = np.ravel_multi_index(
            tuple(np.where(valid, dest[..., a], 0).reshape(-1) for a in range(dim)),
            self.stored,
        )
        keep = valid.reshape(-1)
        if self.periodic:
            order = self._order(lo, hi, batch.offsets)
            order = order[keep[order]]
        else:
            order = np.flatnonzero(keep)
        idx = flat[order]
        sums = np.empty((dim + 2, self.size))
        sums[0] = np.bincount(idx, weights=batch.mass.reshape(-1)[order], minlength=self.size)
        mom = batch.momentum.reshape(-1, dim)[order]
        for a in range(dim):
            sums[1 + a] = np.bincount(idx, weights=mom[:, a], minlength=self.size)
        sums[dim + 1] = np.bincount(
            idx, weights=batch.energy.reshape(-1)[order], minlength=self.size
        )
        n_overflow = int(np.count_nonzero(overflow & (batch.mass > 0.0)))
        return sums, n_overflow

    def spans(self, threads: int) -> List[Tuple[int, int]]:
        # whole slabs of the leading axis, so a chunk holds complete rows
        slab = self.size // self.stored[0]
        bounds = np.linspace(0, self.stored[0], threads + 1).astype(int) * slab
        return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    def run(
        self,
        cfg: StepConfig,
        pool: Optional[concurrent.futures.ThreadPoolExecutor] = None,
    ) -> Tuple[np.ndarray, int]:
        if cfg.threads == 1 or pool is None:
            return self.chunk(0, self.size)
        total = np.zeros((self.g.dim + 2, self.size))
        overflow = 0
        futures = [pool.submit(self.chunk, lo, hi) for lo, hi in self.spans(cfg.threads)]
        ordered = futures if cfg.deterministic else concurrent.futures.as_completed(futures)
        for future in ordered:
            part, count = future.result()
            total += part
            overflow += count
        return total, overflow


def step(
    field: FlowField,
    g: GasModel,
    cfg: StepConfig,
    step_index: int = 1,
    pool: Optional[concurrent.futures.ThreadPoolExecutor] = None,
) -> Tuple[FlowField, StepReport]:
    """Advance one step. ``pool`` is reused when given; otherwise threaded
    configurations open a pool for this step only."""
    if field.dim != g.dim:
        raise ValueError(f"[lbshock] field has D={field.dim}, gas model D={g.dim}")
    started = time.perf_counter()
    try:
        if cfg.threads > 1 and pool is None:
            with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.threads) as own:
                sums, overflow = _Scatter(field, g).run(cfg, own)
        else:
            sums, overflow = _Scatter(field, g).run(cfg, pool)
    except (NegativeEnergy, DegenerateDensity, NegativeLevelDensity) as exc:
        raise NumericalFailure(
            f"[lbshock] equilibrium failed at step {step_index}: {exc}",
            step=step_index,
        ) from exc

    grid = sums.reshape((g.dim + 2,) + field.stored_shape)
    sl = (slice(None),) + field.interior_slices
    interior = grid[sl]
    mass = interior[0]
    if not np.all(mass > 0.0):
        bad = tuple(int(i) for i in np.argwhere(~(mass > 0.0))[0])
        raise NumericalFailure(
            f"[lbshock] non-positive density {float(mass[bad]):.3e} at node {bad} "
            f"(step {step_index})",
            step=step_index,
            node=bad,
        )
    vel = np.moveaxis(interior[1 : 1 + g.dim] / mass, 0, -1)
    etot = interior[g.dim + 1] / mass
    kinetic = 0.5 * np.sum(vel * vel, axis=-1)
    e = etot - kinetic
    if np.any(e < -ENERGY_CLAMP):
        bad = tuple(int(i) for i in np.argwhere(e < -ENERGY_CLAMP)[0])
        raise NumericalFailure(
            f"[lbshock] negative internal energy {float(e[bad]):.3e} at node {bad} "
            f"(step {step_index})",
            step=step_index,
            node=bad,
        )
    etot = np.where(e < 0.0, kinetic, etot)
    ghost_width = max(field.ghost) if any(field.ghost) else 0
    new = FlowField.from_interior(mass, vel, etot, field.boundary, ghost_width=ghost_width)
    wall = time.perf_counter() - started

    if cfg.record_diagnostics:
        total_mass, total_momentum, total_energy = new.totals()
        report = StepReport(
            step_index=step_index,
            total_mass=total_mass,
            total_momentum=tuple(float(m) for m in total_momentum),
            total_energy=total_energy,
            min_density=float(mass.min()),
            min_internal_energy=float(np.maximum(e, 0.0).min()),
            wall_time=wall,
            ghost_overflow=overflow,
        )
    else:
        nan = float("nan")
        report = StepReport(
            step_index=step_index,
            total_mass=nan,
            total_momentum=tuple(nan for _ in range(g.dim)),
            total_energy=nan,
            min_density=nan,
            min_internal_energy=nan,
            wall_time=wall,
            ghost_overflow=overflow,
        )
    return new, report


def run(
    field: FlowField, g: GasModel, cfg: StepConfig
) -> Tuple[FlowField, List[StepReport]]:
    reports: List[StepReport] = []
    with contextlib.ExitStack() as stack:
        pool = None
        if cfg.threads > 1:
            pool = stack.enter_context(
                concurrent.futures.ThreadPoolExecutor(max_workers=cfg.threads)
            )
        for index in range(1, cfg.max_steps + 1):
            field = apply_boundaries(field)
            field, report = step(field, g, cfg, step_index=index, pool=pool)
            reports.append(report)
    return field, reports


def total_overflow(reports: List[StepReport]) -> int:
    return sum(r.ghost_overflow for r in reports)


__all__ = [
    "StepConfig",
    "StepReport",
    "apply_boundaries",
    "run",
    "step",
    "total_overflow",
]
