"""Profile tables, error norms, wave locators and cost comparisons."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Iterator, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import GridMismatch, ShockNotFound
from .gas import FlowField, GasModel, pressure, specific_internal_energy

if TYPE_CHECKING:
    from .streaming import StepReport

PROFILE_COLUMNS = ("x", "rho", "u", "e", "p")
EXACT_COLUMNS = tuple(f"{name}_exact" for name in PROFILE_COLUMNS[1:])
VARIABLES = PROFILE_COLUMNS[1:]
SHOCK_THRESHOLD = 1e-8
PRESSURE_JUMP_FRACTION = 0.5
CSV_FLOAT_FORMAT = "%.17g"

# emitted packets per node on each lattice
PACKETS_PER_NODE = {1: 10, 2: 32}


@dataclass(frozen=True)
class ProfileTable:
    """Longitudinal profile (x, rho, u, e, p), optionally with exact columns."""

    frame: pd.DataFrame

    def __post_init__(self) -> None:
        missing = [c for c in PROFILE_COLUMNS if c not in self.frame.columns]
        if missing:
            raise ValueError(f"[lbshock] profile missing columns {missing}")
        x = self.frame["x"].to_numpy(np.float64)
        if x.size > 1 and not np.all(np.diff(x) > 0.0):
            raise ValueError("[lbshock] profile x must be strictly increasing")

    @classmethod
    def from_columns(cls, **columns: Sequence[float]) -> "ProfileTable":
        frame = pd.DataFrame(
            {name: np.asarray(values, dtype=np.float64) for name, values in columns.items()}
        )
        return cls(frame)

    @classmethod
    def read_csv(cls, path: Path) -> "ProfileTable":
        return cls(pd.read_csv(path, dtype=np.float64, float_precision="round_trip"))

    def __len__(self) -> int:
        return len(self.frame)

    def column(self, name: str) -> np.ndarray:
        return self.frame[name].to_numpy(np.float64)

    @property
    def x(self) -> np.ndarray:
        return self.column("x")

    @property
    def has_exact(self) -> bool:
        return all(c in self.frame.columns for c in EXACT_COLUMNS)

    def rows(self) -> Iterator[Tuple[float, float, float, float, float]]:
        for row in self.frame[list(PROFILE_COLUMNS)].itertuples(index=False):
            yield tuple(float(v) for v in row)

    def with_exact(self, exact: "ProfileTable") -> "ProfileTable":
        if not np.array_equal(self.x, exact.x):
            raise GridMismatch("[lbshock] exact profile is sampled on a different grid")
        frame = self.frame[list(PROFILE_COLUMNS)].copy()
        for name in VARIABLES:
            frame[f"{name}_exact"] = exact.column(name)
        return ProfileTable(frame)

    def exact(self) -> "ProfileTable":
        if not self.has_exact:
            raise ValueError("[lbshock] profile carries no exact columns")
        return ProfileTable.from_columns(
            x=self.x, **{name: self.column(f"{name}_exact") for name in VARIABLES}
        )

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        columns = list(PROFILE_COLUMNS) + (list(EXACT_COLUMNS) if self.has_exact else [])
        self.frame[columns].to_csv(
            path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
        )
        return path


@dataclass(frozen=True)
class NormReport:
    norms: Dict[str, Dict[str, float]]
    shock_position_error: Optional[float] = None

    def lines(self, prefix: str = "") -> Iterator[str]:
        for name, values in self.norms.items():
            for kind in ("L1", "L2", "Linf"):
                yield f"{prefix}{name}_{kind}: {values[kind]:.6e}"
        if self.shock_position_error is not None:
            yield f"{prefix}shock_position_error: {self.shock_position_error:.6f}"


def error_norms(
    computed: ProfileTable,
    exact: ProfileTable,
    shock_position_error: Optional[float] = None,
) -> NormReport:
    if not np.array_equal(computed.x, exact.x):
        raise GridMismatch(
            f"[lbshock] cannot compare profiles on different grids "
            f"({len(computed)} vs {len(exact)} nodes)"
        )
    norms: Dict[str, Dict[str, float]] = {}
    for name in VARIABLES:
        delta = computed.column(name) - exact.column(name)
        abs_delta = np.abs(delta)
        norms[name] = {
            "L1": float(np.mean(abs_delta)),
            "L2": float(np.sqrt(np.mean(delta * delta))),
            "Linf": float(np.max(abs_delta)),
        }
    return NormReport(norms=norms, shock_position_error=shock_position_error)


def locate_shock(
    profile: ProfileTable,
    after: Optional[float] = None,
    threshold: float = SHOCK_THRESHOLD,
) -> float:
    """x of the steepest density gradient beyond ``after`` (default: right half).

    Only nodes whose pressure gradient reaches ``PRESSURE_JUMP_FRACTION`` of
    the regional maximum qualify, which excludes the contact (density jumps,
    pressure does not). Ties go to the larger x.
    """
    x = profile.x
    if x.size < 3:
        raise ValueError("[lbshock] shock location needs at least 3 nodes")
    grad = np.abs(np.gradient(profile.column("rho"), x))
    grad_p = np.abs(np.gradient(profile.column("p"), x))
    start = 0.5 * (x[0] + x[-1]) if after is None else after
    region = np.flatnonzero(x > start)
    if region.size == 0:
        raise ShockNotFound(f"[lbshock] no nodes beyond x={start}")
    peak_p = float(grad_p[region].max())
    if peak_p >= threshold:
        region = region[grad_p[region] >= PRESSURE_JUMP_FRACTION * peak_p]
    peak = float(grad[region].max())
    if peak < threshold:
        raise ShockNotFound(
            f"[lbshock] density gradient {peak:.3e} below threshold {threshold:g}"
        )
    # ties within round-off go to the larger x
    ties = region[grad[region] >= peak * (1.0 - 1e-12)]
    return float(x[ties[-1]])


def plateau_mean(
    profile: ProfileTable, lo: float, hi: float, column: str = "rho"
) -> float:
    """Mean of ``column`` over the central half of [lo, hi]."""
    quarter = 0.25 * (hi - lo)
    x = profile.x
    mask = (x >= lo + quarter) & (x <= hi - quarter)
    if not mask.any():
        raise ValueError(f"[lbshock] no nodes inside plateau [{lo}, {hi}]")
    return float(np.mean(profile.column(column)[mask]))


def conservation_totals(field: FlowField) -> Tuple[float, np.ndarray, float]:
    return field.totals()


def relative_drift(before: float, after: float) -> float:
    scale = max(abs(before), 1e-300)
    return abs(after - before) / scale


def timing_comparison(
    reports_1d: Sequence["StepReport"], reports_2d: Sequence["StepReport"]
) -> float:
    if len(reports_1d) != len(reports_2d):
        raise ValueError(
            f"[lbshock] runs differ in length ({len(reports_1d)} vs {len(reports_2d)} steps)"
        )
    t1 = math.fsum(r.wall_time for r in reports_1d)
    t2 = math.fsum(r.wall_time for r in reports_2d)
    if t1 <= 0.0:
        raise ValueError("[lbshock] 1-D run recorded no wall time")
    return t2 / t1


def packet_count_ratio(nodes_1d: int, nodes_2d: int) -> float:
    """Predicted 2-D/1-D cost from emitted packets per step."""
    return PACKETS_PER_NODE[2] * nodes_2d / (PACKETS_PER_NODE[1] * nodes_1d)


def profile_from_field(field: FlowField, g: GasModel) -> ProfileTable:
    """Interior profile along x; 2-D fields are averaged over y."""
    rho, vel, etot = field.interior()
    e = specific_internal_energy(vel, etot)
    p = pressure(rho, e, g)
    u = vel[..., 0]
    if field.dim == 2:
        rho, u, e, p = (np.mean(a, axis=1) for a in (rho, u, e, p))
    x = np.arange(field.shape[0], dtype=np.float64) + 0.5
    return ProfileTable.from_columns(x=x, rho=rho, u=u, e=e, p=p)


def grid_frame(field: FlowField, g: GasModel) -> pd.DataFrame:
    """Every interior node of a 2-D field, row-major in (x, y)."""
    if field.dim != 2:
        raise ValueError("[lbshock] grid output needs a 2-D field")
    rho, vel, etot = field.interior()
    e = specific_internal_energy(vel, etot)
    nx, ny = field.shape
    xs, ys = np.meshgrid(
        np.arange(nx, dtype=np.float64) + 0.5,
        np.arange(ny, dtype=np.float64) + 0.5,
        indexing="ij",
    )
    return pd.DataFrame(
        {
            "x": xs.reshape(-1),
            "y": ys.reshape(-1),
            "rho": rho.reshape(-1),
            "u": vel[..., 0].reshape(-1),
            "v": vel[..., 1].reshape(-1),
            "e": e.reshape(-1),
            "p": pressure(rho, e, g).reshape(-1),
        }
    )


def row_deviation(field: FlowField) -> float:
    """Largest spread across y of any interior quantity on a 2-D field."""
    if field.dim != 2:
        return 0.0
    rho, vel, etot = field.interior()
    spreads = [np.ptp(a, axis=1).max() for a in (rho, vel[..., 0], vel[..., 1], etot)]
    return float(max(spreads))


__all__ = [
    "CSV_FLOAT_FORMAT",
    "EXACT_COLUMNS",
    "NormReport",
    "PACKETS_PER_NODE",
    "PROFILE_COLUMNS",
    "ProfileTable",
    "conservation_totals",
    "error_norms",
    "grid_frame",
    "locate_shock",
    "packet_count_ratio",
    "plateau_mean",
    "profile_from_field",
    "relative_drift",
    "row_deviation",
    "timing_comparison",
]
