"""``lbshock`` command line: Sod runs, the exact oracle and the 2-D/1-D benchmark.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import statistics
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .cases import MIN_NODES, periodic_field, riemann_field
from .diagnostics import (
    ProfileTable,
    error_norms,
    grid_frame,
    locate_shock,
    packet_count_ratio,
    profile_from_field,
    relative_drift,
    row_deviation,
    timing_comparison,
)
from .errors import LBShockError, ShockNotFound, VacuumGenerated
from .gas import DEFAULT_GHOST, FlowField, GasModel
from .manifest import describe_inputs, update_run
from .riemann import SOD_LEFT, SOD_RIGHT, PrimitiveState, RiemannSolution, solve_star, sod_profile
from .streaming import StepConfig, StepReport, run, total_overflow

COMMANDS = ("run", "bench", "oracle")
CASES = ("sod1d", "sod2d", "periodic-test")
DEFAULT_NY_2D = 4
MIN_REPEATS = 5

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


@dataclass(frozen=True)
class RunConfig:
    command: str = "run"
    case: str = "sod1d"
    nx: int = 400
    ny: int = 1
    steps: int = 75
    gamma: float = 1.4
    sigma: float = 0.5
    allow_sigma_override: bool = False
    deterministic: bool = True
    threads: int = 1
    out_path: Optional[Path] = None
    compare_exact: bool = False
    seed: int = 0
    left: PrimitiveState = SOD_LEFT
    right: PrimitiveState = SOD_RIGHT
    x0: Optional[float] = None
    repeats: int = MIN_REPEATS
    ghost: int = DEFAULT_GHOST
    manifest: Optional[Path] = None

    @property
    def dim(self) -> int:
        if self.case == "sod2d" or (self.case == "periodic-test" and self.ny > 1):
            return 2
        return 1

    @property
    def diaphragm(self) -> float:
        return 0.5 * self.nx if self.x0 is None else self.x0

    def gas(self, dim: Optional[int] = None) -> GasModel:
        return GasModel(
            gamma=self.gamma,
            dim=self.dim if dim is None else dim,
            sigma=self.sigma,
            strict_sigma=not self.allow_sigma_override,
        )

    def output(self) -> Path:
        if self.out_path is not None:
            return self.out_path
        stem = "oracle" if self.command == "oracle" else self.case
        return Path(f"lbshock_{stem}.csv")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _state(text: str) -> PrimitiveState:
    try:
        rho, u, p = (float(part) for part in text.split(","))
        return PrimitiveState(rho=rho, u=u, p=p)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected RHO,U,P with rho, p > 0 ({exc})") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lbshock",
        description="Adaptive-velocity lattice Boltzmann shock-tube solver.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--case", choices=CASES, default="sod1d")
    parser.add_argument("--nx", type=int, default=400)
    parser.add_argument("--ny", type=int, default=None, help="default 4 for sod2d, else 1")
    parser.add_argument("--steps", type=int, default=75)
    parser.add_argument("--gamma", type=float, default=1.4)
    parser.add_argument("--sigma", type=float, default=0.5, help="1-D rest fraction")
    parser.add_argument("--allow-sigma-override", action="store_true")
    parser.add_argument("--deterministic", type=_bool, default=True)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", type=Path, default=None, help="CSV (run/oracle) or report (bench)")
    parser.add_argument("--compare-exact", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--left", type=_state, default=SOD_LEFT, metavar="RHO,U,P")
    parser.add_argument("--right", type=_state, default=SOD_RIGHT, metavar="RHO,U,P")
    parser.add_argument("--x0", type=float, default=None, help="diaphragm position, default nx/2")
    parser.add_argument("--repeats", type=int, default=MIN_REPEATS)
    parser.add_argument("--ghost", type=int, default=DEFAULT_GHOST)
    parser.add_argument("--manifest", type=Path, default=None)
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.case == "sod1d" and args.ny not in (None, 1):
        parser.error(f"--case sod1d runs on a single row, got --ny {args.ny}")
    ny = args.ny
    if ny is None:
        ny = DEFAULT_NY_2D if args.case == "sod2d" else 1
    if args.nx < MIN_NODES:
        parser.error(f"--nx must be >= {MIN_NODES}, got {args.nx}")
    if ny < 1:
        parser.error(f"--ny must be >= 1, got {ny}")
    if args.steps < 0:
        parser.error(f"--steps must be >= 0, got {args.steps}")
    if args.threads < 1:
        parser.error(f"--threads must be >= 1, got {args.threads}")
    if args.ghost < 1:
        parser.error(f"--ghost must be >= 1, got {args.ghost}")
    if args.command == "bench":
        if args.steps < 1:
            parser.error("bench needs --steps >= 1")
        if args.repeats < MIN_REPEATS:
            parser.error(f"bench needs --repeats >= {MIN_REPEATS}, got {args.repeats}")
    if args.x0 is not None and not (0.0 < args.x0 < args.nx):
        parser.error(f"--x0 must lie in (0, {args.nx}), got {args.x0}")
    if args.compare_exact and args.case == "periodic-test":
        parser.error("--compare-exact needs a shock-tube case")

    cfg = RunConfig(
        command=args.command,
        case=args.case,
        nx=args.nx,
        ny=ny,
        steps=args.steps,
        gamma=args.gamma,
        sigma=args.sigma,
        allow_sigma_override=args.allow_sigma_override,
        deterministic=args.deterministic,
        threads=args.threads,
        out_path=args.out,
        compare_exact=args.compare_exact,
        seed=args.seed,
        left=args.left,
        right=args.right,
        x0=args.x0,
        repeats=args.repeats,
        ghost=args.ghost,
        manifest=args.manifest,
    )
    # sod2d and bench also drive the 1-D lattice
    dims = (1, 2) if cfg.command == "bench" or cfg.case == "sod2d" else (cfg.dim,)
    try:
        for dim in dims:
            cfg.gas(dim)
    except ValueError as exc:
        parser.error(str(exc))
    return cfg


def _initial_field(cfg: RunConfig, g: GasModel) -> FlowField:
    if cfg.case == "periodic-test":
        shape = (cfg.nx,) if g.dim == 1 else (cfg.nx, cfg.ny)
        return periodic_field(shape, g, seed=cfg.seed)
    return riemann_field(
        cfg.nx, cfg.ny, g, left=cfg.left, right=cfg.right, x0=cfg.x0, ghost=cfg.ghost
    )


def _simulate(
    cfg: RunConfig, dim: Optional[int] = None, record: bool = True
) -> Tuple[FlowField, FlowField, List[StepReport], GasModel]:
    g = cfg.gas(dim)
    if dim == 1 and cfg.case == "sod2d":
        cfg = replace(cfg, case="sod1d", ny=1)
    initial = _initial_field(cfg, g)
    step_cfg = StepConfig(
        deterministic=cfg.deterministic,
        max_steps=cfg.steps,
        record_diagnostics=record,
        threads=cfg.threads,
    )
    final, reports = run(initial, g, step_cfg)
    return initial, final, reports, g


def _shock_error(
    profile: ProfileTable, sol: RiemannSolution, x0: float, t: float
) -> Optional[float]:
    speed = sol.wave_speeds["right"].get("shock")
    if speed is None or t <= 0.0:
        return None
    expected = x0 + speed * t
    # start between contact and shock so the contact jump is skipped
    after = x0 + 0.5 * t * (sol.u_star + speed)
    try:
        return locate_shock(profile, after=after) - expected
    except ShockNotFound:
        return None


def _write_manifest(cfg: RunConfig, outputs: List[Path], results: Dict[str, object]) -> None:
    if cfg.manifest is None:
        return
    config = {k: v for k, v in asdict(cfg).items() if k != "manifest"}
    update_run(
        f"{cfg.command}_{cfg.case}",
        {"config": config, "outputs": describe_inputs(outputs), "results": results},
        path=cfg.manifest,
    )
    print(f"Wrote {cfg.manifest}")


def run_case(cfg: RunConfig) -> int:
    try:
        initial, final, reports, g = _simulate(cfg)
    except LBShockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    profile = profile_from_field(final, g)
    results: Dict[str, object] = {}
    print(f"case: {cfg.case}")
    print(f"nodes: {'x'.join(str(n) for n in final.shape)}")
    print(f"steps: {cfg.steps}")

    mass0, mom0, energy0 = initial.totals()
    mass1, mom1, energy1 = final.totals()
    results["mass_drift"] = relative_drift(mass0, mass1)
    results["energy_drift"] = relative_drift(energy0, energy1)
    print(f"mass_drift: {results['mass_drift']:.3e}")
    print(f"energy_drift: {results['energy_drift']:.3e}")
    if cfg.case == "periodic-test":
        for axis, (a, b) in enumerate(zip(mom0, mom1)):
            print(f"momentum_{axis}_change: {abs(b - a):.3e}")
    print(f"ghost_overflow: {total_overflow(reports)}")

    if cfg.case != "periodic-test":
        x0 = cfg.diaphragm
        try:
            sol = solve_star(cfg.left, cfg.right, cfg.gamma)
        except VacuumGenerated as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except LBShockError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        if cfg.steps > 0:
            for name, pos in sol.wave_positions(x0, float(cfg.steps)).items():
                print(f"wave_{name}: {pos:.4f}")
        if cfg.compare_exact:
            exact = sod_profile(cfg.nx, x0, float(cfg.steps), cfg.left, cfg.right, cfg.gamma)
            report = error_norms(
                profile, exact, _shock_error(profile, sol, x0, float(cfg.steps))
            )
            for line in report.lines():
                print(line)
            results["norms"] = report.norms
            results["shock_position_error"] = report.shock_position_error
            profile = profile.with_exact(exact)

    outputs = [profile.to_csv(cfg.output())]
    print(f"Wrote {outputs[0]}")

    if g.dim == 2:
        results["row_deviation"] = row_deviation(final)
        print(f"row_deviation: {results['row_deviation']:.3e}")
        grid_path = outputs[0].with_name(f"{outputs[0].stem}_grid.csv")
        grid_frame(final, g).to_csv(
            grid_path, index=False, float_format="%.17g", lineterminator="\n"
        )
        outputs.append(grid_path)
        print(f"Wrote {grid_path}")
        if cfg.case == "sod2d":
            try:
                _, final_1d, _, g1 = _simulate(cfg, dim=1)
            except LBShockError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_NUMERICAL
            versus = error_norms(profile, profile_from_field(final_1d, g1))
            for line in versus.lines(prefix="vs_1d_"):
                print(line)
            results["vs_1d"] = versus.norms

    _write_manifest(cfg, outputs, results)
    return EXIT_OK


def run_bench(cfg: RunConfig) -> int:
    ny = cfg.ny if cfg.case == "sod2d" else DEFAULT_NY_2D
    base = replace(cfg, case="sod2d", ny=ny)
    steps_1d: List[float] = []
    steps_2d: List[float] = []
    ratios: List[float] = []
    try:
        for _ in range(cfg.repeats):
            _, _, rep1, _ = _simulate(base, dim=1, record=False)
            _, _, rep2, _ = _simulate(base, dim=2, record=False)
            steps_1d.extend(r.wall_time for r in rep1)
            steps_2d.extend(r.wall_time for r in rep2)
            ratios.append(timing_comparison(rep1, rep2))
    except LBShockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    lines = [
        f"nx: {base.nx}",
        f"ny: {base.ny}",
        f"steps: {base.steps}",
        f"repeats: {cfg.repeats}",
        f"threads: {base.threads}",
        f"median_step_seconds_1d: {statistics.median(steps_1d):.6e}",
        f"median_step_seconds_2d: {statistics.median(steps_2d):.6e}",
        f"ratio_2d_over_1d: {statistics.median(ratios):.4f}",
        f"packet_model_ratio: {packet_count_ratio(base.nx, base.nx * base.ny):.4f}",
    ]
    for line in lines:
        print(line)
    outputs: List[Path] = []
    if cfg.out_path is not None:
        cfg.out_path.parent.mkdir(parents=True, exist_ok=True)
        cfg.out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        outputs.append(cfg.out_path)
        print(f"Wrote {cfg.out_path}")
    _write_manifest(
        base, outputs, {"ratio_2d_over_1d": statistics.median(ratios), "ratios": ratios}
    )
    return EXIT_OK


def run_oracle(cfg: RunConfig) -> int:
    x0 = cfg.diaphragm
    try:
        sol = solve_star(cfg.left, cfg.right, cfg.gamma)
    except VacuumGenerated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LBShockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    profile = sod_profile(cfg.nx, x0, float(cfg.steps), cfg.left, cfg.right, cfg.gamma)

    print(f"p_star: {sol.p_star:.10f}")
    print(f"u_star: {sol.u_star:.10f}")
    print(f"rho_star_left: {sol.star_density('left'):.10f}")
    print(f"rho_star_right: {sol.star_density('right'):.10f}")
    print(f"waves: {sol.wave_types[0]},{sol.wave_types[1]}")
    if cfg.steps > 0:
        for name, pos in sol.wave_positions(x0, float(cfg.steps)).items():
            print(f"wave_{name}: {pos:.4f}")
    path = profile.to_csv(cfg.output())
    print(f"Wrote {path}")
    _write_manifest(cfg, [path], {"p_star": sol.p_star, "u_star": sol.u_star})
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg = parse_config(argv)
    if cfg.command == "bench":
        return run_bench(cfg)
    if cfg.command == "oracle":
        return run_oracle(cfg)
    return run_case(cfg)


__all__ = ["RunConfig", "build_parser", "main", "parse_config", "run_bench", "run_case", "run_oracle"]
