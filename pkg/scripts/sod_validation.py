#!/usr/bin/env python3
"""
Sod shock-tube validation of the 1-D and 2-D lattices against the exact solution.

Checks the shock position, the density plateau between contact and shock, the
density L1 error, the 1-D/2-D agreement and the 2-D row symmetry against the
frozen tolerance bands.

Outputs:
  * docs/artifacts/sod/sod1d_profile.csv
  * docs/artifacts/sod/sod2d_profile.csv
  * docs/artifacts/sod/sod_validation_checks.csv
"""
from __future__ import annotations

import argparse
import time
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd
from protocol_utils import (
    load_protocol_configs,
    record_protocol_manifest,
    select_grid_block,
    select_tolerance_block,
)

from lbshock.cases import riemann_field
from lbshock.diagnostics import (
    error_norms,
    locate_shock,
    plateau_mean,
    profile_from_field,
    row_deviation,
)
from lbshock.gas import GasModel
from lbshock.manifest import ARTIFACTS_ROOT, DEFAULT_MANIFEST, describe_inputs, update_run
from lbshock.riemann import SOD_LEFT, SOD_RIGHT, PrimitiveState, solve_star, sod_profile
from lbshock.streaming import StepConfig, run


def _state(values: Any, default: PrimitiveState) -> PrimitiveState:
    if values is None:
        return default
    rho, u, p = (float(v) for v in values)
    return PrimitiveState(rho=rho, u=u, p=p)


def _check(name: str, value: float, limit: float, passed: bool) -> Dict[str, Any]:
    return {"check": name, "value": value, "limit": limit, "passed": bool(passed)}


def validate_1d(grid: Dict[str, Any], tol: Dict[str, float], out_dir: Path):
    nx, steps = int(grid["nx"]), int(grid["steps"])
    x0 = float(grid.get("x0", 0.5 * nx))
    gamma = float(grid.get("gamma", 1.4))
    left = _state(grid.get("left"), SOD_LEFT)
    right = _state(grid.get("right"), SOD_RIGHT)
    g = GasModel(gamma=gamma, dim=1, sigma=float(grid.get("sigma", 0.5)))

    started = time.perf_counter()
    final, _ = run(riemann_field(nx, 1, g, left, right, x0=x0), g, StepConfig(max_steps=steps))
    elapsed = time.perf_counter() - started

    sol = solve_star(left, right, gamma)
    waves = sol.wave_positions(x0, float(steps))
    exact = sod_profile(nx, x0, float(steps), left, right, gamma)
    profile = profile_from_field(final, g)

    shock = locate_shock(profile, after=0.5 * (waves["contact"] + waves["right_shock"]))
    plateau = plateau_mean(profile, waves["contact"], waves["right_shock"])
    target = sol.star_density("right")
    norms = error_norms(profile, exact, shock - waves["right_shock"])

    checks = [
        _check(
            "shock_position_error",
            abs(shock - waves["right_shock"]),
            tol["max_shock_position_error"],
            abs(shock - waves["right_shock"]) <= tol["max_shock_position_error"],
        ),
        _check(
            "plateau_rel_error",
            abs(plateau - target) / target,
            tol["max_plateau_rel_error"],
            abs(plateau - target) / target <= tol["max_plateau_rel_error"],
        ),
        _check(
            "density_l1",
            norms.norms["rho"]["L1"],
            tol["max_density_l1"],
            norms.norms["rho"]["L1"] < tol["max_density_l1"],
        ),
    ]
    path = profile.with_exact(exact).to_csv(out_dir / "sod1d_profile.csv")
    print(f"sod1d: shock at {shock:.2f} (exact {waves['right_shock']:.2f}), "
          f"plateau {plateau:.5f} (exact {target:.5f}), {elapsed:.2f}s")
    for line in norms.lines(prefix="sod1d_"):
        print(line)
    return profile, checks, path, {"norms": norms.norms, "seconds": elapsed}


def validate_2d(grid: Dict[str, Any], tol: Dict[str, float], out_dir: Path, profile_1d):
    nx, ny, steps = int(grid["nx"]), int(grid["ny"]), int(grid["steps"])
    x0 = float(grid.get("x0", 0.5 * nx))
    g = GasModel(gamma=float(grid.get("gamma", 1.4)), dim=2)

    started = time.perf_counter()
    final, _ = run(riemann_field(nx, ny, g, x0=x0), g, StepConfig(max_steps=steps))
    elapsed = time.perf_counter() - started

    profile = profile_from_field(final, g)
    versus = error_norms(profile, profile_1d)
    deviation = row_deviation(final)
    linf = versus.norms["rho"]["Linf"]
    checks = [
        _check(
            "density_linf_vs_1d",
            linf,
            tol["max_density_linf_vs_1d"],
            linf < tol["max_density_linf_vs_1d"],
        ),
        _check(
            "row_deviation",
            deviation,
            tol["max_row_deviation"],
            deviation <= tol["max_row_deviation"],
        ),
    ]
    path = profile.to_csv(out_dir / "sod2d_profile.csv")
    print(f"sod2d: {nx}x{ny}, row deviation {deviation:.3e}, "
          f"Linf vs 1-D {linf:.4f}, {elapsed:.2f}s")
    return checks, path, {"vs_1d": versus.norms, "seconds": elapsed}


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--fast", action="store_true", help="Use the smaller CI grid")
    ap.add_argument("--scenario-grid", type=Path, help="Path to frozen scenario grid JSON")
    ap.add_argument("--tolerances", type=Path, help="Path to frozen tolerance JSON")
    ap.add_argument("--output-dir", type=Path, default=ARTIFACTS_ROOT / "sod")
    ap.add_argument("--manifest", type=Path, default=DEFAULT_MANIFEST)
    ap.add_argument("--skip-manifest", action="store_true")
    args = ap.parse_args()

    scenario_config, tolerance_config, provenance = load_protocol_configs(
        args.scenario_grid, args.tolerances
    )
    grid_1d = select_grid_block(scenario_config, "sod1d", args.fast)
    grid_2d = select_grid_block(scenario_config, "sod2d", args.fast)

    args.output_dir.mkdir(parents=True, exist_ok=True)
    profile_1d, checks, path_1d, extra_1d = validate_1d(
        grid_1d, select_tolerance_block(tolerance_config, "sod1d"), args.output_dir
    )
    checks_2d, path_2d, extra_2d = validate_2d(
        grid_2d, select_tolerance_block(tolerance_config, "sod2d"), args.output_dir, profile_1d
    )
    checks.extend(checks_2d)

    table = pd.DataFrame(checks)
    checks_path = args.output_dir / "sod_validation_checks.csv"
    table.to_csv(checks_path, index=False, lineterminator="\n")
    outputs: List[Path] = [path_1d, path_2d, checks_path]
    for path in outputs:
        print(f"Wrote {path}")

    failed = table.loc[~table["passed"], "check"].tolist()
    if not args.skip_manifest:
        record_protocol_manifest(provenance, args.manifest)
        update_run(
            "sod_validation",
            {
                "fast": args.fast,
                "grid": {"sod1d": grid_1d, "sod2d": grid_2d},
                "checks": checks,
                "sod1d": extra_1d,
                "sod2d": extra_2d,
                "outputs": describe_inputs(outputs),
                "protocol": provenance,
            },
            path=args.manifest,
        )
        print(f"Wrote {args.manifest}")
    if failed:
        raise SystemExit(f"sod validation failed: {', '.join(failed)}")
    print("sod validation passed")


if __name__ == "__main__":
    main()
