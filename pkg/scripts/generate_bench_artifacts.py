#!/usr/bin/env python3
"""
Time the 1-D and 2-D Sod runs and record the 2-D/1-D wall-time ratio.

Outputs:
  * docs/artifacts/bench/bench_sod_timing.csv
"""
from __future__ import annotations

import argparse
import statistics
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
from lbshock.diagnostics import packet_count_ratio, timing_comparison
from lbshock.gas import GasModel
from lbshock.manifest import ARTIFACTS_ROOT, DEFAULT_MANIFEST, describe_inputs, update_run
from lbshock.streaming import StepConfig, run


def time_repeats(grid: Dict[str, Any], threads: int) -> pd.DataFrame:
    nx, ny, steps = int(grid["nx"]), int(grid["ny"]), int(grid["steps"])
    gamma = float(grid.get("gamma", 1.4))
    cfg = StepConfig(max_steps=steps, record_diagnostics=False, threads=threads)
    rows: List[Dict[str, Any]] = []
    for repeat in range(int(grid["repeats"])):
        reports_by_dim = {}
        for dim in (1, 2):
            g = GasModel(gamma=gamma, dim=dim, sigma=float(grid.get("sigma", 0.5)))
            _, reports = run(riemann_field(nx, ny, g), g, cfg)
            reports_by_dim[dim] = reports
        rows.append(
            {
                "repeat": repeat,
                "seconds_1d": sum(r.wall_time for r in reports_by_dim[1]),
                "seconds_2d": sum(r.wall_time for r in reports_by_dim[2]),
                "ratio_2d_over_1d": timing_comparison(reports_by_dim[1], reports_by_dim[2]),
            }
        )
    return pd.DataFrame(rows)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--fast", action="store_true", help="Use the smaller CI grid")
    ap.add_argument("--scenario-grid", type=Path, help="Path to frozen scenario grid JSON")
    ap.add_argument("--tolerances", type=Path, help="Path to frozen tolerance JSON")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--strict", action="store_true", help="Fail when the ratio leaves the band")
    ap.add_argument("--csv", type=Path, default=ARTIFACTS_ROOT / "bench" / "bench_sod_timing.csv")
    ap.add_argument("--manifest", type=Path, default=DEFAULT_MANIFEST)
    ap.add_argument("--skip-manifest", action="store_true")
    args = ap.parse_args()

    scenario_config, tolerance_config, provenance = load_protocol_configs(
        args.scenario_grid, args.tolerances
    )
    grid = select_grid_block(scenario_config, "bench", args.fast)
    band = select_tolerance_block(tolerance_config, "bench")
    if int(grid["repeats"]) < 5:
        raise SystemExit("bench grid needs at least 5 repeats")

    df = time_repeats(grid, args.threads)
    ratio = statistics.median(df["ratio_2d_over_1d"].tolist())
    model = packet_count_ratio(int(grid["nx"]), int(grid["nx"]) * int(grid["ny"]))
    within = band["ratio_min"] <= ratio <= band["ratio_max"]

    args.csv.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(args.csv, index=False, float_format="%.6e", lineterminator="\n")
    print(f"ratio_2d_over_1d: {ratio:.4f}")
    print(f"packet_model_ratio: {model:.4f}")
    print(f"within_band: {within} [{band['ratio_min']:g}, {band['ratio_max']:g}]")
    print(f"Wrote {args.csv}")

    if not args.skip_manifest:
        record_protocol_manifest(provenance, args.manifest)
        update_run(
            "bench_sod_timing",
            {
                "fast": args.fast,
                "threads": args.threads,
                "grid": grid,
                "ratio_2d_over_1d": ratio,
                "packet_model_ratio": model,
                "within_band": within,
                "outputs": describe_inputs([args.csv]),
                "protocol": provenance,
            },
            path=args.manifest,
        )
        print(f"Wrote {args.manifest}")
    if args.strict and not within:
        raise SystemExit(f"timing ratio {ratio:.3f} outside [{band['ratio_min']}, {band['ratio_max']}]")


if __name__ == "__main__":
    main()
