#!/usr/bin/env python3
from __future__ import annotations

import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import pandas as pd

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIO_GRID = REPO_ROOT / "configs" / "scenario_grids" / "sod_validation_v1.json"
TOLERANCES = REPO_ROOT / "configs" / "tolerances" / "sod_validation_v1.json"
MISSING_MSG = "missing protocol config provenance"
SOD_SCRIPT = REPO_ROOT / "scripts" / "sod_validation.py"
BENCH_SCRIPT = REPO_ROOT / "scripts" / "generate_bench_artifacts.py"


def _run(cmd: list[str]) -> subprocess.CompletedProcess:
    return subprocess.run(cmd, cwd=REPO_ROOT, text=True, capture_output=True)


class ProtocolConfigGuardTest(unittest.TestCase):
    def test_configs_are_frozen_with_ids(self) -> None:
        grid = json.loads(SCENARIO_GRID.read_text())
        tolerances = json.loads(TOLERANCES.read_text())
        self.assertEqual(grid["id"], "sod_validation_v1")
        self.assertEqual(tolerances["id"], "sod_tolerances_v1")
        for key in ("sod1d", "sod2d", "bench"):
            self.assertIn("fast", grid[key])
            self.assertIn(key, tolerances)

    def test_scripts_require_provenance(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            tmp_dir = Path(tmp)
            for script, extra in (
                (SOD_SCRIPT, ["--output-dir", str(tmp_dir)]),
                (BENCH_SCRIPT, ["--csv", str(tmp_dir / "bench.csv")]),
            ):
                with self.subTest(script=script.name):
                    proc = _run(
                        [sys.executable, str(script), "--fast", "--skip-manifest", *extra]
                    )
                    self.assertNotEqual(proc.returncode, 0)
                    output = f"{proc.stdout}\n{proc.stderr}".lower()
                    self.assertIn(MISSING_MSG, output)

    def test_sod_validation_fast(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            tmp_dir = Path(tmp)
            manifest = tmp_dir / "manifest.json"
            proc = _run(
                [
                    sys.executable,
                    str(SOD_SCRIPT),
                    "--scenario-grid",
                    str(SCENARIO_GRID),
                    "--tolerances",
                    str(TOLERANCES),
                    "--fast",
                    "--output-dir",
                    str(tmp_dir / "sod"),
                    "--manifest",
                    str(manifest),
                ]
            )
            self.assertEqual(proc.returncode, 0, proc.stdout + proc.stderr)
            checks = pd.read_csv(tmp_dir / "sod" / "sod_validation_checks.csv")
            self.assertEqual(len(checks), 5)
            self.assertTrue(checks["passed"].all())
            self.assertEqual(len(pd.read_csv(tmp_dir / "sod" / "sod1d_profile.csv")), 200)
            data = json.loads(manifest.read_text())
            self.assertEqual(data["protocols"]["sod_validation"]["scenario_grid_id"], "sod_validation_v1")
            self.assertTrue(data["runs"]["sod_validation"]["fast"])

    def test_bench_fast(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            tmp_dir = Path(tmp)
            csv = tmp_dir / "bench.csv"
            proc = _run(
                [
                    sys.executable,
                    str(BENCH_SCRIPT),
                    "--scenario-grid",
                    str(SCENARIO_GRID),
                    "--tolerances",
                    str(TOLERANCES),
                    "--fast",
                    "--csv",
                    str(csv),
                    "--skip-manifest",
                ]
            )
            self.assertEqual(proc.returncode, 0, proc.stdout + proc.stderr)
            df = pd.read_csv(csv)
            self.assertEqual(len(df), 5)
            self.assertTrue((df["ratio_2d_over_1d"] > 0.0).all())
            self.assertIn("packet_model_ratio: 12.8000", proc.stdout)


if __name__ == "__main__":
    unittest.main(verbosity=2)
