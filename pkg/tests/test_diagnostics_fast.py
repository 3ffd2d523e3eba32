#!/usr/bin/env python3
from __future__ import annotations

import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from lbshock.cases import riemann_field
from lbshock.diagnostics import (
    ProfileTable,
    conservation_totals,
    error_norms,
    grid_frame,
    locate_shock,
    packet_count_ratio,
    plateau_mean,
    profile_from_field,
    row_deviation,
    timing_comparison,
)
from lbshock.errors import GridMismatch, ShockNotFound
from lbshock.gas import GasModel
from lbshock.riemann import SOD_LEFT, SOD_RIGHT, solve_star, sod_profile
from lbshock.streaming import StepReport


def report(wall: float, index: int = 1) -> StepReport:
    return StepReport(
        step_index=index,
        total_mass=1.0,
        total_momentum=(0.0,),
        total_energy=1.0,
        min_density=1.0,
        min_internal_energy=1.0,
        wall_time=wall,
    )


def flat_profile(nx: int, rho) -> ProfileTable:
    x = np.arange(nx) + 0.5
    rho = np.asarray(rho, dtype=np.float64)
    return ProfileTable.from_columns(
        x=x, rho=rho, u=np.zeros(nx), e=np.full(nx, 2.5), p=0.4 * rho * 2.5
    )


class ErrorNormTest(unittest.TestCase):
    def test_identical_profiles(self) -> None:
        exact = sod_profile(100, 50.0, 20.0)
        norms = error_norms(exact, exact)
        for values in norms.norms.values():
            self.assertEqual(values, {"L1": 0.0, "L2": 0.0, "Linf": 0.0})
        self.assertIsNone(norms.shock_position_error)

    def test_uniform_offset(self) -> None:
        exact = flat_profile(20, np.ones(20))
        shifted = flat_profile(20, np.full(20, 1.25))
        norms = error_norms(shifted, exact, shock_position_error=1.5).norms
        self.assertAlmostEqual(norms["rho"]["L1"], 0.25, places=15)
        self.assertAlmostEqual(norms["rho"]["L2"], 0.25, places=15)
        self.assertAlmostEqual(norms["rho"]["Linf"], 0.25, places=15)
        self.assertEqual(norms["u"]["Linf"], 0.0)

    def test_norm_lines(self) -> None:
        exact = flat_profile(10, np.ones(10))
        lines = list(error_norms(exact, exact, 0.5).lines(prefix="vs_"))
        self.assertIn("vs_rho_L1: 0.000000e+00", lines)
        self.assertEqual(lines[-1], "vs_shock_position_error: 0.500000")
        self.assertEqual(len(lines), 13)

    def test_grid_mismatch(self) -> None:
        with self.assertRaises(GridMismatch):
            error_norms(flat_profile(10, np.ones(10)), flat_profile(12, np.ones(12)))


class ShockLocatorTest(unittest.TestCase):
    def test_exact_sod_shock(self) -> None:
        sol = solve_star(SOD_LEFT, SOD_RIGHT, 1.4)
        waves = sol.wave_positions(200.0, 75.0)
        profile = sod_profile(400, 200.0, 75.0)
        shock = locate_shock(profile, after=waves["contact"] + 2.0)
        self.assertLessEqual(abs(shock - waves["right_shock"]), 1.0)

    def test_default_region_skips_contact(self) -> None:
        sol = solve_star(SOD_LEFT, SOD_RIGHT, 1.4)
        for t in (10.0, 25.0, 50.0, 75.0):
            with self.subTest(t=t):
                waves = sol.wave_positions(200.0, t)
                shock = locate_shock(sod_profile(400, 200.0, t))
                self.assertLessEqual(abs(shock - waves["right_shock"]), 1.0)
                self.assertGreater(shock, waves["contact"] + 1.0)

    def test_initial_step(self) -> None:
        self.assertLessEqual(abs(locate_shock(sod_profile(400, 200.0, 0.0)) - 200.0), 1.0)

    def test_ties_go_to_larger_x(self) -> None:
        rho = np.full(40, 2.0)
        rho[25:] = 1.5
        rho[33:] = 1.0
        profile = flat_profile(40, rho)
        self.assertEqual(locate_shock(profile), 33.5)

    def test_flat_profile_has_no_shock(self) -> None:
        with self.assertRaises(ShockNotFound):
            locate_shock(flat_profile(30, np.ones(30)))

    def test_too_few_nodes(self) -> None:
        with self.assertRaises(ValueError):
            locate_shock(flat_profile(2, np.ones(2)))


class PlateauTest(unittest.TestCase):
    def test_exact_plateau(self) -> None:
        sol = solve_star(SOD_LEFT, SOD_RIGHT, 1.4)
        waves = sol.wave_positions(200.0, 75.0)
        profile = sod_profile(400, 200.0, 75.0)
        mean = plateau_mean(profile, waves["contact"], waves["right_shock"])
        self.assertAlmostEqual(mean, sol.star_density("right"), places=12)

    def test_empty_plateau(self) -> None:
        with self.assertRaises(ValueError):
            plateau_mean(flat_profile(10, np.ones(10)), 3.0, 3.1)


class CostModelTest(unittest.TestCase):
    def test_timing_ratio(self) -> None:
        ones = [report(1.0, i) for i in range(1, 4)]
        threes = [report(3.0, i) for i in range(1, 4)]
        self.assertAlmostEqual(timing_comparison(ones, threes), 3.0, places=15)

    def test_timing_rejects_mismatched_runs(self) -> None:
        with self.assertRaises(ValueError):
            timing_comparison([report(1.0)], [report(1.0), report(1.0)])
        with self.assertRaises(ValueError):
            timing_comparison([report(0.0)], [report(1.0)])

    def test_packet_count_ratio(self) -> None:
        self.assertAlmostEqual(packet_count_ratio(400, 1600), 12.8, places=12)
        self.assertAlmostEqual(packet_count_ratio(100, 400), 12.8, places=12)


class ProfileTableTest(unittest.TestCase):
    def test_rejects_unsorted_x(self) -> None:
        with self.assertRaises(ValueError):
            ProfileTable.from_columns(x=[1.0, 0.5], rho=[1, 1], u=[0, 0], e=[1, 1], p=[1, 1])
        with self.assertRaises(ValueError):
            ProfileTable.from_columns(x=[0.5], rho=[1.0])

    def test_csv_format(self) -> None:
        exact = sod_profile(8, 4.0, 1.0)
        profile = exact.with_exact(exact)
        with tempfile.TemporaryDirectory() as tmp:
            path = profile.to_csv(Path(tmp) / "nested" / "profile.csv")
            raw = path.read_bytes()
            self.assertNotIn(b"\r", raw)
            lines = raw.decode("ascii").splitlines()
            self.assertEqual(lines[0], "x,rho,u,e,p,rho_exact,u_exact,e_exact,p_exact")
            self.assertEqual(len(lines), 9)
            self.assertFalse(any(line.endswith(",") for line in lines))
            back = ProfileTable.read_csv(path)
            np.testing.assert_array_equal(back.column("rho"), exact.column("rho"))
            np.testing.assert_array_equal(back.exact().column("p"), exact.column("p"))

    def test_csv_round_trip_is_exact(self) -> None:
        rng = np.random.default_rng(5)
        n = 500
        profile = ProfileTable.from_columns(
            x=np.arange(n) + 0.5,
            rho=rng.uniform(0.1, 2.0, n),
            u=rng.normal(size=n),
            e=rng.uniform(0.5, 3.0, n),
            p=rng.uniform(0.05, 1.5, n),
        )
        with tempfile.TemporaryDirectory() as tmp:
            back = ProfileTable.read_csv(profile.to_csv(Path(tmp) / "random.csv"))
        for name in ("x", "rho", "u", "e", "p"):
            np.testing.assert_array_equal(back.column(name), profile.column(name))

    def test_plain_csv_has_no_exact_columns(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = sod_profile(8, 4.0, 0.0).to_csv(Path(tmp) / "p.csv")
            self.assertEqual(path.read_text().splitlines()[0], "x,rho,u,e,p")

    def test_rows(self) -> None:
        rows = list(sod_profile(4, 2.0, 0.0).rows())
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[0][:3], (0.5, 1.0, 0.0))


class FieldDiagnosticsTest(unittest.TestCase):
    def test_two_dimensional_profile_is_row_average(self) -> None:
        g = GasModel(dim=2)
        field = riemann_field(10, 3, g)
        profile = profile_from_field(field, g)
        self.assertEqual(len(profile), 10)
        np.testing.assert_allclose(profile.column("rho")[:5], 1.0)
        np.testing.assert_allclose(profile.column("p")[5:], 0.1, rtol=1e-12)
        self.assertEqual(row_deviation(field), 0.0)
        frame = grid_frame(field, g)
        self.assertEqual(list(frame.columns), ["x", "y", "rho", "u", "v", "e", "p"])
        self.assertEqual(len(frame), 30)

    def test_row_deviation_detects_asymmetry(self) -> None:
        g = GasModel(dim=2)
        field = riemann_field(10, 3, g)
        field.rho[field.ghost[0] + 2, 1] += 1e-3
        self.assertAlmostEqual(row_deviation(field), 1e-3, places=12)

    def test_conservation_totals(self) -> None:
        g = GasModel()
        field = riemann_field(8, 1, g)
        mass, momentum, energy = conservation_totals(field)
        self.assertAlmostEqual(mass, 4 * 1.0 + 4 * 0.125, places=14)
        np.testing.assert_allclose(momentum, [0.0])
        self.assertAlmostEqual(energy, 4 * 2.5 + 4 * 0.25, places=13)

    def test_grid_frame_needs_two_dimensions(self) -> None:
        g = GasModel()
        with self.assertRaises(ValueError):
            grid_frame(riemann_field(8, 1, g), g)


if __name__ == "__main__":
    unittest.main(verbosity=2)
