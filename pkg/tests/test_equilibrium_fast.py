#!/usr/bin/env python3
"""Moment closure and positivity of the equilibrium packet decomposition."""
from __future__ import annotations

import sys
import time
import unittest
from pathlib import Path

import numpy as np

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from lbshock.equilibrium import (
    DirectionSet,
    corner_weights,
    emit_batch,
    emit_packets,
    level_densities,
    node_equilibrium,
    reconstruct_moments,
    velocity_levels,
)
from lbshock.errors import DegenerateDensity, NegativeLevelDensity
from lbshock.gas import GasModel, NodeState

SWEEP_STATES = 10_000
GAS_MODELS = 10


def random_states(rng: np.random.Generator, count: int, dim: int):
    rho = rng.uniform(0.05, 5.0, size=count)
    vel = rng.uniform(-3.0, 3.0, size=(count, dim))
    e = rng.uniform(1e-3, 20.0, size=count)
    etot = e + 0.5 * np.sum(vel * vel, axis=1)
    return rho, vel, etot


def random_gas(rng: np.random.Generator, dim: int) -> GasModel:
    return GasModel(
        gamma=float(rng.uniform(1.1, 1.0 + 2.0 / dim)),
        dim=dim,
        sigma=float(rng.uniform(0.4, 0.55)),
    )


class DirectionSetTest(unittest.TestCase):
    def test_symmetry_sums(self) -> None:
        for dim in (1, 2):
            dirs = DirectionSet.for_dim(dim)
            for speed in (1, 2, 3):
                first, second, third = dirs.symmetry_sums(speed)
                np.testing.assert_array_equal(first, np.zeros(dim))
                np.testing.assert_array_equal(second, 2 * speed * speed * np.eye(dim))
                np.testing.assert_array_equal(third, np.zeros((dim, dim, dim)))

    def test_level_tables(self) -> None:
        levels, dirs = DirectionSet.for_dim(1).level_table()
        np.testing.assert_array_equal(levels, [0, 1, 1, 2, 2])
        np.testing.assert_array_equal(dirs[:, 0], [0, 1, -1, 1, -1])
        levels, dirs = DirectionSet.for_dim(2).level_table()
        self.assertEqual(len(levels), 8)
        self.assertNotIn(0, levels)
        self.assertEqual(DirectionSet.for_dim(2).b, 4)

    def test_unknown_dimension(self) -> None:
        with self.assertRaises(ValueError):
            DirectionSet.for_dim(3)


class LevelSelectionTest(unittest.TestCase):
    def test_sod_states(self) -> None:
        g = GasModel()
        self.assertEqual(velocity_levels(1.0, 2.5, 0.5, g), (1, 2))
        self.assertEqual(velocity_levels(0.125, 2.0, 0.0625, g), (1, 2))
        self.assertEqual(velocity_levels(1.0, 2.5, 0.0, g.with_dim(2)), (1, 2))

    def test_sod_left_densities(self) -> None:
        g = GasModel()
        d1, d2 = level_densities(1.0, 2.5, 0.5, 1, 2, g)
        self.assertAlmostEqual(d1, 1.0 / 6.0, places=14)
        self.assertAlmostEqual(d2, 1.0 / 12.0, places=14)
        self.assertAlmostEqual(0.5 + 2.0 * (d1 + d2), 1.0, places=14)

    def test_perfect_square_puts_state_on_lower_level(self) -> None:
        g = GasModel(gamma=1.5)
        # D (gamma - 1) e rho / (rho - d0) = 0.5 * 4 * 2 = 4
        c1, c2 = velocity_levels(1.0, 4.0, 0.5, g)
        self.assertEqual((c1, c2), (2, 3))
        d1, d2 = level_densities(1.0, 4.0, 0.5, c1, c2, g)
        self.assertAlmostEqual(d2, 0.0, places=15)
        self.assertAlmostEqual(d1, 0.25, places=15)

    def test_cold_gas_uses_levels_zero_and_one(self) -> None:
        g = GasModel()
        self.assertEqual(velocity_levels(1.0, 0.0, 0.5, g), (0, 1))

    def test_degenerate_density(self) -> None:
        with self.assertRaises(DegenerateDensity):
            velocity_levels(1.0, 2.5, 1.0, GasModel())

    def test_unbracketing_levels_are_rejected(self) -> None:
        with self.assertRaises(NegativeLevelDensity):
            level_densities(1.0, 2.5, 0.5, 2, 3, GasModel())

    def test_node_equilibrium(self) -> None:
        eq = node_equilibrium(NodeState(rho=1.0, vel=(0.2,), etot=2.5 + 0.02), GasModel())
        self.assertEqual((eq.c1, eq.c2), (1, 2))
        self.assertAlmostEqual(eq.d0, 0.5, places=15)
        self.assertAlmostEqual(eq.phi, 2.0, places=12)


class CornerWeightTest(unittest.TestCase):
    def test_one_dimensional(self) -> None:
        weights = corner_weights((0.3,))
        self.assertEqual([w.offset for w in weights], [(0,), (1,)])
        np.testing.assert_allclose([w.alpha for w in weights], [0.7, 0.3], rtol=1e-15)

    def test_negative_velocity(self) -> None:
        weights = corner_weights((-0.25,))
        self.assertEqual([w.offset for w in weights], [(-1,), (0,)])
        np.testing.assert_allclose([w.alpha for w in weights], [0.25, 0.75], rtol=1e-15)

    def test_bilinear_order(self) -> None:
        weights = corner_weights((0.25, 0.5))
        self.assertEqual([w.offset for w in weights], [(0, 0), (0, 1), (1, 0), (1, 1)])
        np.testing.assert_allclose(
            [w.alpha for w in weights], [0.375, 0.375, 0.125, 0.125], rtol=1e-15
        )

    def test_lattice_velocity_has_one_corner(self) -> None:
        weights = corner_weights((1.0,))
        self.assertEqual(len(weights), 1)
        self.assertEqual(weights[0].offset, (1,))
        self.assertEqual(weights[0].alpha, 1.0)

    def test_non_finite_velocity(self) -> None:
        with self.assertRaises(ValueError):
            corner_weights((float("nan"),))


class EmissionTest(unittest.TestCase):
    def test_packet_counts(self) -> None:
        g1, g2 = GasModel(), GasModel(dim=2)
        d1, d2 = DirectionSet.for_dim(1), DirectionSet.for_dim(2)
        self.assertEqual(len(emit_packets(NodeState(1.0, (0.3,), 3.0), g1, d1)), 10)
        self.assertEqual(len(emit_packets(NodeState(1.0, (1.0,), 3.0), g1, d1)), 5)
        self.assertEqual(len(emit_packets(NodeState(1.0, (0.3, 0.6), 3.0), g2, d2)), 32)
        self.assertEqual(len(emit_packets(NodeState(1.0, (0.0, 0.0), 3.0), g2, d2)), 8)

    def test_sod_left_packets(self) -> None:
        packets = emit_packets(NodeState(1.0, (0.0,), 2.5), GasModel(), DirectionSet.for_dim(1))
        offsets = sorted(p.dest_offset[0] for p in packets)
        self.assertEqual(offsets, [-2, -1, 0, 1, 2])
        rest = [p for p in packets if p.dest_offset == (0,)]
        self.assertAlmostEqual(rest[0].mass, 0.5, places=15)

    def test_dimension_mismatch(self) -> None:
        with self.assertRaises(ValueError):
            emit_packets(NodeState(1.0, (0.0, 0.0), 2.5), GasModel(), DirectionSet.for_dim(1))

    def test_empty_reconstruction(self) -> None:
        mass, momentum, energy = reconstruct_moments([], dim=2)
        self.assertEqual(mass, 0.0)
        np.testing.assert_array_equal(momentum, np.zeros(2))
        self.assertEqual(energy, 0.0)

    def test_scalar_path_reproduces_moments(self) -> None:
        rng = np.random.default_rng(11)
        for dim in (1, 2):
            dirs = DirectionSet.for_dim(dim)
            g = random_gas(rng, dim)
            rho, vel, etot = random_states(rng, 200, dim)
            for r, v, et in zip(rho, vel, etot):
                mass, momentum, energy = reconstruct_moments(
                    emit_packets(NodeState(r, tuple(v), et), g, dirs), dim=dim
                )
                self.assertAlmostEqual(mass / r, 1.0, delta=1e-12)
                self.assertAlmostEqual(energy / (r * et), 1.0, delta=1e-12)
                scale = r * (1.0 + np.abs(v).max() + 10.0)
                np.testing.assert_allclose(momentum, r * v, rtol=0.0, atol=1e-12 * scale)

    def test_packets_scale_linearly_with_density(self) -> None:
        rng = np.random.default_rng(7)
        for dim in (1, 2):
            g = GasModel(dim=dim)
            dirs = DirectionSet.for_dim(dim)
            rho, vel, etot = random_states(rng, 100, dim)
            for r, v, et in zip(rho, vel, etot):
                base = emit_packets(NodeState(rho=float(r), vel=tuple(v), etot=float(et)), g, dirs)
                for factor in (2.0, 0.5, 3.7):
                    scaled = emit_packets(
                        NodeState(rho=float(r) * factor, vel=tuple(v), etot=float(et)), g, dirs
                    )
                    self.assertEqual(
                        [p.dest_offset for p in scaled], [p.dest_offset for p in base]
                    )
                    mass = np.array([p.mass for p in base])
                    np.testing.assert_allclose(
                        [p.mass for p in scaled], factor * mass, rtol=1e-12, atol=0.0
                    )
                    np.testing.assert_allclose(
                        [p.energy for p in scaled],
                        [factor * p.energy for p in base],
                        rtol=1e-12,
                        atol=0.0,
                    )
                    atol = 1e-12 * factor * float(r) * (1.0 + np.abs(v).max() + 10.0)
                    np.testing.assert_allclose(
                        [p.momentum for p in scaled],
                        [[factor * m for m in p.momentum] for p in base],
                        rtol=1e-12,
                        atol=atol,
                    )

    def test_property_sweep_closure_and_positivity(self) -> None:
        rng = np.random.default_rng(20240601)
        started = time.perf_counter()
        for dim in (1, 2):
            dirs = DirectionSet.for_dim(dim)
            per_model = SWEEP_STATES // GAS_MODELS
            for _ in range(GAS_MODELS):
                g = random_gas(rng, dim)
                rho, vel, etot = random_states(rng, per_model, dim)
                batch = emit_batch(rho, vel, etot, g, dirs)
                self.assertGreaterEqual(float(batch.mass.min()), 0.0)
                mass, momentum, energy = batch.moments()
                np.testing.assert_allclose(mass, rho, rtol=1e-12, atol=0.0)
                np.testing.assert_allclose(energy, rho * etot, rtol=1e-12, atol=0.0)
                speed = np.abs(batch.offsets).max(axis=(1, 2)) + np.abs(vel).max(axis=1)
                bound = (1e-12 * rho * (1.0 + speed))[:, None]
                np.testing.assert_array_less(
                    np.abs(momentum - rho[:, None] * vel),
                    np.broadcast_to(bound, momentum.shape),
                )
        self.assertLess(time.perf_counter() - started, 5.0)


if __name__ == "__main__":
    unittest.main(verbosity=2)
