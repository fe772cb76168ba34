"""
Tests for the augmented Lagrangian control optimizer
"""

import unittest
import sys
import os

import numpy as np

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.constants import METHOD_DIRECT, METHOD_IDENTITY
from src.controls import Control, endpoint, endpoint_rank
from src.optimizer import ControlOptimizer, DistanceResult, SolverOptions
from src.preset_library import engel_system, free_group, heisenberg_group
from src.validation import ValidationError


class TestSolverOptions(unittest.TestCase):
    def test_defaults(self):
        opts = SolverOptions()
        self.assertEqual(opts.n_steps, 64)
        self.assertEqual(opts.n_starts, 32)
        self.assertEqual(opts.rng_seed, 42)
        self.assertAlmostEqual(opts.feas_tol, 1e-6)

    def test_validation(self):
        with self.assertRaises(ValidationError):
            SolverOptions(n_steps=0)
        with self.assertRaises(ValidationError):
            SolverOptions(feas_tol=-1.0)
        with self.assertRaises(ValidationError):
            SolverOptions(penalty_growth=1.0)
        with self.assertRaises(ValidationError):
            SolverOptions(rng_seed=-3)

    def test_with_changes(self):
        opts = SolverOptions()
        changed = opts.with_changes(n_steps=16)
        self.assertEqual(changed.n_steps, 16)
        self.assertEqual(opts.n_steps, 64)
        with self.assertRaises(ValidationError):
            opts.with_changes(n_starts=0)

    def test_to_dict(self):
        data = SolverOptions(n_steps=8).to_dict()
        self.assertEqual(data['n_steps'], 8)
        self.assertIn('feas_tol', data)
        self.assertIn('n_workers', data)


class TestControlOptimizer(unittest.TestCase):
    def setUp(self):
        self.opts = SolverOptions(n_steps=16, n_starts=3)

    def test_straight_target(self):
        G = heisenberg_group()
        result = ControlOptimizer(G, G.element([1.0, 0.0, 0.0]), self.opts).optimize()
        self.assertIsInstance(result, DistanceResult)
        self.assertTrue(result.converged)
        self.assertEqual(result.method, METHOD_DIRECT)
        self.assertAlmostEqual(result.value, 1.0, delta=1e-3)
        self.assertLessEqual(result.residual, self.opts.feas_tol)

    def test_result_control_reaches_target(self):
        G = engel_system()
        target = G.element([0.0, 1.0, 0.0, 0.1])
        result = ControlOptimizer(G, target, self.opts.with_changes(n_starts=4)).optimize()
        self.assertTrue(result.converged)
        reached = endpoint(G, result.control).coords()
        self.assertLess(np.linalg.norm(reached - target.coords()), 10 * self.opts.feas_tol)
        self.assertAlmostEqual(result.value, result.control.l2_norm(), places=10)

    def test_identity_target(self):
        G = free_group(3)
        result = ControlOptimizer(G, G.identity(), self.opts).optimize()
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.method, METHOD_IDENTITY)
        self.assertTrue(result.converged)

    def test_initial_controls_are_seeded(self):
        G = heisenberg_group()
        target = G.element([0.5, 0.5, 0.2])
        first = ControlOptimizer(G, target, self.opts).initial_controls()
        second = ControlOptimizer(G, target, self.opts).initial_controls()
        self.assertEqual(len(first), 3)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(first[0].reshape(16, 2), np.tile([0.5, 0.5], (16, 1)))

    def test_fourier_starts_leave_the_abnormal_line(self):
        G = engel_system()
        solver = ControlOptimizer(G, G.element([0.0, 1.0, 0.0, 0.1]), self.opts.with_changes(n_starts=4))
        starts = [Control.from_flat(s, 16, 2) for s in solver.initial_controls()]
        self.assertEqual(endpoint_rank(G, starts[0])[0], 3)
        self.assertEqual(endpoint_rank(G, starts[1])[0], 4)
        self.assertEqual(endpoint_rank(G, starts[3])[0], 4)

    def test_fourier_mode_is_a_closed_loop(self):
        G = heisenberg_group()
        solver = ControlOptimizer(G, G.element([0.0, 0.0, 1.0]), SolverOptions(n_steps=64))
        loop = solver.fourier_mode(2, np.array([[1.0, 0.0], [0.0, 3.0]]), 0.5)
        self.assertEqual(loop.shape, (64, 2))
        np.testing.assert_allclose(loop.sum(axis=0), 0.0, atol=1e-12)
        # two turns of a circle of radius 0.5: |u| = 2 pi * 2 * 0.5 up to cell averaging
        self.assertAlmostEqual(Control(loop).l2_norm(), 2.0 * np.pi, delta=2e-2)

    def test_restore_moves_start_onto_constraint(self):
        G = engel_system()
        target = G.element([0.0, 1.0, 0.0, 0.1])
        solver = ControlOptimizer(G, target, self.opts.with_changes(n_starts=2))
        start = solver.initial_controls()[1]
        restored = solver.restore(start)
        self.assertLess(solver.residual(restored), 1e-2 * solver.residual(start))

    def test_restore_keeps_abnormal_start(self):
        G = engel_system()
        solver = ControlOptimizer(G, G.element([0.0, 1.0, 0.0, 0.1]), self.opts)
        straight = solver.initial_controls()[0]
        np.testing.assert_array_equal(solver.restore(straight), straight)

    def test_multiplier_estimate_at_straight_line(self):
        G = heisenberg_group()
        solver = ControlOptimizer(G, G.element([1.0, 0.0, 0.0]), self.opts)
        flat = np.tile([1.0, 0.0], 16)
        np.testing.assert_allclose(solver.multiplier_estimate(flat), [2.0, 0.0, 0.0], atol=1e-10)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(31)
        G = free_group(3)
        solver = ControlOptimizer(G, G.element(rng.standard_normal(6)), self.opts)
        flat = rng.standard_normal(16 * 3)
        multipliers = rng.standard_normal(6)
        _, grad = solver.lagrangian(flat, multipliers, 10.0)
        step = 1e-6
        for i in (0, 7, 30, 47):
            e = np.zeros_like(flat)
            e[i] = step
            numeric = (solver.lagrangian(flat + e, multipliers, 10.0)[0]
                       - solver.lagrangian(flat - e, multipliers, 10.0)[0]) / (2 * step)
            self.assertAlmostEqual(grad[i], numeric, delta=1e-5 * max(1.0, abs(numeric)))

    def test_polish_rejects_wrong_shape(self):
        G = heisenberg_group()
        solver = ControlOptimizer(G, G.element([1.0, 0.0, 0.0]), self.opts)
        with self.assertRaises(ValidationError):
            solver.polish(Control.zeros(8, 2))

    def test_polish_from_feasible_control(self):
        G = heisenberg_group()
        solver = ControlOptimizer(G, G.element([1.0, 0.0, 0.0]), self.opts)
        result = solver.polish(Control.constant([1.0, 0.0], 16))
        self.assertTrue(result.converged)
        self.assertEqual(result.n_starts, 1)
        self.assertAlmostEqual(result.value, 1.0, delta=1e-3)

    def test_worker_pool_matches_serial(self):
        G = heisenberg_group()
        target = G.element([0.3, -0.2, 0.1])
        serial = ControlOptimizer(G, target, self.opts).optimize()
        pooled = ControlOptimizer(G, target, self.opts.with_changes(n_workers=2)).optimize()
        self.assertAlmostEqual(serial.value, pooled.value, places=10)
        self.assertEqual(serial.diagnostics['best_start'], pooled.diagnostics['best_start'])

    def test_to_dict(self):
        G = heisenberg_group()
        result = ControlOptimizer(G, G.element([1.0, 0.0, 0.0]), self.opts).optimize()
        data = result.to_dict()
        self.assertEqual(data['target'], [1.0, 0.0, 0.0])
        self.assertEqual(data['n_steps'], 16)
        self.assertEqual(data['seed'], 42)


if __name__ == '__main__':
    unittest.main()
