"""
Tests for normal extremals, their endpoints and abnormality
"""

import unittest
import sys
import os

import numpy as np

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.controls import endpoint, endpoint_rank
from src.extremals import (
    NotFreeGroupError, abnormal_membership_free, abnormality_test,
    annihilating_covectors, extremal_endpoint, image_via_W, make_extremal
)
from src.groups import GroupError
from src.linalg_skew import bivector_index
from src.preset_library import (
    engel_system, free_group, h_alpha_group, h_times_r_group, heisenberg_group
)


class TestMakeExtremal(unittest.TestCase):
    def test_straight_extremal(self):
        G = free_group(3)
        ext = make_extremal(G, np.zeros(3), [1.0, 2.0, 2.0])
        self.assertEqual(ext.p, 0)
        self.assertAlmostEqual(ext.length(), 3.0)
        np.testing.assert_allclose(ext.z, [1.0, 2.0, 2.0])

    def test_modes_and_kernel(self):
        G = h_times_r_group()
        ext = make_extremal(G, [2.0], [1.0, 0.0, 0.5])
        self.assertEqual(ext.p, 1)
        np.testing.assert_allclose(ext.lambdas, [2.0])
        np.testing.assert_allclose(ext.z, [0.0, 0.0, 0.5], atol=1e-14)

    def test_equal_frequencies_merge(self):
        G = free_group(4)
        tau = np.zeros(6)
        tau[bivector_index(0, 1, 4)] = 1.0
        tau[bivector_index(2, 3, 4)] = 1.0
        ext = make_extremal(G, tau, [1.0, 0.0, 1.0, 0.0])
        self.assertEqual(ext.p, 1)

    def test_untouched_planes_are_dropped(self):
        G = h_alpha_group(2.0)
        ext = make_extremal(G, [1.0], [0.0, 0.0, 1.0, 0.0])
        self.assertEqual(ext.p, 1)
        np.testing.assert_allclose(ext.lambdas, [2.0])

    def test_trigonometric_form_matches_flow(self):
        rng = np.random.default_rng(8)
        for G in (free_group(4), h_alpha_group(2.0), h_times_r_group()):
            ext = make_extremal(G, 3.0 * rng.standard_normal(G.ell), rng.standard_normal(G.m))
            for s in (0.0, 0.3, 0.77, 1.0):
                np.testing.assert_allclose(ext.control_value(s), ext.flow_value(s), atol=1e-10)

    def test_speed_is_constant(self):
        rng = np.random.default_rng(9)
        G = free_group(4)
        ext = make_extremal(G, rng.standard_normal(6), rng.standard_normal(4))
        speeds = np.linalg.norm(ext.control_value(np.linspace(0.0, 1.0, 7)), axis=1)
        np.testing.assert_allclose(speeds, ext.length(), rtol=1e-10)

    def test_requires_step_two(self):
        with self.assertRaises(GroupError):
            make_extremal(engel_system(), [0.0, 0.0], [1.0, 0.0])


class TestExtremalEndpoint(unittest.TestCase):
    def test_straight_endpoint(self):
        G = heisenberg_group()
        g = extremal_endpoint(G, make_extremal(G, [0.0], [0.6, 0.8]))
        np.testing.assert_allclose(g.coords(), [0.6, 0.8, 0.0], atol=1e-14)

    def test_heisenberg_full_circle(self):
        G = heisenberg_group()
        g = extremal_endpoint(G, make_extremal(G, [2.0 * np.pi], [1.0, 0.0]))
        np.testing.assert_allclose(g.x, 0.0, atol=1e-12)
        self.assertAlmostEqual(abs(g.t[0]), 1.0 / (4.0 * np.pi), places=12)

    def test_small_frequency_series(self):
        G = heisenberg_group()
        near = extremal_endpoint(G, make_extremal(G, [1e-5], [1.0, 0.0]))
        exact = extremal_endpoint(G, make_extremal(G, [0.0], [1.0, 0.0]))
        np.testing.assert_allclose(near.coords(), exact.coords(), atol=1e-5)

    def test_matches_fine_sampling(self):
        rng = np.random.default_rng(12)
        for G in (free_group(3), free_group(4), h_alpha_group(2.0)):
            ext = make_extremal(G, 2.0 * rng.standard_normal(G.ell), rng.standard_normal(G.m))
            closed = extremal_endpoint(G, ext)
            sampled = endpoint(G, ext.sample(2048))
            np.testing.assert_allclose(sampled.x, closed.x, atol=1e-10)
            np.testing.assert_allclose(sampled.t, closed.t, atol=1e-4)

    def test_sample_shape(self):
        G = free_group(3)
        u = make_extremal(G, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]).sample(32)
        self.assertEqual((u.n_steps, u.m), (32, 3))


class TestAbnormality(unittest.TestCase):
    def test_h_times_r_central_line(self):
        G = h_times_r_group()
        cert = abnormality_test(G, make_extremal(G, [0.0], [0.0, 0.0, 1.0]))
        self.assertIsNotNone(cert)
        np.testing.assert_allclose(cert.sigma, [1.0])
        self.assertEqual(cert.dim_W, 1)

    def test_heisenberg_has_no_abnormal_extremals(self):
        G = heisenberg_group()
        self.assertIsNone(abnormality_test(G, make_extremal(G, [2.0 * np.pi], [1.0, 0.0])))
        self.assertIsNone(abnormality_test(G, make_extremal(G, [0.0], [1.0, 0.0])))

    def test_free_group_plane_extremal(self):
        G = free_group(4)
        tau = np.zeros(6)
        tau[bivector_index(0, 1, 4)] = 3.0
        cert = abnormality_test(G, make_extremal(G, tau, [1.0, 1.0, 0.0, 0.0]))
        self.assertIsNotNone(cert)
        self.assertEqual(cert.dim_W, 2)
        # sigma annihilates W = span(e1, e2), so it is e3 ^ e4 up to sign
        self.assertAlmostEqual(abs(cert.sigma[bivector_index(2, 3, 4)]), 1.0, places=10)

    def test_annihilating_covectors_of_empty_W(self):
        np.testing.assert_allclose(annihilating_covectors(free_group(3), np.zeros((3, 0))), np.eye(3))


class TestAbnormalMembership(unittest.TestCase):
    def test_horizontal_point(self):
        G = free_group(3)
        abnormal, W = abnormal_membership_free(G, G.element([1, 0, 0, 0, 0, 0]))
        self.assertTrue(abnormal)
        self.assertEqual(W.shape, (3, 1))

    def test_generic_point(self):
        G = free_group(3)
        abnormal, W = abnormal_membership_free(G, G.element([0, 0, 1, 1, 0, 0]))
        self.assertFalse(abnormal)
        self.assertEqual(W.shape[1], 3)

    def test_plane_in_free_four(self):
        G = free_group(4)
        t = np.zeros(6)
        t[bivector_index(0, 1, 4)] = 1.0
        abnormal, W = abnormal_membership_free(G, G.element(np.concatenate([[1, 0, 0, 0], t])))
        self.assertTrue(abnormal)
        self.assertEqual(W.shape[1], 2)

    def test_requires_free_group(self):
        G = h_times_r_group()
        with self.assertRaises(NotFreeGroupError):
            abnormal_membership_free(G, G.identity())


class TestImageViaW(unittest.TestCase):
    def random_extremal(self, rng, G, special):
        if special and G.m == 4:
            tau = np.zeros(G.ell)
            tau[bivector_index(0, 1, 4)] = 1.0 + 2.0 * rng.random()
            u0 = np.concatenate([rng.standard_normal(2), [0.0, 0.0]])
        elif special:
            tau = np.zeros(G.ell)
            u0 = np.array([0.0, 0.0, 1.0 + rng.random()])
        else:
            tau = 3.0 * rng.standard_normal(G.ell)
            u0 = rng.standard_normal(G.m)
        return make_extremal(G, tau, u0)

    def test_dimension_matches_endpoint_rank(self):
        rng = np.random.default_rng(2718)
        for G in (free_group(4), h_times_r_group()):
            for case in range(25):
                ext = self.random_extremal(rng, G, special=(case % 5 == 0))
                image = image_via_W(G, ext.W_basis())
                rank, _ = endpoint_rank(G, ext.sample(), tol=1e-8)
                self.assertEqual(image.shape[1], rank, f"{G.name} case {case}")

    def test_image_of_central_line(self):
        G = h_times_r_group()
        image = image_via_W(G, np.array([[0.0], [0.0], [1.0]]))
        self.assertEqual(image.shape, (4, 3))


if __name__ == '__main__':
    unittest.main()
