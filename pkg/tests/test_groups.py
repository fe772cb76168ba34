"""
Tests for group structures, the Métivier check and subgroups
"""

import unittest
import sys
import os

import numpy as np

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.constants import METIVIER_NO, METIVIER_YES
from src.groups import (
    DimensionMismatch, GroupElement, GroupError, HormanderFails, ModelSystem,
    NotSkew, check_metivier, j_map, make_step_two, subgroup
)
from src.preset_library import (
    engel_system, free_group, h_alpha_group, h_times_r_group, heisenberg_group,
    martinet_system
)
from src.validation import ValidationError


def random_element(rng, G):
    return G.element(rng.standard_normal(G.state_dim))


class TestMakeStepTwo(unittest.TestCase):
    def test_builds_heisenberg(self):
        G = make_step_two([[[0.0, 1.0], [-1.0, 0.0]]], name="h")
        self.assertEqual((G.m, G.ell, G.state_dim), (2, 1, 3))
        np.testing.assert_allclose(G.weights, [1, 1, 2])

    def test_rejects_non_skew(self):
        with self.assertRaises(NotSkew):
            make_step_two([[[1.0, 1.0], [-1.0, 0.0]]])

    def test_rejects_shape_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            make_step_two([np.zeros((2, 2)) + [[0, 1], [-1, 0]], np.zeros((3, 3))])

    def test_rejects_degenerate_brackets(self):
        A = [[0.0, 1.0], [-1.0, 0.0]]
        with self.assertRaises(HormanderFails):
            make_step_two([np.zeros((2, 2))])
        with self.assertRaises(HormanderFails):
            make_step_two([A, A])
        with self.assertRaises(HormanderFails):
            make_step_two([])


class TestGroupLaw(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_heisenberg_product(self):
        G = heisenberg_group()
        g = G.multiply(G.element([1, 0, 0]), G.element([0, 1, 0]))
        np.testing.assert_allclose(g.coords(), [1.0, 1.0, 0.5])

    def test_identity_and_inverse(self):
        for G in (heisenberg_group(), free_group(3), h_times_r_group(), engel_system()):
            g = random_element(self.rng, G)
            np.testing.assert_allclose(G.multiply(g, G.inverse(g)).coords(), 0.0, atol=1e-12)
            np.testing.assert_allclose(G.multiply(G.identity(), g).coords(), g.coords())

    def test_associativity(self):
        for G in (free_group(4), h_alpha_group(2.0), engel_system()):
            a, b, c = (random_element(self.rng, G) for _ in range(3))
            left = G.multiply(G.multiply(a, b), c)
            right = G.multiply(a, G.multiply(b, c))
            np.testing.assert_allclose(left.coords(), right.coords(), atol=1e-12)

    def test_dilation_is_automorphism(self):
        for G in (free_group(3), engel_system()):
            a, b = random_element(self.rng, G), random_element(self.rng, G)
            r = 1.7
            left = G.dilate(G.multiply(a, b), r)
            right = G.multiply(G.dilate(a, r), G.dilate(b, r))
            np.testing.assert_allclose(left.coords(), right.coords(), atol=1e-12)

    def test_martinet_has_no_law(self):
        M = martinet_system()
        with self.assertRaises(GroupError):
            M.multiply(M.identity(), M.identity())
        np.testing.assert_allclose(M.dilate(M.element([1, 1, 1]), 2.0).coords(), [2, 2, 8])

    def test_element_dimension_checks(self):
        G = free_group(3)
        with self.assertRaises(ValidationError):
            G.element([1.0, 2.0])
        with self.assertRaises(DimensionMismatch):
            G.multiply(GroupElement([1.0], [0.0]), G.identity())

    def test_unknown_model(self):
        with self.assertRaises(GroupError):
            ModelSystem("sierpinski")


class TestJMap(unittest.TestCase):
    def test_linear_combination(self):
        G = free_group(3)
        eta = np.array([1.0, -2.0, 0.5])
        expected = sum(e * a.entries for e, a in zip(eta, G.A))
        np.testing.assert_allclose(j_map(G, eta).entries, expected)

    def test_heisenberg_sign_follows_product(self):
        G = heisenberg_group()
        g = G.multiply(G.element([1, 0, 0]), G.element([0, 1, 0]))
        np.testing.assert_allclose(g.coords(), [1.0, 1.0, 0.5])
        np.testing.assert_allclose(j_map(G, [1.0]).entries, [[0.0, 1.0], [-1.0, 0.0]])

    def test_wrong_length(self):
        with self.assertRaises(DimensionMismatch):
            j_map(free_group(3), [1.0])


class TestMetivier(unittest.TestCase):
    def test_heisenberg_is_metivier(self):
        report = check_metivier(heisenberg_group())
        self.assertTrue(report.is_metivier)
        self.assertEqual(report.verdict, METIVIER_YES)

    def test_h_alpha_is_metivier(self):
        self.assertTrue(check_metivier(h_alpha_group(2.0)).is_metivier)

    def test_h_times_r_fails(self):
        report = check_metivier(h_times_r_group())
        self.assertIs(report.is_metivier, False)
        self.assertEqual(report.verdict, METIVIER_NO)
        np.testing.assert_allclose(np.abs(report.witness_sigma), [1.0])

    def test_odd_free_group_fails_by_parity(self):
        report = check_metivier(free_group(3))
        self.assertIs(report.is_metivier, False)
        self.assertEqual(report.method, "parity")

    def test_report_serializes(self):
        data = check_metivier(h_times_r_group()).to_dict()
        self.assertEqual(data['verdict'], METIVIER_NO)
        self.assertEqual(data['witness_sigma'], [1.0])


class TestSubgroup(unittest.TestCase):
    def test_plane_of_free_three(self):
        G = free_group(3)
        basis = np.eye(3)[:, :2]
        embedding = subgroup(G, basis)
        self.assertEqual((embedding.group.m, embedding.group.ell), (2, 1))
        self.assertTrue(embedding.contains(G.element([0.3, 0.4, 0.0, 0.2, 0.0, 0.0])))
        self.assertFalse(embedding.contains(G.element([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])))

    def test_round_trip_coordinates(self):
        G = free_group(3)
        embedding = subgroup(G, np.eye(3)[:, :2])
        h = GroupElement([0.5, -0.5], [0.25])
        g = embedding.from_subgroup(h)
        np.testing.assert_allclose(embedding.to_subgroup(g).coords(), h.coords())

    def test_abelian_subspace(self):
        with self.assertRaises(GroupError):
            subgroup(h_times_r_group(), np.eye(3)[:, 2:])

    def test_requires_orthonormal_basis(self):
        with self.assertRaises(ValidationError):
            subgroup(free_group(3), np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))


if __name__ == '__main__':
    unittest.main()
