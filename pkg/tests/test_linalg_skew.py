"""
Tests for skew-symmetric linear algebra and bivectors
"""

import unittest
import sys
import os

import numpy as np

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.linalg_skew import (
    Bivector, DuplicateFrequencyError, SkewMatrix, bivector_index, bivector_pairs,
    bivector_support, orthonormal_basis, skew_exp_apply, skew_spectral,
    vandermonde_span, wedge
)


def random_skew(rng, m, norm=None):
    a = rng.standard_normal((m, m))
    a = a - a.T
    if norm is not None:
        a = norm * a / np.linalg.norm(a, 2)
    return a


def series_exp_apply(a, x, terms=30):
    out = np.zeros_like(x)
    term = x.copy()
    for k in range(terms):
        out = out + term
        term = a @ term / (k + 1)
    return out


class TestSkewMatrix(unittest.TestCase):
    def test_entries_are_antisymmetrized(self):
        M = SkewMatrix(np.array([[0.0, 2.0], [-1.0, 0.0]]))
        np.testing.assert_allclose(M.entries, [[0.0, 1.5], [-1.5, 0.0]])
        self.assertEqual(M.entries[0, 1], -M.entries[1, 0])

    def test_arithmetic(self):
        M = SkewMatrix(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        np.testing.assert_allclose((M + M).entries, (2 * M).entries)
        np.testing.assert_allclose((-M).entries, -M.entries)
        np.testing.assert_allclose(M.apply([1.0, 0.0]), [0.0, -1.0])

    def test_rejects_non_square(self):
        with self.assertRaises(ValueError):
            SkewMatrix(np.zeros((2, 3)))

    def test_from_array_checks_skewness(self):
        M = SkewMatrix.from_array([[0.0, 3.0], [-3.0, 0.0]])
        self.assertEqual(M.entries[0, 1], 3.0)
        self.assertEqual(SkewMatrix.from_array(np.zeros((3, 3))).dim, 3)
        with self.assertRaises(ValueError):
            SkewMatrix.from_array([[0.0, 2.0], [-1.0, 0.0]])


class TestSkewSpectral(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_reassembles_random_matrices(self):
        for m in (2, 3, 4, 5, 6):
            a = random_skew(self.rng, m)
            decomposition = skew_spectral(a)
            np.testing.assert_allclose(decomposition.reassemble(), a, atol=1e-10)
            self.assertEqual(decomposition.rank, m // 2)
            self.assertEqual(decomposition.kernel_basis.shape[1], m % 2)

    def test_planes_rotate(self):
        a = random_skew(self.rng, 5)
        for plane in skew_spectral(a).planes:
            np.testing.assert_allclose(a @ plane.v, plane.frequency * plane.v_perp, atol=1e-10)
            np.testing.assert_allclose(a @ plane.v_perp, -plane.frequency * plane.v, atol=1e-10)

    def test_frequencies_ascending_and_positive(self):
        a = random_skew(self.rng, 6)
        frequencies = skew_spectral(a).frequencies
        self.assertTrue(np.all(frequencies > 0))
        self.assertTrue(np.all(np.diff(frequencies) >= 0))

    def test_zero_matrix(self):
        decomposition = skew_spectral(np.zeros((3, 3)))
        self.assertEqual(decomposition.rank, 0)
        np.testing.assert_allclose(decomposition.kernel_basis, np.eye(3))

    def test_repeated_frequencies_cluster(self):
        a = np.zeros((4, 4))
        a[0, 1], a[1, 0] = 1.0, -1.0
        a[2, 3], a[3, 2] = 1.0, -1.0
        decomposition = skew_spectral(a)
        self.assertEqual(decomposition.clusters(), [[0, 1]])
        np.testing.assert_allclose(decomposition.frequencies, [1.0, 1.0])


class TestSkewExpApply(unittest.TestCase):
    def test_matches_power_series(self):
        rng = np.random.default_rng(11)
        for m in (2, 3, 4, 5, 6, 7):
            a = random_skew(rng, m, norm=2.0)
            x = rng.standard_normal(m)
            self.assertLess(np.max(np.abs(skew_exp_apply(a, x) - series_exp_apply(a, x))), 1e-10)

    def test_preserves_norm(self):
        rng = np.random.default_rng(3)
        a = random_skew(rng, 5, norm=10.0)
        x = rng.standard_normal(5)
        self.assertAlmostEqual(np.linalg.norm(skew_exp_apply(a, x)), np.linalg.norm(x), places=12)

    def test_kernel_is_fixed(self):
        a = np.zeros((3, 3))
        a[0, 1], a[1, 0] = 2.0, -2.0
        np.testing.assert_allclose(skew_exp_apply(a, [0.0, 0.0, 1.0]), [0.0, 0.0, 1.0], atol=1e-14)

    def test_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            skew_exp_apply(np.zeros((3, 3)), [1.0, 2.0])


class TestBivectors(unittest.TestCase):
    def test_index_matches_pairs(self):
        for m in (2, 3, 4, 6):
            for position, (j, k) in enumerate(bivector_pairs(m)):
                self.assertEqual(bivector_index(j, k, m), position)

    def test_index_rejects_bad_pairs(self):
        with self.assertRaises(ValueError):
            bivector_index(2, 1, 4)

    def test_wedge_coefficients(self):
        e = np.eye(4)
        self.assertEqual(wedge(e[0], e[1]).coeffs[0], 1.0)
        self.assertEqual(wedge(e[2], e[3]).coeffs[bivector_index(2, 3, 4)], 1.0)
        rng = np.random.default_rng(5)
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        np.testing.assert_allclose(wedge(x, y).coeffs, -wedge(y, x).coeffs)
        self.assertTrue(wedge(x, x).is_zero())

    def test_matrix_conversion(self):
        z = Bivector(4, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        M = z.to_matrix()
        self.assertEqual(M.entries[0, 1], 1.0)
        self.assertEqual(M.entries[2, 3], 6.0)
        np.testing.assert_allclose(Bivector.from_matrix(M).coeffs, z.coeffs)

    def test_inner_and_norm(self):
        z = Bivector(3, [3.0, 0.0, 4.0])
        self.assertAlmostEqual(z.norm(), 5.0)
        self.assertAlmostEqual(z.inner(Bivector(3, [1.0, 1.0, 1.0])), 7.0)
        np.testing.assert_allclose((z - z).coeffs, 0.0)

    def test_support_of_two_planes(self):
        e = np.eye(5)
        z = wedge(e[0], e[1]) + 2.0 * wedge(e[2], e[3])
        rank, basis = bivector_support(z)
        self.assertEqual(rank, 2)
        projector = basis @ basis.T
        np.testing.assert_allclose(projector, np.diag([1, 1, 1, 1, 0]), atol=1e-10)

    def test_support_of_zero(self):
        rank, basis = bivector_support(Bivector.zeros(4))
        self.assertEqual(rank, 0)
        self.assertEqual(basis.shape, (4, 0))


class TestSpans(unittest.TestCase):
    def test_orthonormal_basis_of_zero(self):
        self.assertEqual(orthonormal_basis(np.zeros((3, 2))).shape, (3, 0))

    def test_orthonormal_basis_rank(self):
        columns = np.array([[1.0, 2.0], [0.0, 0.0], [1.0, 2.0]])
        basis = orthonormal_basis(columns)
        self.assertEqual(basis.shape, (3, 1))

    def test_vandermonde_span(self):
        e = np.eye(4)
        basis = vandermonde_span([e[0], e[1]], [1.0, 2.0])
        self.assertEqual(basis.shape[1], 2)
        np.testing.assert_allclose(basis @ basis.T, np.diag([1, 1, 0, 0]), atol=1e-10)

    def test_vandermonde_rejects_duplicates(self):
        e = np.eye(3)
        with self.assertRaises(DuplicateFrequencyError):
            vandermonde_span([e[0], e[1]], [1.0, 1.0])

    def test_vandermonde_rejects_bad_input(self):
        e = np.eye(3)
        with self.assertRaises(ValueError):
            vandermonde_span([e[0]], [-1.0])
        with self.assertRaises(ValueError):
            vandermonde_span([e[0], e[1]], [1.0])


if __name__ == '__main__':
    unittest.main()
