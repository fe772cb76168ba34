"""
Tests for distance sections
"""

import unittest
import sys
import os

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.analysis import scan
from src.analysis.scan import DistanceSection, distance_section
from src.optimizer import SolverOptions
from src.preset_library import heisenberg_group
from src.validation import ValidationError


class TestDistanceSection(unittest.TestCase):
    def setUp(self):
        self.G = heisenberg_group()
        self.opts = SolverOptions(n_steps=16, n_starts=2)

    def test_rows_along_an_axis(self):
        rows = distance_section(self.G, self.G.identity(), (0, 1), (0.5, 1.0, 2), (0.0, 0.0, 1), self.opts)
        self.assertEqual([(r['u'], r['v']) for r in rows], [(0.5, 0.0), (1.0, 0.0)])
        self.assertAlmostEqual(rows[0]['distance'], 0.5, delta=1e-3)
        self.assertAlmostEqual(rows[1]['distance'], 1.0, delta=1e-3)
        self.assertTrue(all(r['converged'] for r in rows))

    def test_module_is_documented(self):
        self.assertIn("row-major", scan.__doc__)

    def test_row_major_order(self):
        rows = distance_section(self.G, self.G.element([1.0, 0.0, 0.0]), (0, 1),
                                (0.0, 0.1, 2), (0.0, 0.1, 2), self.opts)
        self.assertEqual([(r['u'], r['v']) for r in rows],
                         [(0.0, 0.0), (0.0, 0.1), (0.1, 0.0), (0.1, 0.1)])

    def test_empty_range(self):
        self.assertEqual(distance_section(self.G, self.G.identity(), (0, 2), (0.0, 1.0, 0), (0.0, 1.0, 3)), [])

    def test_bad_axes(self):
        with self.assertRaises(ValidationError):
            DistanceSection(self.G, self.G.identity(), (0, 3))
        with self.assertRaises(ValidationError):
            DistanceSection(self.G, self.G.identity(), (1, 1))

    def test_bad_range(self):
        section = DistanceSection(self.G, self.G.identity(), (0, 1), self.opts)
        with self.assertRaises(ValidationError):
            section.evaluate((0.0, float('nan'), 2), (0.0, 1.0, 2))
        with self.assertRaises(ValidationError):
            section.evaluate((0.0, 1.0, -1), (0.0, 1.0, 2))


if __name__ == '__main__':
    unittest.main()
