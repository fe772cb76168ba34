"""
Tests for validation module
"""

import unittest
import sys
import os
import tempfile

import numpy as np

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.validation import (
    ValidationError,
    parse_float_list,
    validate_file_path,
    validate_finite_number,
    validate_group_config_schema,
    validate_json_file_path,
    validate_positive_int,
    validate_positive_number,
    validate_square_matrix,
    validate_unit_vector,
    validate_vector,
)


class TestNumbers(unittest.TestCase):
    """Test scalar validation functions"""

    def test_finite_number(self):
        self.assertEqual(validate_finite_number(3), 3.0)
        self.assertEqual(validate_finite_number(np.float32(0.5)), 0.5)
        for bad in (float('nan'), float('inf'), "1.0", None, True):
            with self.assertRaises(ValidationError):
                validate_finite_number(bad)

    def test_positive_number(self):
        self.assertEqual(validate_positive_number(1e-6), 1e-6)
        with self.assertRaises(ValidationError):
            validate_positive_number(0.0)
        with self.assertRaises(ValidationError):
            validate_positive_number(-2)

    def test_positive_int(self):
        self.assertEqual(validate_positive_int(5), 5)
        self.assertEqual(validate_positive_int(np.int64(0), minimum=0), 0)
        for bad in (0, 2.0, True, "3"):
            with self.assertRaises(ValidationError):
                validate_positive_int(bad)

    def test_error_names_parameter(self):
        with self.assertRaises(ValidationError) as ctx:
            validate_positive_int(0, "n_steps")
        self.assertIn("n_steps", str(ctx.exception))


class TestArrays(unittest.TestCase):
    def test_vector(self):
        np.testing.assert_array_equal(validate_vector([1, 2, 3], 3), [1.0, 2.0, 3.0])
        with self.assertRaises(ValidationError):
            validate_vector([1, 2], 3)
        with self.assertRaises(ValidationError):
            validate_vector([[1, 2]])
        with self.assertRaises(ValidationError):
            validate_vector([1, np.nan])
        with self.assertRaises(ValidationError):
            validate_vector(["a"])

    def test_vector_is_a_copy(self):
        source = np.array([1.0, 2.0])
        out = validate_vector(source)
        out[0] = 5.0
        self.assertEqual(source[0], 1.0)

    def test_unit_vector(self):
        validate_unit_vector([0.6, 0.8])
        with self.assertRaises(ValidationError):
            validate_unit_vector([1.0, 1.0])

    def test_square_matrix(self):
        self.assertEqual(validate_square_matrix([[0, 1], [-1, 0]], 2).shape, (2, 2))
        with self.assertRaises(ValidationError):
            validate_square_matrix([[0, 1, 2], [3, 4, 5]])
        with self.assertRaises(ValidationError):
            validate_square_matrix([[0, 1], [-1, 0]], 3)
        with self.assertRaises(ValidationError):
            validate_square_matrix([[0, 1], [1]])


class TestParseFloatList(unittest.TestCase):
    def test_parse(self):
        self.assertEqual(parse_float_list("0, 0,1.5"), [0.0, 0.0, 1.5])
        self.assertEqual(parse_float_list("-1e-2"), [-0.01])
        self.assertEqual(parse_float_list("  "), [])

    def test_rejects_garbage(self):
        with self.assertRaises(ValidationError):
            parse_float_list("1,,2")
        with self.assertRaises(ValidationError):
            parse_float_list("1,nan")
        with self.assertRaises(ValidationError):
            parse_float_list(None)


class TestPaths(unittest.TestCase):
    def test_file_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = validate_file_path(os.path.join(tmp, "out.csv"))
            self.assertEqual(path.name, "out.csv")
            with self.assertRaises(ValidationError):
                validate_file_path(os.path.join(tmp, "missing.csv"), must_exist=True)
            with self.assertRaises(ValidationError):
                validate_file_path(os.path.join(tmp, "no", "such", "dir.csv"))
            nested = validate_file_path(os.path.join(tmp, "a", "b.csv"), create_parent=True)
            self.assertTrue(nested.parent.exists())

    def test_json_suffix(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ValidationError):
                validate_json_file_path(os.path.join(tmp, "group.txt"))
            self.assertEqual(validate_json_file_path(os.path.join(tmp, "group.JSON")).suffix, ".JSON")

    def test_json_path_creates_directories_only_on_request(self):
        with tempfile.TemporaryDirectory() as tmp:
            missing = os.path.join(tmp, "configs")
            with self.assertRaises(ValidationError):
                validate_json_file_path(os.path.join(missing, "group.json"), must_exist=True)
            with self.assertRaises(ValidationError):
                validate_json_file_path(os.path.join(missing, "group.json"))
            self.assertFalse(os.path.exists(missing))
            path = validate_json_file_path(os.path.join(missing, "group.json"), create_parent=True)
            self.assertTrue(path.parent.is_dir())

    def test_rejects_non_paths(self):
        with self.assertRaises(ValidationError):
            validate_file_path(42)


class TestGroupConfigSchema(unittest.TestCase):
    def explicit(self, **changes):
        data = {"name": "h", "m": 2, "ell": 1, "A": [[[0, 1], [-1, 0]]]}
        data.update(changes)
        return data

    def test_explicit_layout(self):
        self.assertEqual(validate_group_config_schema(self.explicit())['name'], "h")

    def test_preset_layout(self):
        validate_group_config_schema({"preset": "heisenberg"})
        validate_group_config_schema({"preset": "free", "m": 4})
        validate_group_config_schema({"preset": "h_alpha", "alpha": 2.5})

    def test_preset_errors(self):
        for data in ({"preset": "sphere"}, {"preset": "free"}, {"preset": "free", "m": 9},
                     {"preset": "h_alpha", "alpha": 1.0}, {"preset": 3}):
            with self.assertRaises(ValidationError):
                validate_group_config_schema(data)

    def test_field_errors_name_the_field(self):
        data = self.explicit()
        del data['ell']
        with self.assertRaises(ValidationError) as ctx:
            validate_group_config_schema(data)
        self.assertIn("'ell'", str(ctx.exception))
        with self.assertRaises(ValidationError) as ctx:
            validate_group_config_schema(self.explicit(m="2"))
        self.assertIn("'m'", str(ctx.exception))
        with self.assertRaises(ValidationError) as ctx:
            validate_group_config_schema(self.explicit(A=[[[0, 1, 0], [-1, 0, 0], [0, 0, 0]]]))
        self.assertIn("A[0]", str(ctx.exception))

    def test_not_an_object(self):
        with self.assertRaises(ValidationError):
            validate_group_config_schema([1, 2])


if __name__ == '__main__':
    unittest.main()
