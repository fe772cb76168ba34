"""
Input validation utilities for opencarnot

Centralized validation functions to ensure data integrity
and provide consistent error messages.
"""

import math
import os
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

import numpy as np

# Try relative import first (for package), fall back to absolute
try:
    from .constants import (
        ALL_PRESETS, FREE_MIN_RANK, FREE_MAX_RANK, MAX_HORIZONTAL_DIM,
        PRESET_FREE, PRESET_H_ALPHA, UNIT_NORM_TOLERANCE
    )
except ImportError:
    from constants import (
        ALL_PRESETS, FREE_MIN_RANK, FREE_MAX_RANK, MAX_HORIZONTAL_DIM,
        PRESET_FREE, PRESET_H_ALPHA, UNIT_NORM_TOLERANCE
    )


class ValidationError(Exception):
    """Raised when validation fails"""
    pass


def _require_number(value: Any, param_name: str) -> float:
    # Reject booleans explicitly (bool is subclass of int in Python)
    if isinstance(value, bool):
        raise ValidationError(f"{param_name} must be a number, got bool")

    if not isinstance(value, (int, float, np.integer, np.floating)):
        raise ValidationError(f"{param_name} must be a number, got {type(value).__name__}")

    if math.isnan(value) or math.isinf(value):
        raise ValidationError(f"{param_name} must be a finite number, got {value}")

    return float(value)


def validate_finite_number(value: float, param_name: str = "value") -> float:
    """
    Validate that a value is a finite real number.

    Args:
        value: Value to validate
        param_name: Parameter name for error messages

    Returns:
        float: Validated value

    Raises:
        ValidationError: If value is not a finite number
    """
    return _require_number(value, param_name)


def validate_positive_number(value: float, param_name: str = "value") -> float:
    """
    Validate that a number is positive.

    Args:
        value: Value to validate
        param_name: Parameter name for error messages

    Returns:
        float: Validated value

    Raises:
        ValidationError: If value is not positive
    """
    value = _require_number(value, param_name)
    if value <= 0:
        raise ValidationError(f"{param_name} must be positive")
    return value


def validate_positive_int(value: int, param_name: str = "value", minimum: int = 1) -> int:
    """
    Validate an integer count.

    Args:
        value: Value to validate
        param_name: Parameter name for error messages
        minimum: Smallest accepted value

    Returns:
        int: Validated value

    Raises:
        ValidationError: If value is not an integer >= minimum
    """
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{param_name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValidationError(f"{param_name} must be at least {minimum}, got {value}")
    return int(value)


def validate_vector(values: Union[Sequence[float], np.ndarray],
                    dim: Optional[int] = None,
                    param_name: str = "vector") -> np.ndarray:
    """
    Validate a finite real vector.

    Args:
        values: Sequence or array of numbers
        dim: Required length, or None to accept any length
        param_name: Parameter name for error messages

    Returns:
        np.ndarray: Float copy of the vector

    Raises:
        ValidationError: If the vector has the wrong shape or non-finite entries
    """
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{param_name} must be a list of numbers: {e}")

    if arr.ndim != 1:
        raise ValidationError(f"{param_name} must be one-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValidationError(f"{param_name} must have {dim} entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{param_name} must contain only finite numbers")
    return arr


def validate_unit_vector(values: Union[Sequence[float], np.ndarray],
                         dim: Optional[int] = None,
                         param_name: str = "vector") -> np.ndarray:
    """Validate a vector of Euclidean norm one."""
    arr = validate_vector(values, dim, param_name)
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
        raise ValidationError(f"{param_name} must be a unit vector, got norm {norm:.6g}")
    return arr


def validate_square_matrix(rows: Any, dim: Optional[int] = None,
                           param_name: str = "matrix") -> np.ndarray:
    """
    Validate a finite square matrix.

    Args:
        rows: Nested sequence or array
        dim: Required size, or None
        param_name: Parameter name for error messages

    Returns:
        np.ndarray: Float copy of the matrix

    Raises:
        ValidationError: If the matrix is not square, finite and of size dim
    """
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{param_name} must be a matrix of numbers: {e}")

    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{param_name} must be a square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValidationError(f"{param_name} must be {dim}x{dim}, got {arr.shape[0]}x{arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{param_name} must contain only finite numbers")
    return arr


def parse_float_list(text: str, param_name: str = "value list") -> List[float]:
    """
    Parse a comma separated list of numbers such as ``"0,0,1"``.

    Args:
        text: Text to parse (whitespace around entries is ignored)
        param_name: Parameter name for error messages

    Returns:
        List[float]: Parsed numbers; an empty string gives an empty list

    Raises:
        ValidationError: If an entry is not a finite number
    """
    if not isinstance(text, str):
        raise ValidationError(f"{param_name} must be a string")

    text = text.strip()
    if not text:
        return []

    values = []
    for i, item in enumerate(text.split(',')):
        try:
            value = float(item.strip())
        except ValueError:
            raise ValidationError(f"{param_name}: entry {i + 1} ('{item.strip()}') is not a number")
        if math.isnan(value) or math.isinf(value):
            raise ValidationError(f"{param_name}: entry {i + 1} must be finite")
        values.append(value)
    return values


def validate_file_path(file_path: Union[str, Path],
                       must_exist: bool = False,
                       create_parent: bool = False,
                       param_name: str = "file_path") -> Path:
    """
    Validate and sanitize file path.

    Args:
        file_path: Path to validate
        must_exist: If True, file must already exist
        create_parent: If True, create parent directory if it doesn't exist
        param_name: Parameter name for error messages

    Returns:
        Path: Validated and resolved Path object

    Raises:
        ValidationError: If path is invalid
    """
    if not isinstance(file_path, (str, Path)):
        raise ValidationError(f"{param_name} must be a string or Path object")

    try:
        path = Path(file_path).resolve()
    except (ValueError, RuntimeError) as e:
        raise ValidationError(f"Invalid {param_name}: {e}")

    if must_exist and not path.exists():
        raise ValidationError(f"{param_name} does not exist: {path}")

    parent = path.parent
    if not parent.exists():
        if create_parent:
            try:
                parent.mkdir(parents=True, exist_ok=True)
            except (OSError, PermissionError) as e:
                raise ValidationError(f"Cannot create directory for {param_name}: {e}")
        else:
            raise ValidationError(f"Parent directory does not exist for {param_name}: {parent}")

    if not must_exist and not os.access(parent, os.W_OK):
        raise ValidationError(f"Parent directory is not writable for {param_name}: {parent}")

    return path


def validate_json_file_path(file_path: Union[str, Path],
                            must_exist: bool = False,
                            create_parent: bool = False,
                            param_name: str = "JSON file") -> Path:
    """
    Validate JSON file path.

    Args:
        file_path: Path to JSON file
        must_exist: If True, file must already exist
        create_parent: If True, create a missing parent directory (write path only)
        param_name: Parameter name for error messages

    Returns:
        Path: Validated and resolved Path object

    Raises:
        ValidationError: If path is invalid or not a JSON file
    """
    path = validate_file_path(file_path, must_exist=must_exist,
                              create_parent=create_parent and not must_exist,
                              param_name=param_name)

    if path.suffix.lower() != '.json':
        raise ValidationError(f"{param_name} must have .json extension, got: {path.suffix}")

    return path


def validate_group_config_schema(data: dict) -> dict:
    """
    Validate a group configuration dictionary.

    Two layouts are accepted::

        {"name": str, "m": int, "ell": int, "A": [m x m matrix, ...]}
        {"preset": str, "m": int, "alpha": float}

    Args:
        data: Parsed JSON object

    Returns:
        dict: The validated data dictionary

    Raises:
        ValidationError: If the schema is invalid; the message names the field
    """
    if not isinstance(data, dict):
        raise ValidationError(f"Group config must be a JSON object, got {type(data).__name__}")

    if 'preset' in data:
        preset = data['preset']
        if not isinstance(preset, str):
            raise ValidationError(f"Field 'preset' must be str, got {type(preset).__name__}")
        if preset not in ALL_PRESETS:
            raise ValidationError(
                f"Field 'preset' must be one of {', '.join(ALL_PRESETS)}, got '{preset}'"
            )
        if preset == PRESET_FREE:
            if 'm' not in data:
                raise ValidationError("Missing required field 'm' for preset 'free'")
            m = validate_positive_int(data['m'], "Field 'm'")
            if m < FREE_MIN_RANK or m > FREE_MAX_RANK:
                raise ValidationError(
                    f"Field 'm' must be between {FREE_MIN_RANK} and {FREE_MAX_RANK}, got {m}"
                )
        if preset == PRESET_H_ALPHA:
            if 'alpha' not in data:
                raise ValidationError("Missing required field 'alpha' for preset 'h_alpha'")
            alpha = _require_number(data['alpha'], "Field 'alpha'")
            if alpha <= 1.0:
                raise ValidationError(f"Field 'alpha' must be greater than 1, got {alpha}")
        return data

    required_fields = {
        'name': str,
        'm': int,
        'ell': int,
        'A': list,
    }
    for field, expected_type in required_fields.items():
        if field not in data:
            raise ValidationError(f"Missing required field '{field}' in group config")
        value = data[field]
        if isinstance(value, bool) or not isinstance(value, expected_type):
            raise ValidationError(
                f"Field '{field}' must be {expected_type.__name__}, got {type(value).__name__}"
            )

    m = data['m']
    ell = data['ell']
    if m < 1 or m > MAX_HORIZONTAL_DIM:
        raise ValidationError(f"Field 'm' must be between 1 and {MAX_HORIZONTAL_DIM}, got {m}")
    if ell < 1:
        raise ValidationError(f"Field 'ell' must be at least 1, got {ell}")
    if len(data['A']) != ell:
        raise ValidationError(f"Field 'A' must hold {ell} matrices (ell), got {len(data['A'])}")
    for alpha, matrix in enumerate(data['A']):
        validate_square_matrix(matrix, dim=m, param_name=f"Field 'A[{alpha}]'")

    return data
