#!/usr/bin/env python3
"""
Preset Group Library
Named Carnot structures and the group configuration file loader
"""

import json
import logging
import os
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

try:
    from .constants import (
        PRESET_HEISENBERG, PRESET_FREE, PRESET_H_TIMES_R, PRESET_H_ALPHA,
        PRESET_ENGEL, PRESET_MARTINET, FREE_MIN_RANK, FREE_MAX_RANK,
        MODEL_ENGEL, MODEL_MARTINET
    )
    from .groups import CarnotStructure, GroupError, ModelSystem, StepTwoGroup, make_step_two
    from .validation import (
        ValidationError, validate_group_config_schema, validate_json_file_path,
        validate_positive_int
    )
except ImportError:
    from constants import (
        PRESET_HEISENBERG, PRESET_FREE, PRESET_H_TIMES_R, PRESET_H_ALPHA,
        PRESET_ENGEL, PRESET_MARTINET, FREE_MIN_RANK, FREE_MAX_RANK,
        MODEL_ENGEL, MODEL_MARTINET
    )
    from groups import CarnotStructure, GroupError, ModelSystem, StepTwoGroup, make_step_two
    from validation import (
        ValidationError, validate_group_config_schema, validate_json_file_path,
        validate_positive_int
    )

logger = logging.getLogger(__name__)

_ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])

_EXPRESSION = re.compile(r'^\s*([a-z_]+)\s*(?:[(:]\s*([0-9.eE+-]+)\s*\)?)?\s*$')


class UnknownPreset(ValidationError, GroupError):
    """Raised for preset names the library does not know"""
    pass


def heisenberg_group() -> StepTwoGroup:
    """Heisenberg group, law t + tau + (x1 xi2 - x2 xi1)/2."""
    return make_step_two([_ROTATION], name=PRESET_HEISENBERG, is_free=True)


def free_group(m: int) -> StepTwoGroup:
    """
    Free step-two group F_m on R^m x (wedge^2 R^m).

    The structure matrix A^jk maps x to x_k e_j - x_j e_k, so that
    <x, A^jk xi> is the (j, k) coefficient of x ^ xi.

    Raises:
        ValidationError: Unless 2 <= m <= 8
    """
    m = validate_positive_int(m, "free group rank")
    if m < FREE_MIN_RANK or m > FREE_MAX_RANK:
        raise ValidationError(f"free group rank must be between {FREE_MIN_RANK} and {FREE_MAX_RANK}, got {m}")
    matrices = []
    for j in range(m):
        for k in range(j + 1, m):
            a = np.zeros((m, m))
            a[j, k] = 1.0
            a[k, j] = -1.0
            matrices.append(a)
    return make_step_two(matrices, name=f"{PRESET_FREE}({m})", is_free=True)


def h_times_r_group() -> StepTwoGroup:
    """Heisenberg group times a line: the third horizontal direction is central."""
    a = np.zeros((3, 3))
    a[:2, :2] = _ROTATION
    return make_step_two([a], name=PRESET_H_TIMES_R)


def h_alpha_group(alpha: float) -> StepTwoGroup:
    """
    Contact group on R^4 x R with frequencies 1 and alpha.

    Law t + tau + (x1 xi2 - x2 xi1)/2 + alpha (x3 xi4 - x4 xi3)/2.

    Raises:
        ValidationError: Unless alpha > 1
    """
    if isinstance(alpha, bool) or not isinstance(alpha, (int, float)) or not np.isfinite(alpha):
        raise ValidationError(f"alpha must be a finite number, got {alpha!r}")
    if alpha <= 1.0:
        raise ValidationError(f"alpha must be greater than 1, got {alpha}")
    a = np.zeros((4, 4))
    a[:2, :2] = _ROTATION
    a[2:, 2:] = alpha * _ROTATION
    return make_step_two([a], name=f"{PRESET_H_ALPHA}({alpha:g})")


def engel_system() -> ModelSystem:
    return ModelSystem(MODEL_ENGEL)


def martinet_system() -> ModelSystem:
    return ModelSystem(MODEL_MARTINET)


@dataclass
class GroupPreset:
    """A named Carnot structure"""
    name: str
    category: str
    description: str
    builder: Callable[..., CarnotStructure]
    parameter: Optional[str] = None
    typical_use: Optional[str] = None


class PresetLibrary:
    """Library of preset Carnot structures"""

    def __init__(self):
        self.presets: Dict[str, GroupPreset] = {}
        self._load_builtin_presets()

    def _load_builtin_presets(self):
        """Load the built-in structures"""

        self.add_preset(GroupPreset(
            name=PRESET_HEISENBERG,
            category="Step-two groups",
            description="Heisenberg group, m=2, l=1",
            builder=heisenberg_group,
            typical_use="Central distance sqrt(4 pi |t|), Métivier reference",
        ))

        self.add_preset(GroupPreset(
            name=PRESET_FREE,
            category="Step-two groups",
            description="Free step-two group F_m, l = m(m-1)/2 (2 <= m <= 8)",
            builder=free_group,
            parameter="m",
            typical_use="Abnormal set W x wedge^2 W with dim W = m-2",
        ))

        self.add_preset(GroupPreset(
            name=PRESET_H_TIMES_R,
            category="Step-two groups",
            description="Heisenberg group times R, m=3, l=1",
            builder=h_times_r_group,
            typical_use="Vertical cusp at (e3, 0)",
        ))

        self.add_preset(GroupPreset(
            name=PRESET_H_ALPHA,
            category="Step-two groups",
            description="Contact group on R^4 x R with frequencies 1 and alpha > 1",
            builder=h_alpha_group,
            parameter="alpha",
            typical_use="Central distance sqrt(4 pi |t| / alpha)",
        ))

        self.add_preset(GroupPreset(
            name=PRESET_ENGEL,
            category="Model systems",
            description="Engel group, state (x1, x2, x3, x4)",
            builder=engel_system,
            typical_use="Abnormal line (0, x2, 0, 0)",
        ))

        self.add_preset(GroupPreset(
            name=PRESET_MARTINET,
            category="Model systems",
            description="Martinet system, state (x, y, z), X = dx + y^2/2 dz, Y = dy",
            builder=martinet_system,
            typical_use="Abnormal line (x, 0, 0)",
        ))

    def add_preset(self, preset: GroupPreset):
        """Add a preset to the library"""
        self.presets[preset.name] = preset

    def get_preset(self, name: str) -> Optional[GroupPreset]:
        """Get preset by name"""
        return self.presets.get(name)

    def list_presets(self, category: Optional[str] = None) -> List[GroupPreset]:
        """List all presets, optionally filtered by category"""
        if category:
            return [p for p in self.presets.values() if p.category == category]
        return list(self.presets.values())

    def list_categories(self) -> List[str]:
        """Get list of all categories"""
        return sorted(set(p.category for p in self.presets.values()))

    def build(self, name: str, parameter: Optional[Union[int, float]] = None) -> CarnotStructure:
        """
        Instantiate a preset.

        Raises:
            UnknownPreset: If the name is not registered
            ValidationError: If the parameter is missing or invalid
        """
        entry = self.get_preset(name)
        if entry is None:
            raise UnknownPreset(f"unknown preset '{name}'; known presets: {', '.join(self.presets)}")
        if entry.parameter is None:
            if parameter is not None:
                raise ValidationError(f"preset '{name}' takes no parameter")
            return entry.builder()
        if parameter is None:
            raise ValidationError(f"preset '{name}' requires parameter '{entry.parameter}'")
        return entry.builder(parameter)


_preset_library = None


def get_preset_library() -> PresetLibrary:
    """Get the singleton preset library instance"""
    global _preset_library
    if _preset_library is None:
        _preset_library = PresetLibrary()
    return _preset_library


def parse_preset_expression(text: str) -> Tuple[str, Optional[Union[int, float]]]:
    """
    Split expressions such as ``free(3)``, ``free:3`` or ``h_alpha(2.5)``.

    Returns:
        (name, parameter) with parameter None when absent

    Raises:
        UnknownPreset: If the text is not a preset expression
    """
    match = _EXPRESSION.match(text.lower()) if isinstance(text, str) else None
    if match is None:
        raise UnknownPreset(f"cannot parse preset expression {text!r}")
    name, raw = match.group(1), match.group(2)
    if raw is None:
        return name, None
    try:
        number = float(raw)
    except ValueError:
        raise UnknownPreset(f"bad preset parameter in {text!r}")
    if name == PRESET_FREE:
        if not number.is_integer():
            raise ValidationError(f"free group rank must be an integer, got {raw}")
        return name, int(number)
    return name, number


def preset(name: str, m: Optional[int] = None, alpha: Optional[float] = None) -> CarnotStructure:
    """
    Build a named structure.

    Args:
        name: heisenberg, free, h_times_r, h_alpha, engel, martinet, or an
            expression carrying the parameter such as ``free(3)``
        m: Rank for free groups
        alpha: Second frequency for h_alpha

    Returns:
        StepTwoGroup or ModelSystem

    Raises:
        UnknownPreset: For unknown names
        ValidationError: For missing or invalid parameters
    """
    base, inline = parse_preset_expression(name)
    parameter = inline
    if parameter is None:
        parameter = m if base == PRESET_FREE else alpha if base == PRESET_H_ALPHA else None
    return get_preset_library().build(base, parameter)


def load_group_config(file_path: str) -> CarnotStructure:
    """
    Load a group from a JSON configuration file.

    Raises:
        ValidationError: If the file is missing, unreadable or malformed
        GroupError: If the structure matrices are rejected
    """
    path = validate_json_file_path(file_path, must_exist=True, param_name="group config")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"group config {path} is not valid JSON: {e}")
    except OSError as e:
        raise ValidationError(f"cannot read group config {path}: {e}")

    data = validate_group_config_schema(data)
    if 'preset' in data:
        return preset(data['preset'], m=data.get('m'), alpha=data.get('alpha'))

    logger.info("Loaded group '%s' from %s", data['name'], path)
    return make_step_two(data['A'], name=data['name'])


def resolve_group(group_arg: str) -> CarnotStructure:
    """Interpret a --group argument as a config file path or a preset expression."""
    if group_arg.lower().endswith('.json') or os.path.isfile(group_arg):
        return load_group_config(group_arg)
    return preset(group_arg)
