"""
Distance sections.

Two-axis grids of distances through a base point, solved point by point and
returned in row-major order for the scan table.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

try:
    from ..distance import NotConvergedError, distance
    from ..groups import CarnotStructure, GroupElement
    from ..optimizer import SolverOptions
    from ..validation import ValidationError, validate_finite_number, validate_positive_int
except ImportError:
    from src.distance import NotConvergedError, distance
    from src.groups import CarnotStructure, GroupElement
    from src.optimizer import SolverOptions
    from src.validation import ValidationError, validate_finite_number, validate_positive_int

logger = logging.getLogger(__name__)


class DistanceSection:
    """
    Distance values on a two-dimensional coordinate section.

    The section through ``base`` is spanned by two coordinate axes; each
    grid point base + u e_i + v e_j is solved independently.
    """

    def __init__(self, group: CarnotStructure, base: GroupElement,
                 axes: Tuple[int, int], opts: Optional[SolverOptions] = None):
        group.check_element(base)
        i, j = (int(a) for a in axes)
        for a in (i, j):
            if not 0 <= a < group.state_dim:
                raise ValidationError(f"axis {a} outside 0..{group.state_dim - 1}")
        if i == j:
            raise ValidationError("the two section axes must differ")
        self.group = group
        self.base = base
        self.axes = (i, j)
        self.opts = opts or SolverOptions()

    def _grid(self, value_range: Tuple[float, float, int]) -> np.ndarray:
        lo, hi, count = value_range
        lo = validate_finite_number(lo, "range start")
        hi = validate_finite_number(hi, "range stop")
        count = validate_positive_int(count, "range count", minimum=0)
        return np.linspace(lo, hi, count)

    def evaluate(self, u_range: Tuple[float, float, int],
                 v_range: Tuple[float, float, int]) -> List[Dict[str, Any]]:
        """Rows {u, v, distance, converged} in row-major order over (u, v)."""
        us = self._grid(u_range)
        vs = self._grid(v_range)
        rows = []
        for u in us:
            for v in vs:
                coords = self.base.coords().copy()
                coords[self.axes[0]] += u
                coords[self.axes[1]] += v
                try:
                    result = distance(self.group, self.group.element(coords), self.opts)
                except NotConvergedError as e:
                    result = e.result
                rows.append({
                    'u': float(u),
                    'v': float(v),
                    'distance': result.value,
                    'converged': result.converged,
                })
        logger.info("Scanned %d points on %s", len(rows), self.group.name)
        return rows


def distance_section(G: CarnotStructure, base: GroupElement, axes: Sequence[int],
                     u_range: Tuple[float, float, int], v_range: Tuple[float, float, int],
                     opts: Optional[SolverOptions] = None) -> List[Dict[str, Any]]:
    """Solve d on a grid of the section through base spanned by two coordinate axes."""
    return DistanceSection(G, base, tuple(axes), opts).evaluate(u_range, v_range)
