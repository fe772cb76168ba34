#!/usr/bin/env python3
"""
Piecewise-constant controls on the uniform grid of [0, 1] and the exact
endpoint map of the Carnot structures in groups.

Every structure here is polynomial along a constant control, so the endpoint
and its differential are integrated in closed form segment by segment.
"""

import logging
from dataclasses import dataclass
from math import gcd
from typing import Sequence, Tuple, Union

import numpy as np

try:
    from .constants import DEFAULT_N_STEPS, DEFAULT_RANK_TOLERANCE, MODEL_ENGEL
    from .groups import (
        CarnotStructure, DimensionMismatch, GroupElement, ModelSystem, StepTwoGroup
    )
    from .validation import ValidationError, validate_positive_int, validate_positive_number, validate_vector
except ImportError:
    from constants import DEFAULT_N_STEPS, DEFAULT_RANK_TOLERANCE, MODEL_ENGEL
    from groups import (
        CarnotStructure, DimensionMismatch, GroupElement, ModelSystem, StepTwoGroup
    )
    from validation import ValidationError, validate_positive_int, validate_positive_number, validate_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Control:
    """
    Control constant on each of the N cells [i/N, (i+1)/N).

    Attributes:
        values: N x m array, row i is the value on cell i
    """
    values: np.ndarray

    def __post_init__(self):
        try:
            arr = np.array(self.values, dtype=float)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"control values must be numeric: {e}")
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"control values must be an N x m array with N, m >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("control values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, 'values', arr)

    @classmethod
    def zeros(cls, n_steps: int, m: int) -> 'Control':
        n_steps = validate_positive_int(n_steps, "n_steps")
        m = validate_positive_int(m, "control dimension")
        return cls(np.zeros((n_steps, m)))

    @classmethod
    def constant(cls, w: Sequence[float], n_steps: int = DEFAULT_N_STEPS) -> 'Control':
        """Constant control u = w; its trajectory is the straight segment to w."""
        w = validate_vector(w, param_name="control value")
        n_steps = validate_positive_int(n_steps, "n_steps")
        return cls(np.tile(w, (n_steps, 1)))

    @classmethod
    def from_flat(cls, flat: np.ndarray, n_steps: int, m: int) -> 'Control':
        return cls(np.asarray(flat, dtype=float).reshape(n_steps, m))

    @property
    def n_steps(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def step(self) -> float:
        return 1.0 / self.n_steps

    def flat(self) -> np.ndarray:
        """Row-major flattening; entry k*m + j is component j on cell k."""
        return self.values.reshape(-1).copy()

    def l2_norm_squared(self) -> float:
        return float(np.sum(self.values ** 2) / self.n_steps)

    def l2_norm(self) -> float:
        """L2 norm on [0, 1], which is the length of the trajectory."""
        return float(np.sqrt(self.l2_norm_squared()))

    def refine(self, factor: int) -> 'Control':
        """Same function on a grid `factor` times finer."""
        factor = validate_positive_int(factor, "refinement factor")
        return Control(np.repeat(self.values, factor, axis=0))

    def concatenate(self, other: 'Control') -> 'Control':
        """
        Run self on [0, 1/2] and other on [1/2, 1], both at double speed.

        The endpoint of the result is endpoint(self) . endpoint(other).
        """
        if other.m != self.m:
            raise DimensionMismatch(f"cannot concatenate controls with {self.m} and {other.m} components")
        lcm = self.n_steps * other.n_steps // gcd(self.n_steps, other.n_steps)
        first = self.refine(lcm // self.n_steps).values
        second = other.refine(lcm // other.n_steps).values
        return Control(2.0 * np.vstack([first, second]))

    def __repr__(self) -> str:
        return f"Control(n_steps={self.n_steps}, m={self.m}, l2_norm={self.l2_norm():.6g})"


@dataclass(frozen=True, eq=False)
class EndpointJacobian:
    """
    Differential of the endpoint map at a control.

    Attributes:
        matrix: n x (N*m) array; column k*m + j is the derivative with respect
            to component j of the control on cell k
        n_steps: N
        m: Number of control components
    """
    matrix: np.ndarray
    n_steps: int
    m: int

    @property
    def state_dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: Union[Control, np.ndarray]) -> np.ndarray:
        """dE(u) v for a perturbation v on the same grid."""
        flat = v.flat() if isinstance(v, Control) else np.asarray(v, dtype=float).reshape(-1)
        if flat.shape[0] != self.matrix.shape[1]:
            raise DimensionMismatch(f"perturbation needs {self.matrix.shape[1]} entries, got {flat.shape[0]}")
        return self.matrix @ flat


def _check_control(G: CarnotStructure, u: Control) -> None:
    if u.m != G.m:
        raise DimensionMismatch(f"{G.name} has {G.m} controls, got a control with {u.m} components")


def _cell_starts(values: np.ndarray, h: float) -> np.ndarray:
    """Position at the start of every cell of a driver with velocities `values`."""
    increments = h * values
    starts = np.zeros_like(increments)
    starts[1:] = np.cumsum(increments, axis=0)[:-1]
    return starts


def _step_two_endpoint(G: StepTwoGroup, values: np.ndarray) -> np.ndarray:
    h = 1.0 / values.shape[0]
    starts = _cell_starts(values, h)
    x = h * values.sum(axis=0)
    # <u_i, A u_i> vanishes, so only the cell start contributes on each cell
    t = 0.5 * h * np.einsum('im,amn,in->a', starts, G.structure_stack, values)
    return np.concatenate([x, t])


def _step_two_jacobian(G: StepTwoGroup, values: np.ndarray) -> np.ndarray:
    n_steps, m = values.shape
    h = 1.0 / n_steps
    starts = _cell_starts(values, h)
    x_end = h * values.sum(axis=0)
    midpoints = starts + 0.5 * h * values
    horizontal = h * np.tile(np.eye(m), (1, n_steps))
    vertical = h * np.einsum('anp,kp->akn', G.structure_stack, 0.5 * x_end - midpoints)
    return np.vstack([horizontal, vertical.reshape(G.ell, n_steps * m)])


# Polynomial lifts of a driver coordinate p(s) (velocity d on each cell)
# carried by a control c:  first order  sum_i c_i int p,
#                          second order sum_i c_i int p^2/2.

def _lift_terms(order: int, p: np.ndarray, d: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-cell integral F and its partials dF/dp, dF/dd."""
    first = p * h + d * h * h / 2.0
    if order == 1:
        return first, np.full_like(p, h), np.full_like(p, h * h / 2.0)
    second = 0.5 * (p * p * h + p * d * h * h + d * d * h ** 3 / 3.0)
    return second, first, 0.5 * (p * h * h + 2.0 * d * h ** 3 / 3.0)


def _lift(order: int, driver: np.ndarray, carrier: np.ndarray, h: float) -> float:
    p = _cell_starts(driver, h)
    values, _, _ = _lift_terms(order, p, driver, h)
    return float(carrier @ values)


def _lift_gradient(order: int, driver: np.ndarray, carrier: np.ndarray,
                   h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of the lift with respect to the driver and the carrier cells."""
    p = _cell_starts(driver, h)
    values, d_p, d_d = _lift_terms(order, p, driver, h)
    downstream = carrier * d_p
    # sum over later cells i > k
    tail = np.cumsum(downstream[::-1])[::-1] - downstream
    return carrier * d_d + h * tail, values


def _model_endpoint(G: ModelSystem, values: np.ndarray) -> np.ndarray:
    h = 1.0 / values.shape[0]
    u1, u2 = values[:, 0], values[:, 1]
    x = h * values.sum(axis=0)
    if G.kind == MODEL_ENGEL:
        return np.array([x[0], x[1], _lift(1, u1, u2, h), _lift(2, u1, u2, h)])
    return np.array([x[0], x[1], _lift(2, u2, u1, h)])


def _model_jacobian(G: ModelSystem, values: np.ndarray) -> np.ndarray:
    n_steps = values.shape[0]
    h = 1.0 / n_steps
    u1, u2 = values[:, 0], values[:, 1]
    jac = np.zeros((G.state_dim, n_steps, 2))
    jac[0, :, 0] = h
    jac[1, :, 1] = h
    if G.kind == MODEL_ENGEL:
        for row, order in ((2, 1), (3, 2)):
            jac[row, :, 0], jac[row, :, 1] = _lift_gradient(order, u1, u2, h)
    else:
        jac[2, :, 1], jac[2, :, 0] = _lift_gradient(2, u2, u1, h)
    return jac.reshape(G.state_dim, 2 * n_steps)


def endpoint_coords(G: CarnotStructure, values: np.ndarray) -> np.ndarray:
    """Endpoint as a flat coordinate vector, for an N x m array of cell values."""
    if isinstance(G, StepTwoGroup):
        return _step_two_endpoint(G, values)
    return _model_endpoint(G, values)


def jacobian_matrix(G: CarnotStructure, values: np.ndarray) -> np.ndarray:
    """Jacobian of endpoint_coords with respect to the flattened cell values."""
    if isinstance(G, StepTwoGroup):
        return _step_two_jacobian(G, values)
    return _model_jacobian(G, values)


def endpoint(G: CarnotStructure, u: Control) -> GroupElement:
    """
    Exact endpoint of the trajectory of u started at the identity.

    Args:
        G: Step-two group or model system
        u: Control with G.m components

    Returns:
        GroupElement

    Raises:
        DimensionMismatch: If u has the wrong number of components
    """
    _check_control(G, u)
    coords = endpoint_coords(G, u.values)
    return GroupElement(coords[:G.m], coords[G.m:])


def d_endpoint(G: CarnotStructure, u: Control) -> EndpointJacobian:
    """
    Differential of the endpoint map at u, exact on the grid.

    For step-two groups the vertical rows are
    h A (x(1)/2 - x(midpoint of cell k)) for each cell k.

    Raises:
        DimensionMismatch: If u has the wrong number of components
    """
    _check_control(G, u)
    return EndpointJacobian(jacobian_matrix(G, u.values), u.n_steps, u.m)


def endpoint_and_jacobian(G: CarnotStructure, u: Control) -> Tuple[GroupElement, EndpointJacobian]:
    return endpoint(G, u), d_endpoint(G, u)


def endpoint_rank(G: CarnotStructure, u: Control,
                  tol: float = DEFAULT_RANK_TOLERANCE) -> Tuple[int, np.ndarray]:
    """
    Numerical rank and image of dE(u).

    Singular values at or above tol times the largest one are counted.

    Args:
        G: Carnot structure
        u: Control
        tol: Relative rank tolerance (> 0)

    Returns:
        (rank, basis) with basis an n x rank array of left singular vectors
    """
    tol = validate_positive_number(tol, "rank tolerance")
    matrix = d_endpoint(G, u).matrix
    left, svals, _ = np.linalg.svd(matrix, full_matrices=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0, np.zeros((G.state_dim, 0))
    rank = int(np.sum(svals >= tol * svals[0]))
    logger.debug("Endpoint rank on %s: %d of %d (smallest kept %.3e)",
                 G.name, rank, G.state_dim, svals[rank - 1])
    return rank, left[:, :rank]


def is_singular_control(G: CarnotStructure, u: Control,
                        tol: float = DEFAULT_RANK_TOLERANCE) -> bool:
    """True iff dE(u) is not onto."""
    rank, _ = endpoint_rank(G, u, tol)
    return rank < G.state_dim
