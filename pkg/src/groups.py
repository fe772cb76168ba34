#!/usr/bin/env python3
"""
Carnot structures: step-two groups given by skew structure matrices, and the
hard-coded Engel and Martinet control systems.

A step-two group on R^m x R^l has the law

    (x, t) . (xi, tau) = (x + xi, t + tau + 1/2 <x, A xi>)

where <x, A xi> is the vector with components <x, A^a xi>.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

try:
    from .constants import (
        SKEW_TOLERANCE, HORMANDER_RANK_TOLERANCE, NULLSPACE_TOLERANCE,
        METIVIER_YES, METIVIER_NO, METIVIER_INCONCLUSIVE,
        METIVIER_GRID_POINTS, METIVIER_REFINE_STARTS, METIVIER_GRID_SEED,
        METIVIER_SINGULAR_THRESHOLD, METIVIER_REGULAR_THRESHOLD,
        MODEL_ENGEL, MODEL_MARTINET, SUBGROUP_MEMBERSHIP_TOLERANCE
    )
    from .linalg_skew import SkewMatrix, Bivector, orthonormal_basis
    from .validation import ValidationError, validate_vector, validate_positive_number
except ImportError:
    from constants import (
        SKEW_TOLERANCE, HORMANDER_RANK_TOLERANCE, NULLSPACE_TOLERANCE,
        METIVIER_YES, METIVIER_NO, METIVIER_INCONCLUSIVE,
        METIVIER_GRID_POINTS, METIVIER_REFINE_STARTS, METIVIER_GRID_SEED,
        METIVIER_SINGULAR_THRESHOLD, METIVIER_REGULAR_THRESHOLD,
        MODEL_ENGEL, MODEL_MARTINET, SUBGROUP_MEMBERSHIP_TOLERANCE
    )
    from linalg_skew import SkewMatrix, Bivector, orthonormal_basis
    from validation import ValidationError, validate_vector, validate_positive_number

logger = logging.getLogger(__name__)


class GroupError(Exception):
    """Base class for invalid Carnot structures and group operations"""
    pass


class NotSkew(GroupError):
    """A structure matrix is not skew-symmetric"""
    pass


class HormanderFails(GroupError):
    """The brackets of the horizontal layer do not span the vertical layer"""
    pass


class DimensionMismatch(GroupError):
    """Element or matrix dimensions do not match the group"""
    pass


@dataclass(frozen=True, eq=False)
class GroupElement:
    """
    Point (x, t) of a Carnot structure.

    For step-two groups x is the horizontal part and t the vertical part
    (flattened lexicographically for free groups).  For the Engel and
    Martinet models x holds the two horizontal coordinates and t the rest.
    """
    x: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'x', np.array(self.x, dtype=float).reshape(-1))
        object.__setattr__(self, 't', np.array(self.t, dtype=float).reshape(-1))

    def coords(self) -> np.ndarray:
        """Full coordinate vector (x, t)."""
        return np.concatenate([self.x, self.t])

    def t_bivector(self) -> Bivector:
        """Vertical part read as a bivector of R^m (free groups)."""
        return Bivector(self.x.shape[0], self.t)

    def is_identity(self) -> bool:
        return not np.any(self.x) and not np.any(self.t)

    def __repr__(self) -> str:
        return f"GroupElement(x={self.x.tolist()}, t={self.t.tolist()})"


class CarnotStructure(ABC):
    """Common interface of step-two groups and the hard-coded models."""

    name: str = "carnot"

    @property
    @abstractmethod
    def m(self) -> int:
        """Number of controls (horizontal dimension)."""

    @property
    @abstractmethod
    def ell(self) -> int:
        """Number of non-horizontal coordinates."""

    @property
    def state_dim(self) -> int:
        return self.m + self.ell

    @property
    @abstractmethod
    def weights(self) -> np.ndarray:
        """Homogeneous degree of each coordinate under dilations."""

    def identity(self) -> GroupElement:
        return GroupElement(np.zeros(self.m), np.zeros(self.ell))

    def element(self, coords: Sequence[float]) -> GroupElement:
        """
        Build an element from its full coordinate vector.

        Raises:
            ValidationError: If the length or the entries are invalid
        """
        arr = validate_vector(coords, self.state_dim, f"{self.name} coordinates")
        return GroupElement(arr[:self.m], arr[self.m:])

    def check_element(self, g: GroupElement) -> None:
        if g.x.shape[0] != self.m or g.t.shape[0] != self.ell:
            raise DimensionMismatch(
                f"{self.name} expects x in R^{self.m} and t in R^{self.ell}, "
                f"got {g.x.shape[0]} and {g.t.shape[0]}"
            )

    def horizontal_part(self, g: GroupElement) -> np.ndarray:
        self.check_element(g)
        return g.x.copy()

    def dilate(self, g: GroupElement, r: float) -> GroupElement:
        """Anisotropic dilation delta_r."""
        r = validate_positive_number(r, "dilation factor")
        self.check_element(g)
        return self.element(g.coords() * r ** self.weights)

    @abstractmethod
    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """Group law g . h."""

    @abstractmethod
    def inverse(self, g: GroupElement) -> GroupElement:
        """Group inverse."""


class StepTwoGroup(CarnotStructure):
    """
    Step-two Carnot group defined by skew structure matrices A^1..A^l.

    Use make_step_two() or the preset library to construct validated groups.
    """

    def __init__(self, A: Sequence[SkewMatrix], name: str = "step-two", is_free: bool = False):
        self.A: Tuple[SkewMatrix, ...] = tuple(A)
        self.name = name
        self.is_free = is_free
        self._stack = np.stack([a.entries for a in self.A])

    @property
    def m(self) -> int:
        return self._stack.shape[1]

    @property
    def ell(self) -> int:
        return self._stack.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([np.ones(self.m), 2.0 * np.ones(self.ell)])

    @property
    def free_dim(self) -> Optional[int]:
        """Rank m of the free group, or None for other groups."""
        return self.m if self.is_free else None

    @property
    def structure_stack(self) -> np.ndarray:
        """Array of shape (l, m, m) holding the structure matrices."""
        return self._stack

    def bracket(self, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """The vector <x, A xi> in R^l."""
        return np.einsum('i,aij,j->a', x, self._stack, xi)

    def sigma_matrix(self, sigma: Sequence[float]) -> SkewMatrix:
        """sigma A = sum_a sigma_a A^a."""
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (self.ell,):
            raise DimensionMismatch(f"covector of length {self.ell} expected, got shape {sigma.shape}")
        return SkewMatrix(np.tensordot(sigma, self._stack, axes=1))

    def vertical_map(self, w: np.ndarray) -> np.ndarray:
        """Matrix (l x m) of y -> <A w, y>."""
        return self._stack @ np.asarray(w, dtype=float)

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self.check_element(g)
        self.check_element(h)
        return GroupElement(g.x + h.x, g.t + h.t + 0.5 * self.bracket(g.x, h.x))

    def inverse(self, g: GroupElement) -> GroupElement:
        self.check_element(g)
        return GroupElement(-g.x, -g.t)

    def __repr__(self) -> str:
        return f"StepTwoGroup(name={self.name!r}, m={self.m}, ell={self.ell})"


class ModelSystem(CarnotStructure):
    """
    Hard-coded rank-two systems.

    Engel (state x1..x4):  X1 = d1,  X2 = d2 + x1 d3 + x1^2/2 d4.
    Martinet (state x, y, z):  X = dx + y^2/2 dz,  Y = dy; the control
    u = (u1, u2) drives X and Y respectively.
    """

    def __init__(self, kind: str):
        if kind not in (MODEL_ENGEL, MODEL_MARTINET):
            raise GroupError(f"unknown model system '{kind}'")
        self.kind = kind
        self.name = kind

    @property
    def m(self) -> int:
        return 2

    @property
    def ell(self) -> int:
        return 2 if self.kind == MODEL_ENGEL else 1

    @property
    def weights(self) -> np.ndarray:
        if self.kind == MODEL_ENGEL:
            return np.array([1.0, 1.0, 2.0, 3.0])
        return np.array([1.0, 1.0, 3.0])

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        if self.kind != MODEL_ENGEL:
            raise GroupError("the martinet system carries no group law")
        self.check_element(g)
        self.check_element(h)
        x1, x2, x3, x4 = g.coords()
        y1, y2, y3, y4 = h.coords()
        return GroupElement(
            [x1 + y1, x2 + y2],
            [x3 + y3 + x1 * y2, x4 + y4 + 0.5 * x1 * x1 * y2 + x1 * y3],
        )

    def inverse(self, g: GroupElement) -> GroupElement:
        if self.kind != MODEL_ENGEL:
            raise GroupError("the martinet system carries no group law")
        self.check_element(g)
        x1, x2, x3, x4 = g.coords()
        return GroupElement(
            [-x1, -x2],
            [-x3 + x1 * x2, -x4 + x1 * x3 - 0.5 * x1 * x1 * x2],
        )

    def abnormal_description(self) -> str:
        if self.kind == MODEL_ENGEL:
            return "abnormal minimizers fill the line (0, x2, 0, 0)"
        return "abnormal minimizers fill the line (x, 0, 0)"

    def __repr__(self) -> str:
        return f"ModelSystem(kind={self.kind!r})"


def make_step_two(A: Sequence[Union[np.ndarray, Sequence[Sequence[float]]]],
                  name: str = "step-two", is_free: bool = False) -> StepTwoGroup:
    """
    Validate structure matrices and build a step-two group.

    Args:
        A: l square matrices of the same size m
        name: Label of the group
        is_free: Mark the group as a free step-two group

    Returns:
        StepTwoGroup

    Raises:
        DimensionMismatch: If the matrices are not all m x m
        NotSkew: If |A + A^T| > 1e-12 |A| for some matrix
        HormanderFails: If the brackets do not span R^l
    """
    mats = [np.asarray(a, dtype=float) for a in A]
    if not mats:
        raise HormanderFails("at least one structure matrix is required")

    m = mats[0].shape[0] if mats[0].ndim == 2 else -1
    for idx, a in enumerate(mats):
        if a.ndim != 2 or a.shape != (m, m):
            raise DimensionMismatch(f"structure matrix {idx} has shape {a.shape}, expected ({m}, {m})")
        asym = np.linalg.norm(a + a.T)
        if asym > SKEW_TOLERANCE * np.linalg.norm(a):
            raise NotSkew(f"structure matrix {idx} is not skew-symmetric (|A + A^T| = {asym:.3g})")

    skews = [SkewMatrix(a) for a in mats]
    rows, cols = np.triu_indices(m, 1)
    brackets = np.stack([s.entries[rows, cols] for s in skews])
    if brackets.size == 0 or not np.any(brackets):
        raise HormanderFails("all brackets vanish")
    svals = np.linalg.svd(brackets, compute_uv=False)
    rank = int(np.sum(svals > HORMANDER_RANK_TOLERANCE * svals[0]))
    if rank < len(skews):
        raise HormanderFails(f"brackets span a space of dimension {rank} < {len(skews)}")

    group = StepTwoGroup(skews, name=name, is_free=is_free)
    logger.debug("Built %r", group)
    return group


def j_map(G: StepTwoGroup, eta: Sequence[float]) -> SkewMatrix:
    """
    Matrix of J_eta in the orthonormal horizontal basis: sum_a eta_a A^a.

    Raises:
        DimensionMismatch: If eta does not have l entries
    """
    return G.sigma_matrix(eta)


@dataclass
class MetivierReport:
    """
    Outcome of the Métivier check.

    ``is_metivier`` is None when the sampled minimum falls between the two
    decision thresholds.
    """
    is_metivier: Optional[bool]
    verdict: str
    witness_sigma: Optional[np.ndarray]
    min_smallest_singular_value: float
    method: str

    def to_dict(self) -> dict:
        return {
            'is_metivier': self.is_metivier,
            'verdict': self.verdict,
            'witness_sigma': None if self.witness_sigma is None else self.witness_sigma.tolist(),
            'min_smallest_singular_value': self.min_smallest_singular_value,
            'method': self.method,
        }


def _sphere_grid(ell: int, n_points: int) -> np.ndarray:
    """Deterministic sample of the unit sphere in R^ell (up to sign)."""
    if ell == 2:
        angles = np.pi * np.arange(n_points) / n_points
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if ell == 3:
        # Fibonacci sphere
        k = np.arange(n_points) + 0.5
        polar = np.arccos(1.0 - 2.0 * k / n_points)
        azimuth = np.pi * (1.0 + 5.0 ** 0.5) * k
        return np.column_stack([
            np.cos(azimuth) * np.sin(polar),
            np.sin(azimuth) * np.sin(polar),
            np.cos(polar),
        ])
    rng = np.random.default_rng(METIVIER_GRID_SEED)
    points = rng.standard_normal((n_points, ell))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def check_metivier(G: StepTwoGroup) -> MetivierReport:
    """
    Decide whether sigma A is nonsingular for every nonzero sigma.

    Odd m is decided by parity and l = 1 by one singular value decomposition.
    Otherwise the smallest singular value of sigma A (relative to the largest
    one seen) is minimized over a deterministic sphere grid and refined by
    Nelder-Mead from the best grid points.

    Args:
        G: Step-two group

    Returns:
        MetivierReport
    """
    stack = G.structure_stack
    m, ell = G.m, G.ell

    if m % 2 == 1:
        sigma = np.zeros(ell)
        sigma[0] = 1.0
        return MetivierReport(False, METIVIER_NO, sigma, 0.0, "parity")

    if ell == 1:
        svals = np.linalg.svd(stack[0], compute_uv=False)
        smallest = float(svals[-1] / svals[0])
        if smallest <= METIVIER_SINGULAR_THRESHOLD:
            return MetivierReport(False, METIVIER_NO, np.array([1.0]), smallest, "single covector")
        return MetivierReport(True, METIVIER_YES, None, smallest, "single covector")

    sigmas = _sphere_grid(ell, METIVIER_GRID_POINTS)
    matrices = np.einsum('na,aij->nij', sigmas, stack)
    svals = np.linalg.svd(matrices, compute_uv=False)
    scale = float(svals[:, 0].max())
    smallest = svals[:, -1] / scale

    def objective(sigma: np.ndarray) -> float:
        norm = np.linalg.norm(sigma)
        if norm == 0.0:
            return 1.0
        mat = np.tensordot(sigma / norm, stack, axes=1)
        return float(np.linalg.svd(mat, compute_uv=False)[-1] / scale)

    best_value = float(smallest.min())
    best_sigma = sigmas[int(np.argmin(smallest))]
    for idx in np.argsort(smallest)[:METIVIER_REFINE_STARTS]:
        result = optimize.minimize(
            objective, sigmas[idx], method='Nelder-Mead',
            options={'xatol': 1e-12, 'fatol': 1e-14, 'maxiter': 400 * ell},
        )
        if result.fun < best_value:
            best_value = float(result.fun)
            best_sigma = result.x / np.linalg.norm(result.x)

    logger.debug("Métivier search on %s: refined minimum %.3e", G.name, best_value)
    if best_value < METIVIER_SINGULAR_THRESHOLD:
        return MetivierReport(False, METIVIER_NO, best_sigma, best_value, "sphere search")
    if best_value > METIVIER_REGULAR_THRESHOLD:
        return MetivierReport(True, METIVIER_YES, None, best_value, "sphere search")
    logger.warning("Métivier check on %s inconclusive (minimum %.3e)", G.name, best_value)
    return MetivierReport(None, METIVIER_INCONCLUSIVE, best_sigma, best_value, "sphere search")


@dataclass
class SubgroupEmbedding:
    """
    Subgroup G_W generated by a horizontal subspace W.

    Attributes:
        group: G_W as a step-two group in its own coordinates
        horizontal_basis: m x d orthonormal basis of W
        vertical_basis: l x l_W orthonormal basis of span <A W, W>
    """
    group: StepTwoGroup
    horizontal_basis: np.ndarray
    vertical_basis: np.ndarray

    def contains(self, g: GroupElement, tol: float = SUBGROUP_MEMBERSHIP_TOLERANCE) -> bool:
        x_res = g.x - self.horizontal_basis @ (self.horizontal_basis.T @ g.x)
        t_res = g.t - self.vertical_basis @ (self.vertical_basis.T @ g.t)
        scale = max(1.0, float(np.linalg.norm(g.coords())))
        return bool(np.linalg.norm(x_res) <= tol * scale and np.linalg.norm(t_res) <= tol * scale)

    def to_subgroup(self, g: GroupElement) -> GroupElement:
        return GroupElement(self.horizontal_basis.T @ g.x, self.vertical_basis.T @ g.t)

    def from_subgroup(self, h: GroupElement) -> GroupElement:
        return GroupElement(self.horizontal_basis @ h.x, self.vertical_basis @ h.t)


def subgroup(G: StepTwoGroup, basis: np.ndarray) -> SubgroupEmbedding:
    """
    Build the subgroup generated by span(basis).

    Args:
        G: Step-two group
        basis: m x d array with orthonormal columns

    Returns:
        SubgroupEmbedding

    Raises:
        ValidationError: If the columns are not orthonormal
        GroupError: If W generates an abelian subgroup (no vertical part)
    """
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[0] != G.m:
        raise DimensionMismatch(f"basis vectors must lie in R^{G.m}")
    d = basis.shape[1]
    if not np.allclose(basis.T @ basis, np.eye(d), atol=1e-10):
        raise ValidationError("subspace basis must be orthonormal")

    restricted = np.einsum('ji,ajk,kl->ail', basis, G.structure_stack, basis)
    rows, cols = np.triu_indices(d, 1)
    brackets = restricted[:, rows, cols]
    vertical = orthonormal_basis(brackets, NULLSPACE_TOLERANCE)
    if vertical.shape[1] == 0:
        raise GroupError("the subspace generates an abelian subgroup")

    reduced = np.einsum('ag,aij->gij', vertical, restricted)
    sub = make_step_two(list(reduced), name=f"{G.name}|W{d}")
    return SubgroupEmbedding(group=sub, horizontal_basis=basis, vertical_basis=vertical)
