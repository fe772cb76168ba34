#!/usr/bin/env python3
"""
Skew-symmetric linear algebra.

Plane (rotation) decomposition of real skew-symmetric matrices, their
exponential, bivectors of R^m with the canonical lexicographic flattening,
and the Vandermonde span utility used to identify the subspace swept by a
normal extremal control.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

try:
    from .constants import (
        KERNEL_TOLERANCE, FREQUENCY_MERGE_TOLERANCE,
        NULLSPACE_TOLERANCE, DEFAULT_SUPPORT_TOLERANCE, SKEW_TOLERANCE
    )
except ImportError:
    from constants import (
        KERNEL_TOLERANCE, FREQUENCY_MERGE_TOLERANCE,
        NULLSPACE_TOLERANCE, DEFAULT_SUPPORT_TOLERANCE, SKEW_TOLERANCE
    )

logger = logging.getLogger(__name__)

ArrayLike = Union[Sequence[float], np.ndarray]


class DuplicateFrequencyError(ValueError):
    """Raised when two rotation frequencies coincide within tolerance"""
    pass


@dataclass(frozen=True, eq=False)
class SkewMatrix:
    """
    Real skew-symmetric matrix.

    The entries are antisymmetrized on construction, so
    ``entries[j, k] == -entries[k, j]`` holds exactly.
    """
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"skew matrix must be square, got shape {arr.shape}")
        object.__setattr__(self, 'entries', 0.5 * (arr - arr.T))

    @classmethod
    def zeros(cls, dim: int) -> 'SkewMatrix':
        return cls(np.zeros((dim, dim)))

    @classmethod
    def from_array(cls, arr: ArrayLike, rel_tol: float = SKEW_TOLERANCE) -> 'SkewMatrix':
        """
        Wrap an array that is already skew-symmetric.

        Raises:
            ValueError: If |M + M^T| > rel_tol |M|
        """
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
            asym = np.linalg.norm(arr + arr.T)
            if asym > rel_tol * np.linalg.norm(arr):
                raise ValueError(f"matrix is not skew-symmetric (|M + M^T| = {asym:.3g})")
        return cls(arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def norm(self) -> float:
        """Spectral norm."""
        if self.dim == 0:
            return 0.0
        return float(np.linalg.norm(self.entries, 2))

    def apply(self, x: ArrayLike) -> np.ndarray:
        return self.entries @ np.asarray(x, dtype=float)

    def __add__(self, other: 'SkewMatrix') -> 'SkewMatrix':
        return SkewMatrix(self.entries + other.entries)

    def __mul__(self, scalar: float) -> 'SkewMatrix':
        return SkewMatrix(float(scalar) * self.entries)

    __rmul__ = __mul__

    def __neg__(self) -> 'SkewMatrix':
        return SkewMatrix(-self.entries)


@dataclass(frozen=True, eq=False)
class RotationPlane:
    """Invariant plane of a skew matrix: M v = frequency * v_perp, M v_perp = -frequency * v."""
    frequency: float
    v: np.ndarray
    v_perp: np.ndarray


@dataclass(frozen=True, eq=False)
class PlaneDecomposition:
    """
    Spectral data of a skew-symmetric matrix.

    Attributes:
        dim: Ambient dimension m
        planes: Rotation planes sorted by ascending frequency
        kernel_basis: m x k array whose columns are an orthonormal basis of ker M
    """
    dim: int
    planes: Tuple[RotationPlane, ...]
    kernel_basis: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([p.frequency for p in self.planes])

    @property
    def rank(self) -> int:
        """Number of rotation planes (half the matrix rank)."""
        return len(self.planes)

    def reassemble(self) -> np.ndarray:
        """Rebuild M = sum_h lambda_h (v_perp v^T - v v_perp^T)."""
        out = np.zeros((self.dim, self.dim))
        for plane in self.planes:
            out += plane.frequency * (np.outer(plane.v_perp, plane.v) - np.outer(plane.v, plane.v_perp))
        return out

    def clusters(self, rel_tol: float = FREQUENCY_MERGE_TOLERANCE) -> List[List[int]]:
        """
        Group plane indices whose frequencies agree within a relative tolerance.

        Returns:
            List of index lists, in ascending frequency order
        """
        groups: List[List[int]] = []
        for idx, plane in enumerate(self.planes):
            if groups:
                lead = self.planes[groups[-1][0]].frequency
                if plane.frequency - lead <= rel_tol * plane.frequency:
                    groups[-1].append(idx)
                    continue
            groups.append([idx])
        return groups

    def exp_apply(self, x: ArrayLike, s: float = 1.0) -> np.ndarray:
        """
        Apply exp(s M) to x using the plane formula.

        Each plane rotates by angle s * lambda; the kernel is left fixed.
        """
        x = np.asarray(x, dtype=float)
        out = self.kernel_basis @ (self.kernel_basis.T @ x)
        for plane in self.planes:
            p = float(plane.v @ x)
            q = float(plane.v_perp @ x)
            c = np.cos(s * plane.frequency)
            sn = np.sin(s * plane.frequency)
            out = out + c * (p * plane.v + q * plane.v_perp) + sn * (p * plane.v_perp - q * plane.v)
        return out


def as_skew(M: Union[SkewMatrix, np.ndarray]) -> SkewMatrix:
    """Wrap an array as SkewMatrix (no-op for SkewMatrix input)."""
    if isinstance(M, SkewMatrix):
        return M
    return SkewMatrix(np.asarray(M, dtype=float))


def skew_spectral(M: Union[SkewMatrix, np.ndarray]) -> PlaneDecomposition:
    """
    Decompose a skew-symmetric matrix into rotation planes and a kernel.

    Uses the real Schur form, which is block diagonal for normal matrices.
    For every 2x2 block the first Schur vector becomes v and
    v_perp = M v / |M v|, so the sign of v_perp is fixed by M.

    Args:
        M: Skew-symmetric matrix (SkewMatrix or array)

    Returns:
        PlaneDecomposition with planes sorted by ascending frequency
    """
    skew = as_skew(M)
    a = skew.entries
    m = skew.dim
    scale = skew.norm()
    if scale == 0.0:
        return PlaneDecomposition(dim=m, planes=(), kernel_basis=np.eye(m))

    T, Z = linalg.schur(a, output='real')

    planes = []
    kernel = []
    i = 0
    while i < m:
        if i + 1 < m and T[i + 1, i] != 0.0:
            v = Z[:, i].copy()
            w = a @ v
            lam = float(np.linalg.norm(w))
            if lam <= KERNEL_TOLERANCE * scale:
                kernel.extend([Z[:, i], Z[:, i + 1]])
            else:
                planes.append(RotationPlane(frequency=lam, v=v, v_perp=w / lam))
            i += 2
        else:
            kernel.append(Z[:, i])
            i += 1

    planes.sort(key=lambda p: p.frequency)
    kernel_basis = np.column_stack(kernel) if kernel else np.zeros((m, 0))
    return PlaneDecomposition(dim=m, planes=tuple(planes), kernel_basis=kernel_basis)


def skew_exp_apply(M: Union[SkewMatrix, np.ndarray], x: ArrayLike) -> np.ndarray:
    """
    Compute e^M x through the plane decomposition of M.

    Args:
        M: Skew-symmetric matrix
        x: Vector of matching dimension

    Returns:
        np.ndarray: e^M x (same norm as x)
    """
    skew = as_skew(M)
    x = np.asarray(x, dtype=float)
    if x.shape != (skew.dim,):
        raise ValueError(f"vector of length {skew.dim} expected, got shape {x.shape}")
    return skew_spectral(skew).exp_apply(x)


def bivector_pairs(m: int) -> List[Tuple[int, int]]:
    """Index pairs (j, k), j < k, in the canonical lexicographic order."""
    return [(j, k) for j in range(m) for k in range(j + 1, m)]


def bivector_index(j: int, k: int, m: int) -> int:
    """Position of the (j, k) coordinate (0-based, j < k) in the flattening."""
    if not 0 <= j < k < m:
        raise ValueError(f"need 0 <= j < k < {m}, got ({j}, {k})")
    return j * m - j * (j + 1) // 2 + (k - j - 1)


@dataclass(frozen=True, eq=False)
class Bivector:
    """
    Element of the second exterior power of R^m.

    Coefficients z_jk for j < k are stored in lexicographic order; the
    elementary bivectors e_j ^ e_k form an orthonormal basis.
    """
    dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        expected = self.dim * (self.dim - 1) // 2
        if coeffs.shape[0] != expected:
            raise ValueError(f"bivector of R^{self.dim} needs {expected} coefficients, got {coeffs.shape[0]}")
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def zeros(cls, dim: int) -> 'Bivector':
        return cls(dim, np.zeros(dim * (dim - 1) // 2))

    @classmethod
    def from_matrix(cls, M: Union[SkewMatrix, np.ndarray]) -> 'Bivector':
        skew = as_skew(M)
        rows, cols = np.triu_indices(skew.dim, 1)
        return cls(skew.dim, skew.entries[rows, cols])

    def to_matrix(self) -> SkewMatrix:
        """Skew matrix with M[j, k] = z_jk for j < k."""
        out = np.zeros((self.dim, self.dim))
        rows, cols = np.triu_indices(self.dim, 1)
        out[rows, cols] = self.coeffs
        out[cols, rows] = -self.coeffs
        return SkewMatrix(out)

    def inner(self, other: 'Bivector') -> float:
        if other.dim != self.dim:
            raise ValueError("bivectors of different dimension")
        return float(self.coeffs @ other.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __add__(self, other: 'Bivector') -> 'Bivector':
        return Bivector(self.dim, self.coeffs + other.coeffs)

    def __sub__(self, other: 'Bivector') -> 'Bivector':
        return Bivector(self.dim, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> 'Bivector':
        return Bivector(self.dim, float(scalar) * self.coeffs)

    __rmul__ = __mul__


def wedge(x: ArrayLike, y: ArrayLike) -> Bivector:
    """
    Exterior product x ^ y with coefficients x_j y_k - x_k y_j.

    Raises:
        ValueError: If x and y have different lengths
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"wedge needs two vectors of equal length, got {x.shape} and {y.shape}")
    m = x.shape[0]
    rows, cols = np.triu_indices(m, 1)
    return Bivector(m, x[rows] * y[cols] - x[cols] * y[rows])


def bivector_support(z: Bivector, tol: float = DEFAULT_SUPPORT_TOLERANCE) -> Tuple[int, np.ndarray]:
    """
    Rank and support of a bivector.

    The support is the span of the rotation planes of the associated skew
    matrix; planes with frequency below tol * |z| are dropped.

    Args:
        z: Bivector
        tol: Relative cut-off (> 0)

    Returns:
        (rank, basis) where basis is an m x 2*rank array of orthonormal columns
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    norm = z.norm()
    if norm == 0.0:
        return 0, np.zeros((z.dim, 0))
    decomposition = skew_spectral(z.to_matrix())
    kept = [p for p in decomposition.planes if p.frequency > tol * norm]
    if not kept:
        return 0, np.zeros((z.dim, 0))
    basis = np.column_stack([vec for p in kept for vec in (p.v, p.v_perp)])
    return len(kept), basis


def orthonormal_basis(columns: np.ndarray, rel_tol: float = NULLSPACE_TOLERANCE) -> np.ndarray:
    """
    Orthonormal basis of the column span of a matrix.

    Singular values below rel_tol times the largest one are treated as zero.
    Empty or zero input gives an m x 0 array.
    """
    columns = np.asarray(columns, dtype=float)
    if columns.ndim == 1:
        columns = columns[:, None]
    m = columns.shape[0]
    if columns.shape[1] == 0 or not np.any(columns):
        return np.zeros((m, 0))
    return linalg.orth(columns, rcond=rel_tol)


def vandermonde_span(vs: Sequence[ArrayLike], lambdas: ArrayLike,
                     rel_tol: float = NULLSPACE_TOLERANCE) -> np.ndarray:
    """
    Orthonormal basis of span{ sum_k lambda_k^(2j-1) v_k : 1 <= j <= p }.

    With distinct positive frequencies the Vandermonde matrix in lambda_k^2 is
    invertible, so the result spans the same space as the v_k themselves.

    Args:
        vs: p vectors of R^m
        lambdas: p distinct positive frequencies
        rel_tol: Relative rank cut-off

    Returns:
        m x r array of orthonormal columns

    Raises:
        ValueError: On length mismatch or non-positive frequencies
        DuplicateFrequencyError: If two frequencies agree within relative 1e-9
    """
    lambdas = np.asarray(lambdas, dtype=float).reshape(-1)
    if len(vs) != lambdas.shape[0]:
        raise ValueError(f"{len(vs)} vectors but {lambdas.shape[0]} frequencies")
    if lambdas.shape[0] == 0:
        raise ValueError("at least one vector is required")
    if np.any(lambdas <= 0):
        raise ValueError("frequencies must be positive")

    ordered = np.sort(lambdas)
    gaps = np.diff(ordered)
    if np.any(gaps <= FREQUENCY_MERGE_TOLERANCE * ordered[1:]):
        raise DuplicateFrequencyError(f"frequencies are not distinct: {lambdas.tolist()}")

    V = np.column_stack([np.asarray(v, dtype=float) for v in vs])
    p = lambdas.shape[0]
    powers = np.arange(1, 2 * p, 2)
    vandermonde = lambdas[:, None] ** powers[None, :]
    columns = V @ vandermonde

    norms = np.linalg.norm(columns, axis=0)
    nonzero = norms > 0
    columns = columns[:, nonzero] / norms[nonzero]
    return orthonormal_basis(columns, rel_tol)
