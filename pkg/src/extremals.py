#!/usr/bin/env python3
"""
Normal extremals of step-two groups and abnormality tests.

A normal extremal control has the form u(s) = exp(-s tau A) u0.  Through the
plane decomposition of -tau A it is written as

    u(s) = sum_k (cos(lambda_k s) a_k + sin(lambda_k s) a_k_perp) + z

with distinct frequencies lambda_k, pairwise orthogonal vectors and z in the
kernel.  The span W of all these vectors decides abnormality: the control is
singular iff some nonzero sigma has W inside ker(sigma A).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

try:
    from .constants import (
        EXTREMAL_SAMPLE_STEPS, FREQUENCY_MERGE_TOLERANCE, KERNEL_TOLERANCE,
        NULLSPACE_TOLERANCE, SERIES_THRESHOLD, DEFAULT_SUPPORT_TOLERANCE
    )
    from .controls import Control
    from .groups import CarnotStructure, GroupElement, GroupError, StepTwoGroup
    from .linalg_skew import SkewMatrix, bivector_support, orthonormal_basis, skew_exp_apply, skew_spectral
    from .validation import validate_positive_int, validate_positive_number, validate_vector
except ImportError:
    from constants import (
        EXTREMAL_SAMPLE_STEPS, FREQUENCY_MERGE_TOLERANCE, KERNEL_TOLERANCE,
        NULLSPACE_TOLERANCE, SERIES_THRESHOLD, DEFAULT_SUPPORT_TOLERANCE
    )
    from controls import Control
    from groups import CarnotStructure, GroupElement, GroupError, StepTwoGroup
    from linalg_skew import SkewMatrix, bivector_support, orthonormal_basis, skew_exp_apply, skew_spectral
    from validation import validate_positive_int, validate_positive_number, validate_vector

logger = logging.getLogger(__name__)


class NotFreeGroupError(GroupError):
    """Operation defined only on free step-two groups"""
    pass


@dataclass(frozen=True, eq=False)
class ExtremalMode:
    """One rotating pair cos(frequency s) a + sin(frequency s) a_perp."""
    frequency: float
    a: np.ndarray
    a_perp: np.ndarray


@dataclass(frozen=True, eq=False)
class NormalExtremal:
    """
    Normal extremal control of a step-two group.

    Attributes:
        tau: Covector in R^l
        u0: Initial control value
        generator: The skew matrix -tau A
        modes: Rotating pairs with distinct ascending frequencies
        z: Kernel component of u0
    """
    tau: np.ndarray
    u0: np.ndarray
    generator: SkewMatrix
    modes: Tuple[ExtremalMode, ...]
    z: np.ndarray

    @property
    def p(self) -> int:
        return len(self.modes)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([mode.frequency for mode in self.modes])

    def control_value(self, s) -> np.ndarray:
        """u(s) from the trigonometric form; s may be a scalar or an array."""
        s = np.asarray(s, dtype=float)
        out = np.multiply.outer(np.ones_like(s), self.z)
        for mode in self.modes:
            angle = mode.frequency * s
            out = out + np.multiply.outer(np.cos(angle), mode.a) + np.multiply.outer(np.sin(angle), mode.a_perp)
        return out

    def flow_value(self, s: float) -> np.ndarray:
        """u(s) = exp(-s tau A) u0 evaluated directly."""
        return skew_exp_apply(float(s) * self.generator, self.u0)

    def length(self) -> float:
        """Constant speed |u0|, which is also the length on [0, 1]."""
        squared = float(self.z @ self.z) + sum(float(mode.a @ mode.a) for mode in self.modes)
        return float(np.sqrt(squared))

    def sample(self, n_steps: int = EXTREMAL_SAMPLE_STEPS) -> Control:
        """
        Piecewise-constant control holding the exact average of u on every cell.

        The x-part of its endpoint equals the x-part of the extremal's endpoint.
        """
        n_steps = validate_positive_int(n_steps, "n_steps")
        h = 1.0 / n_steps
        left = np.arange(n_steps) * h
        right = left + h
        values = np.tile(self.z, (n_steps, 1))
        for mode in self.modes:
            lam = mode.frequency
            cos_avg = (np.sin(lam * right) - np.sin(lam * left)) / (lam * h)
            sin_avg = (np.cos(lam * left) - np.cos(lam * right)) / (lam * h)
            values = values + np.outer(cos_avg, mode.a) + np.outer(sin_avg, mode.a_perp)
        return Control(values)

    def vectors(self) -> List[np.ndarray]:
        out = []
        for mode in self.modes:
            out.extend([mode.a, mode.a_perp])
        if np.any(self.z):
            out.append(self.z)
        return out

    def W_basis(self) -> np.ndarray:
        """Orthonormal basis of W = span{a_k, a_k_perp, z}."""
        vectors = self.vectors()
        if not vectors:
            return np.zeros((self.u0.shape[0], 0))
        return orthonormal_basis(np.column_stack(vectors), NULLSPACE_TOLERANCE)

    def to_dict(self) -> dict:
        return {
            'tau': self.tau.tolist(),
            'u0': self.u0.tolist(),
            'lambdas': self.lambdas.tolist(),
            'length': self.length(),
        }


@dataclass(frozen=True, eq=False)
class AbnormalityCertificate:
    """
    Witness that an extremal control is singular.

    Attributes:
        sigma: Unit covector with W inside ker(sigma A)
        W_basis: Orthonormal basis of W
    """
    sigma: np.ndarray
    W_basis: np.ndarray

    @property
    def dim_W(self) -> int:
        return self.W_basis.shape[1]


def _require_step_two(G: CarnotStructure) -> StepTwoGroup:
    if not isinstance(G, StepTwoGroup):
        raise GroupError(f"normal extremals are only built for step-two groups, not {G.name}")
    return G


def make_extremal(G: StepTwoGroup, tau: Sequence[float], u0: Sequence[float]) -> NormalExtremal:
    """
    Canonical trigonometric form of u(s) = exp(-s tau A) u0.

    Planes of -tau A whose frequencies agree within a relative 1e-9 are merged
    into one mode; planes that u0 does not touch are dropped.

    Args:
        G: Step-two group
        tau: Covector in R^l
        u0: Initial control in R^m

    Returns:
        NormalExtremal
    """
    G = _require_step_two(G)
    tau = validate_vector(tau, G.ell, "tau")
    u0 = validate_vector(u0, G.m, "u0")

    generator = G.sigma_matrix(-tau)
    decomposition = skew_spectral(generator)
    floor = KERNEL_TOLERANCE * max(1.0, float(np.linalg.norm(u0)))

    modes = []
    for cluster in decomposition.clusters(FREQUENCY_MERGE_TOLERANCE):
        a = np.zeros(G.m)
        a_perp = np.zeros(G.m)
        for idx in cluster:
            plane = decomposition.planes[idx]
            p = float(plane.v @ u0)
            q = float(plane.v_perp @ u0)
            a += p * plane.v + q * plane.v_perp
            a_perp += p * plane.v_perp - q * plane.v
        if np.linalg.norm(a) <= floor:
            continue
        frequency = float(np.mean([decomposition.planes[idx].frequency for idx in cluster]))
        modes.append(ExtremalMode(frequency=frequency, a=a, a_perp=a_perp))

    kernel = decomposition.kernel_basis
    z = kernel @ (kernel.T @ u0)
    return NormalExtremal(tau=tau, u0=u0, generator=generator, modes=tuple(modes), z=z)


# Integrals over [0, 1] of products of the basis functions
# 1, s, cos(c s), sin(c s).

def _sinc(c: float) -> float:
    """int_0^1 cos(c s) ds"""
    if abs(c) < SERIES_THRESHOLD:
        c2 = c * c
        return 1.0 - c2 / 6.0 + c2 * c2 / 120.0
    return np.sin(c) / c


def _cosc(c: float) -> float:
    """int_0^1 sin(c s) ds"""
    if abs(c) < SERIES_THRESHOLD:
        return c / 2.0 - c ** 3 / 24.0
    return (1.0 - np.cos(c)) / c


def _lin_cos(c: float) -> float:
    if abs(c) < SERIES_THRESHOLD:
        c2 = c * c
        return 0.5 - c2 / 8.0 + c2 * c2 / 144.0
    return (c * np.sin(c) + np.cos(c) - 1.0) / (c * c)


def _lin_sin(c: float) -> float:
    if abs(c) < SERIES_THRESHOLD:
        return c / 3.0 - c ** 3 / 30.0
    return (np.sin(c) - c * np.cos(c)) / (c * c)


def _product_integral(f: Tuple[str, float], g: Tuple[str, float]) -> float:
    """int_0^1 f(s) g(s) ds with f in {const, lin, cos, sin} and g in {const, cos, sin}."""
    f_kind, a = f
    g_kind, b = g
    if g_kind == 'const':
        return {'const': 1.0, 'lin': 0.5, 'cos': _sinc(a), 'sin': _cosc(a)}[f_kind]
    if f_kind == 'const':
        return _sinc(b) if g_kind == 'cos' else _cosc(b)
    if f_kind == 'lin':
        return _lin_cos(b) if g_kind == 'cos' else _lin_sin(b)
    if f_kind == 'cos' and g_kind == 'cos':
        return 0.5 * (_sinc(a - b) + _sinc(a + b))
    if f_kind == 'sin' and g_kind == 'sin':
        return 0.5 * (_sinc(a - b) - _sinc(a + b))
    if f_kind == 'sin':
        return 0.5 * (_cosc(a + b) + _cosc(a - b))
    return 0.5 * (_cosc(a + b) - _cosc(a - b))


def _basis_value(kind: str, frequency: float) -> float:
    """Basis function at s = 1."""
    return {'const': 1.0, 'lin': 1.0, 'cos': np.cos(frequency), 'sin': np.sin(frequency)}[kind]


def extremal_endpoint(G: StepTwoGroup, ext: NormalExtremal) -> GroupElement:
    """
    Exact endpoint of a normal extremal, integrated in closed form.

    Args:
        G: Step-two group
        ext: Normal extremal of G

    Returns:
        GroupElement
    """
    G = _require_step_two(G)

    u_terms = [(('const', 0.0), ext.z)]
    x_terms = [(('lin', 0.0), ext.z)]
    for mode in ext.modes:
        lam = mode.frequency
        u_terms.append((('cos', lam), mode.a))
        u_terms.append((('sin', lam), mode.a_perp))
        x_terms.append((('sin', lam), mode.a / lam))
        x_terms.append((('const', 0.0), mode.a_perp / lam))
        x_terms.append((('cos', lam), -mode.a_perp / lam))

    x = np.zeros(G.m)
    for (kind, frequency), vec in x_terms:
        x += _basis_value(kind, frequency) * vec

    t = np.zeros(G.ell)
    for f, x_vec in x_terms:
        for g, u_vec in u_terms:
            t += _product_integral(f, g) * G.bracket(x_vec, u_vec)
    return GroupElement(x, 0.5 * t)


def _unit_sign(sigma: np.ndarray) -> np.ndarray:
    sigma = sigma / np.linalg.norm(sigma)
    lead = np.flatnonzero(np.abs(sigma) > 1e-14)
    if lead.size and sigma[lead[0]] < 0:
        sigma = -sigma
    return sigma


def _as_columns(G: StepTwoGroup, W_basis) -> np.ndarray:
    W_basis = np.asarray(W_basis, dtype=float)
    if W_basis.ndim == 1:
        W_basis = W_basis[:, None]
    if W_basis.shape[0] != G.m:
        raise ValueError(f"W basis must have {G.m} rows, got shape {W_basis.shape}")
    return W_basis


def annihilating_covectors(G: StepTwoGroup, W_basis: np.ndarray,
                           tol: float = NULLSPACE_TOLERANCE) -> np.ndarray:
    """
    Basis (l x k) of all sigma with (sigma A) w = 0 for every column w of W_basis.

    The conditions are linear in sigma; the nullspace is taken by SVD with a
    relative cut-off.
    """
    W_basis = _as_columns(G, W_basis)
    if W_basis.shape[1] == 0:
        return np.eye(G.ell)
    system = np.vstack([G.vertical_map(w).T for w in W_basis.T])
    if not np.any(system):
        return np.eye(G.ell)
    return linalg.null_space(system, rcond=tol)


def abnormality_test(G: StepTwoGroup, ext: NormalExtremal,
                     tol: float = NULLSPACE_TOLERANCE) -> Optional[AbnormalityCertificate]:
    """
    Test whether a normal extremal is also abnormal.

    Args:
        G: Step-two group
        ext: Normal extremal
        tol: Relative nullspace threshold (> 0)

    Returns:
        AbnormalityCertificate, or None if no sigma annihilates W
    """
    G = _require_step_two(G)
    tol = validate_positive_number(tol, "nullspace tolerance")
    W = ext.W_basis()
    covectors = annihilating_covectors(G, W, tol)
    if covectors.shape[1] == 0:
        return None
    sigma = _unit_sign(covectors[:, 0])
    logger.debug("Extremal with dim W = %d is abnormal on %s, sigma = %s", W.shape[1], G.name, sigma)
    return AbnormalityCertificate(sigma=sigma, W_basis=W)


def abnormal_membership_free(G: StepTwoGroup, g: GroupElement,
                             tol: float = DEFAULT_SUPPORT_TOLERANCE) -> Tuple[bool, np.ndarray]:
    """
    Decide whether g is the endpoint of an abnormal curve of a free group.

    The smallest W with g in W x wedge^2 W is span(x) + support(t); g is an
    abnormal endpoint iff dim W <= m - 2.

    Args:
        G: Free step-two group
        g: Element of G
        tol: Relative cut-off for the bivector support

    Returns:
        (is_abnormal_endpoint, orthonormal basis of W_min)

    Raises:
        NotFreeGroupError: If G is not a free group
    """
    if not isinstance(G, StepTwoGroup) or not G.is_free:
        raise NotFreeGroupError(f"{G.name} is not a free step-two group")
    G.check_element(g)
    _, support = bivector_support(g.t_bivector(), tol)
    columns = np.column_stack([g.x[:, None], support])
    W_min = orthonormal_basis(columns, NULLSPACE_TOLERANCE)
    return W_min.shape[1] <= G.m - 2, W_min


def image_via_W(G: StepTwoGroup, W_basis: np.ndarray,
                tol: float = NULLSPACE_TOLERANCE) -> np.ndarray:
    """
    Span of (e_i, 0) and (0, <A w, e_j>) over a basis w of W.

    This is the image of dE(u) for any control whose values sweep W.

    Returns:
        (m + l) x r array of orthonormal columns
    """
    G = _require_step_two(G)
    W_basis = _as_columns(G, W_basis)
    horizontal = np.vstack([np.eye(G.m), np.zeros((G.ell, G.m))])
    blocks = [horizontal]
    for w in W_basis.T:
        blocks.append(np.vstack([np.zeros((G.m, G.m)), G.vertical_map(w)]))
    return orthonormal_basis(np.hstack(blocks), tol)
