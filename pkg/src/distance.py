#!/usr/bin/env python3
"""
Carnot-Carathéodory distance from the identity.

Public entry points: the direct solver, normal-extremal shooting for
step-two groups, their combination, the distance inside the subgroup
generated by a horizontal subspace of a free group, closed-form central
distances, and the lower bound at vertical cusps.

Every numerical value returned here is the length of a feasible control,
hence an upper estimate of the true distance.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize

try:
    from .constants import (
        METHOD_DIRECT_SHOOTING, METHOD_SHOOTING,
        ORTHOGONALITY_TOLERANCE, SHOOTING_MAX_NFEV, SHOOTING_TAU_SCALE,
        SUBGROUP_MEMBERSHIP_TOLERANCE
    )
    from .controls import Control, endpoint
    from .extremals import NotFreeGroupError, extremal_endpoint, make_extremal
    from .global_optimizer import oracle_bruteforce
    from .groups import CarnotStructure, GroupElement, GroupError, StepTwoGroup, subgroup
    from .linalg_skew import bivector_pairs, skew_spectral, wedge
    from .optimizer import ControlOptimizer, DistanceResult, SolverOptions
    from .preset_library import free_group
    from .validation import ValidationError, validate_finite_number, validate_unit_vector
except ImportError:
    from constants import (
        METHOD_DIRECT_SHOOTING, METHOD_SHOOTING,
        ORTHOGONALITY_TOLERANCE, SHOOTING_MAX_NFEV, SHOOTING_TAU_SCALE,
        SUBGROUP_MEMBERSHIP_TOLERANCE
    )
    from controls import Control, endpoint
    from extremals import NotFreeGroupError, extremal_endpoint, make_extremal
    from global_optimizer import oracle_bruteforce
    from groups import CarnotStructure, GroupElement, GroupError, StepTwoGroup, subgroup
    from linalg_skew import bivector_pairs, skew_spectral, wedge
    from optimizer import ControlOptimizer, DistanceResult, SolverOptions
    from preset_library import free_group
    from validation import ValidationError, validate_finite_number, validate_unit_vector

logger = logging.getLogger(__name__)

__all__ = [
    'SolverError', 'NotConvergedError', 'NoRootFoundError', 'PointNotInSubgroup',
    'OrthogonalityFails', 'SolverOptions', 'DistanceResult', 'solve_direct',
    'solve_shooting', 'distance', 'oracle_bruteforce', 'subgroup_distance_free',
    'central_distance_closed_form', 'cusp_lower_bound',
]


class SolverError(Exception):
    """Base class for solver failures"""
    pass


class NotConvergedError(SolverError):
    """No method reached the feasibility tolerance; carries the best attempt"""

    def __init__(self, result: DistanceResult, message: Optional[str] = None):
        self.result = result
        super().__init__(message or (
            f"no feasible control found (best residual {result.residual:.3e}, method {result.method})"
        ))


class NoRootFoundError(SolverError):
    """Shooting found no extremal reaching the target"""
    pass


class PointNotInSubgroup(ValidationError):
    """The point does not lie in the subgroup generated by W"""
    pass


class OrthogonalityFails(ValidationError):
    """(sigma A) w does not vanish, so the cusp bound does not apply"""
    pass


def solve_direct(G: CarnotStructure, target: GroupElement,
                 opts: Optional[SolverOptions] = None,
                 warm_start=None) -> DistanceResult:
    """
    Minimize the L2 length of a control subject to endpoint(u) = target.

    Never raises on non-convergence: the best attempt is returned with
    ``converged=False``.

    Args:
        G: Carnot structure
        target: Target point
        opts: Solver options (defaults when None)
        warm_start: Optional Control; when given, a single run starts from it
            instead of the multistart set

    Returns:
        DistanceResult
    """
    opts = opts or SolverOptions()
    solver = ControlOptimizer(G, target, opts)
    if warm_start is not None:
        return solver.polish(warm_start)
    return solver.optimize()


def _shooting_residual(G: StepTwoGroup, target_coords: np.ndarray, unknowns: np.ndarray) -> np.ndarray:
    tau, u0 = unknowns[:G.ell], unknowns[G.ell:]
    return extremal_endpoint(G, make_extremal(G, tau, u0)).coords() - target_coords


def _shooting_starts(G: StepTwoGroup, target: GroupElement, opts: SolverOptions) -> List[np.ndarray]:
    """Start 0 is the straight extremal (0, x); the others draw tau and u0 at random."""
    rng = np.random.default_rng(opts.rng_seed)
    scale = np.sqrt(float(np.linalg.norm(target.coords()))) + float(np.linalg.norm(target.x))
    starts = [np.concatenate([np.zeros(G.ell), target.x])]
    for _ in range(opts.n_starts - 1):
        tau = SHOOTING_TAU_SCALE * rng.standard_normal(G.ell)
        u0 = target.x + scale * rng.standard_normal(G.m)
        starts.append(np.concatenate([tau, u0]))
    return starts


def solve_shooting(G: StepTwoGroup, target: GroupElement,
                   opts: Optional[SolverOptions] = None) -> DistanceResult:
    """
    Find normal extremals u(s) = exp(-s tau A) u0 reaching the target.

    Damped least squares (Levenberg-Marquardt) on (tau, u0) from every start.
    Among the roots the one with smallest |u0| wins, ties going to smallest
    |tau|.  The returned control samples the winning extremal on the grid by
    exact cell averages.  ``value`` and ``residual`` are the length and the
    endpoint residual of that sampled control, so ``converged`` may be False
    on coarse grids even though the extremal itself is a root; the exact
    extremal length |u0| and its residual are kept in the diagnostics as
    ``extremal_length`` and ``extremal_residual``.

    Args:
        G: Step-two group
        target: Target point
        opts: Solver options

    Returns:
        DistanceResult with method "shooting"

    Raises:
        GroupError: If G is not a step-two group
        NoRootFoundError: If no start converges to a root
    """
    if not isinstance(G, StepTwoGroup):
        raise GroupError(f"shooting needs a step-two group, not {G.name}")
    opts = opts or SolverOptions()
    G.check_element(target)
    if target.is_identity():
        return ControlOptimizer(G, target, opts).optimize(METHOD_SHOOTING)

    target_coords = target.coords()
    roots: List[Tuple[float, float, int, np.ndarray, float]] = []
    for index, start in enumerate(_shooting_starts(G, target, opts)):
        try:
            fit = optimize.least_squares(
                lambda z: _shooting_residual(G, target_coords, z), start,
                method='lm', max_nfev=SHOOTING_MAX_NFEV * start.shape[0],
            )
        except (ValueError, ValidationError, np.linalg.LinAlgError) as e:
            logger.debug("Shooting start %d failed: %s", index, e)
            continue
        residual = float(np.linalg.norm(fit.fun))
        if residual <= opts.feas_tol:
            tau, u0 = fit.x[:G.ell], fit.x[G.ell:]
            roots.append((float(np.linalg.norm(u0)), float(np.linalg.norm(tau)), index, fit.x, residual))

    if not roots:
        raise NoRootFoundError(f"no normal extremal of {G.name} reaches {target.coords().tolist()}")

    value, tau_norm, index, unknowns, residual = min(roots, key=lambda r: (r[0], r[1], r[2]))
    ext = make_extremal(G, unknowns[:G.ell], unknowns[G.ell:])
    control = ext.sample(opts.n_steps)
    sampled = float(np.linalg.norm(endpoint(G, control).coords() - target_coords))
    logger.info("Shooting on %s: %d roots, best |u0| = %.6f (|tau| = %.4f), sampled residual %.2e",
                G.name, len(roots), value, tau_norm, sampled)
    return DistanceResult(
        value=control.l2_norm(), control=control, residual=sampled, method=METHOD_SHOOTING,
        n_starts=opts.n_starts, converged=sampled <= opts.feas_tol, seed=opts.rng_seed, target=target,
        diagnostics={
            'best_start': index,
            'tau': ext.tau.tolist(),
            'u0': ext.u0.tolist(),
            'roots_found': len(roots),
            'extremal_length': value,
            'extremal_residual': residual,
        },
    )


def distance(G: CarnotStructure, target: GroupElement,
             opts: Optional[SolverOptions] = None,
             warm_start: Optional[Control] = None) -> DistanceResult:
    """
    Best estimate of the distance from the identity to target.

    Runs the direct solver and, on step-two groups, shooting followed by a
    direct polish of the best extremal.  A warm start (for instance the
    control of a nearby target) adds one more polished candidate.  The
    smallest converged value wins.

    Raises:
        NotConvergedError: If no method produced a feasible control
    """
    opts = opts or SolverOptions()
    direct = solve_direct(G, target, opts)
    if target.is_identity():
        return direct

    candidates = [direct]
    if warm_start is not None:
        continued = solve_direct(G, target, opts, warm_start=warm_start)
        continued.diagnostics['warm_start'] = True
        candidates.append(continued)
    if isinstance(G, StepTwoGroup):
        try:
            shot = solve_shooting(G, target, opts)
        except NoRootFoundError as e:
            logger.warning("Shooting skipped: %s", e)
        else:
            polished = solve_direct(G, target, opts, warm_start=shot.control)
            polished.method = METHOD_DIRECT_SHOOTING
            polished.diagnostics['shooting_value'] = shot.diagnostics['extremal_length']
            polished.diagnostics['tau'] = shot.diagnostics['tau']
            candidates.append(polished)

    feasible = [c for c in candidates if c.converged]
    if not feasible:
        best = min(candidates, key=lambda c: c.residual)
        raise NotConvergedError(best)
    best = min(feasible, key=lambda c: c.value)
    logger.info("Distance on %s to %s: %.6f (%s)", G.name, target.coords().tolist(), best.value, best.method)
    return best


def _check_orthonormal(G: StepTwoGroup, W_basis: np.ndarray) -> np.ndarray:
    W_basis = np.asarray(W_basis, dtype=float)
    if W_basis.ndim == 1:
        W_basis = W_basis[:, None]
    if W_basis.ndim != 2 or W_basis.shape[0] != G.m:
        raise ValidationError(f"W basis must be an {G.m} x d array, got shape {W_basis.shape}")
    d = W_basis.shape[1]
    if not np.allclose(W_basis.T @ W_basis, np.eye(d), atol=SUBGROUP_MEMBERSHIP_TOLERANCE):
        raise ValidationError("W basis must have orthonormal columns")
    return W_basis


def subgroup_coordinates(G: StepTwoGroup, W_basis: np.ndarray,
                         g: GroupElement) -> Tuple[np.ndarray, np.ndarray]:
    """
    Coordinates of g in the free group F_d on W.

    xi_j = <x, w_j> and tau_jk = <w_j ^ w_k, t>.

    Raises:
        PointNotInSubgroup: If g is not in W x wedge^2 W within 1e-10
    """
    W_basis = _check_orthonormal(G, W_basis)
    G.check_element(g)
    d = W_basis.shape[1]
    xi = W_basis.T @ g.x
    pairs = bivector_pairs(d)
    planes = [wedge(W_basis[:, j], W_basis[:, k]).coeffs for j, k in pairs]
    tau = np.array([plane @ g.t for plane in planes])

    x_rest = g.x - W_basis @ xi
    t_rest = g.t - sum((c * plane for c, plane in zip(tau, planes)), np.zeros_like(g.t))
    scale = max(1.0, float(np.linalg.norm(g.coords())))
    if np.linalg.norm(x_rest) > SUBGROUP_MEMBERSHIP_TOLERANCE * scale or \
            np.linalg.norm(t_rest) > SUBGROUP_MEMBERSHIP_TOLERANCE * scale:
        raise PointNotInSubgroup(
            f"point {g.coords().tolist()} is not in the subgroup generated by the {d}-dimensional W"
        )
    return xi, tau


def subgroup_distance_free(G: StepTwoGroup, W_basis: np.ndarray, g: GroupElement,
                           opts: Optional[SolverOptions] = None) -> float:
    """
    Distance to g computed inside the free group on W.

    For free groups the distance of G restricted to G_W is the distance of
    the free group F_d, d = dim W.

    Args:
        G: Free step-two group
        W_basis: m x d orthonormal basis of W
        g: Point of W x wedge^2 W
        opts: Solver options

    Returns:
        float: Distance estimate

    Raises:
        NotFreeGroupError: If G is not free
        PointNotInSubgroup: If g is outside G_W
    """
    if not isinstance(G, StepTwoGroup) or not G.is_free:
        raise NotFreeGroupError(f"{G.name} is not a free step-two group")
    xi, tau = subgroup_coordinates(G, W_basis, g)
    d = xi.shape[0]
    if d <= 1:
        return float(np.linalg.norm(xi))
    F = free_group(d)
    point = GroupElement(xi, tau)
    closed = central_distance_closed_form(F, tau) if not np.any(xi) else None
    if closed is not None:
        return closed
    return distance(F, point, opts).value


def central_distance_closed_form(G: CarnotStructure, t: Sequence[float]) -> Optional[float]:
    """
    Exact distance from the identity to the central point (0, t), when known.

    One vertical dimension: sqrt(4 pi |t| / lambda_max) with lambda_max the
    largest rotation frequency of A.  Free groups: sqrt(4 pi sum_h lambda_h)
    with lambda_h the plane frequencies of the bivector t.

    Returns:
        The distance, or None when no closed form applies
    """
    if not isinstance(G, StepTwoGroup):
        return None
    t = np.asarray(t, dtype=float).reshape(-1)
    if t.shape[0] != G.ell:
        raise ValidationError(f"vertical part must have {G.ell} entries, got {t.shape[0]}")
    if G.ell == 1:
        lam_max = float(skew_spectral(G.A[0]).frequencies.max())
        return float(np.sqrt(4.0 * np.pi * abs(t[0]) / lam_max))
    if G.is_free:
        frequencies = skew_spectral(GroupElement(np.zeros(G.m), t).t_bivector().to_matrix()).frequencies
        return float(np.sqrt(4.0 * np.pi * frequencies.sum()))
    return None


def cusp_lower_bound(G: StepTwoGroup, w: Sequence[float], sigma: Sequence[float],
                     beta: float, opts: Optional[SolverOptions] = None) -> float:
    """
    Lower bound on d((w, beta sigma)) at an abnormal endpoint.

    A control reaching (w, beta sigma) splits as u_V + u_W with V = w^perp.
    When (sigma A) w = 0 the sigma-component of the vertical endpoint only
    depends on u_V, so the V-part alone reaches the vertical level beta inside
    G_V and the squared length is at least 1 + d_V(beta)^2.

    Args:
        G: Step-two group
        w: Unit horizontal vector
        sigma: Unit covector in R^l
        beta: Vertical offset (the bound depends on |beta| only)
        opts: Solver options, used only when d_V has no closed form

    Returns:
        float: sqrt(1 + d_V^2)

    Raises:
        OrthogonalityFails: If |(sigma A) w| > 1e-10
        ValidationError: If w or sigma is not a unit vector
    """
    if not isinstance(G, StepTwoGroup):
        raise GroupError(f"cusp bounds need a step-two group, not {G.name}")
    w = validate_unit_vector(w, G.m, "w")
    sigma = validate_unit_vector(sigma, G.ell, "sigma")
    beta = abs(validate_finite_number(beta, "beta"))

    defect = float(np.linalg.norm(G.sigma_matrix(sigma).apply(w)))
    if defect > ORTHOGONALITY_TOLERANCE:
        raise OrthogonalityFails(f"(sigma A) w has norm {defect:.3e}; <Aw, y> is not orthogonal to sigma")
    if beta == 0.0:
        return 1.0

    V = linalg.null_space(w[None, :])
    embedding = subgroup(G, V)
    vertical = embedding.vertical_basis
    projected = vertical @ (vertical.T @ sigma)
    weight = float(projected @ projected)
    if weight <= ORTHOGONALITY_TOLERANCE:
        raise GroupError("sigma does not reach the vertical layer of G_V")
    t_V = vertical.T @ (beta * projected / weight)

    if G.is_free:
        # G_V is isometric to a free group: read the bivector in G's own coordinates
        d_V = central_distance_closed_form(G, vertical @ t_V)
    else:
        d_V = central_distance_closed_form(embedding.group, t_V)
    if d_V is None:
        sub = embedding.group
        d_V = distance(sub, GroupElement(np.zeros(sub.m), t_V), opts).value
    logger.debug("Cusp bound on %s at beta=%g: d_V = %.6f", G.name, beta, d_V)
    return float(np.sqrt(1.0 + d_V * d_V))
