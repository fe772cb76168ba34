"""
Semiconcavity probes.

Each probe solves distances at a ladder of displaced points and tabulates
difference quotients next to closed-form lower bounds where one is known.
A probe reports a violation only when a converged solver value falls below
a rigorous lower bound by more than the combined tolerance; divergence
claims are checked as strict growth along the ladder and can only come out
consistent or inconclusive.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

try:
    from ..constants import (
        DEFAULT_CUSP_BETAS, DEFAULT_ENGEL_VERTICAL_LAMBDAS, DEFAULT_HORIZONTAL_DELTA,
        DEFAULT_HORIZONTAL_LAMBDAS, DEFAULT_SECOND_DIFFERENCE_SCALES, MODEL_ENGEL,
        MODEL_MARTINET, NULLSPACE_TOLERANCE, PARAMETER_FLOOR_FACTOR,
        PROBE_CUSP, PROBE_ENGEL_HORIZONTAL, PROBE_ENGEL_VERTICAL, PROBE_FREE_CUSP,
        PROBE_HORIZONTAL, PROBE_MARTINET_HORIZONTAL, PROBE_MARTINET_VERTICAL,
        PROBE_SECOND_DIFFERENCE, UNIFORMITY_RATIO, VALUE_ACCURACY,
        VERDICT_CONSISTENT, VERDICT_INCONCLUSIVE, VERDICT_VIOLATION
    )
    from ..controls import Control
    from ..distance import NotConvergedError, OrthogonalityFails, cusp_lower_bound, distance
    from ..extremals import NotFreeGroupError, abnormal_membership_free
    from ..groups import CarnotStructure, GroupElement, ModelSystem, StepTwoGroup, check_metivier
    from ..linalg_skew import Bivector, bivector_pairs, skew_spectral, wedge
    from ..optimizer import DistanceResult, SolverOptions
    from ..validation import ValidationError, validate_finite_number, validate_vector
except ImportError:
    from src.constants import (
        DEFAULT_CUSP_BETAS, DEFAULT_ENGEL_VERTICAL_LAMBDAS, DEFAULT_HORIZONTAL_DELTA,
        DEFAULT_HORIZONTAL_LAMBDAS, DEFAULT_SECOND_DIFFERENCE_SCALES, MODEL_ENGEL,
        MODEL_MARTINET, NULLSPACE_TOLERANCE, PARAMETER_FLOOR_FACTOR,
        PROBE_CUSP, PROBE_ENGEL_HORIZONTAL, PROBE_ENGEL_VERTICAL, PROBE_FREE_CUSP,
        PROBE_HORIZONTAL, PROBE_MARTINET_HORIZONTAL, PROBE_MARTINET_VERTICAL,
        PROBE_SECOND_DIFFERENCE, UNIFORMITY_RATIO, VALUE_ACCURACY,
        VERDICT_CONSISTENT, VERDICT_INCONCLUSIVE, VERDICT_VIOLATION
    )
    from src.controls import Control
    from src.distance import NotConvergedError, OrthogonalityFails, cusp_lower_bound, distance
    from src.extremals import NotFreeGroupError, abnormal_membership_free
    from src.groups import CarnotStructure, GroupElement, ModelSystem, StepTwoGroup, check_metivier
    from src.linalg_skew import Bivector, bivector_pairs, skew_spectral, wedge
    from src.optimizer import DistanceResult, SolverOptions
    from src.validation import ValidationError, validate_finite_number, validate_vector

logger = logging.getLogger(__name__)

# Base distance accepted as "unit" by the horizontal probe
UNIT_BASE_TOLERANCE = 1e-2


class ProbeError(ValidationError):
    """Raised when probe inputs violate the probe's preconditions"""
    pass


@dataclass
class ProbePoint:
    """
    One row of a probe table.

    ``lower_bound`` is on the scale of the quotient; ``distance_bound`` is the
    matching lower bound on ``distance`` itself.  ``bound_rigorous`` is False
    when the bound was built from a solver estimate rather than an exact
    distance; such bounds never produce a violation.
    """
    parameter: float
    distance: float
    base_distance: float
    quotient: float
    lower_bound: Optional[float] = None
    converged: bool = True
    distance_bound: Optional[float] = None
    bound_rigorous: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            'parameter': self.parameter,
            'distance': self.distance,
            'base_distance': self.base_distance,
            'quotient': self.quotient,
            'lower_bound': self.lower_bound,
            'converged': self.converged,
            'bound_rigorous': self.bound_rigorous,
        }


@dataclass
class ProbeReport:
    """Quotient table and verdict of one probe"""
    probe_kind: str
    points: List[ProbePoint]
    verdict: str
    solver_opts: SolverOptions
    notes: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def quotients(self) -> List[float]:
        return [p.quotient for p in self.points]

    def rows(self) -> List[Dict[str, Any]]:
        return [p.to_dict() for p in self.points]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'probe_kind': self.probe_kind,
            'verdict': self.verdict,
            'points': self.rows(),
            'notes': list(self.notes),
            'summary': dict(self.summary),
            'solver_opts': self.solver_opts.to_dict(),
        }


def combined_tolerance(d: float, opts: SolverOptions) -> float:
    """Slack allowed on a distance value d: 2 * value accuracy * d + feas_tol."""
    return 2.0 * VALUE_ACCURACY * abs(d) + opts.feas_tol


def _check_parameter(value: float, name: str, allow_zero: bool = True) -> float:
    value = validate_finite_number(value, name)
    if value == 0.0:
        if not allow_zero:
            raise ProbeError(f"{name} must be nonzero (the quotient is undefined at 0)")
        return value
    floor = PARAMETER_FLOOR_FACTOR * VALUE_ACCURACY
    if abs(value) < floor * (1.0 - 1e-9):
        raise ProbeError(f"{name} = {value} is below the solver accuracy floor {floor}")
    return value


def _solve_result(G: CarnotStructure, target: GroupElement, opts: SolverOptions,
                  warm_start: Optional[Control] = None) -> Tuple[DistanceResult, bool]:
    try:
        result = distance(G, target, opts, warm_start=warm_start)
    except NotConvergedError as e:
        logger.warning("Probe point %s did not converge (residual %.2e)",
                       target.coords().tolist(), e.result.residual)
        return e.result, False
    return result, result.converged


def _solve(G: CarnotStructure, target: GroupElement, opts: SolverOptions) -> Tuple[float, bool]:
    result, ok = _solve_result(G, target, opts)
    return result.value, ok


def _continued_solves(G: CarnotStructure, make_point, values: Sequence[float],
                      opts: SolverOptions) -> Dict[float, Tuple[float, bool]]:
    """
    Solve the nonzero ladder values in order of increasing |value|.

    Each solve is warm-started from the last converged control, which
    carries a loop found at a small offset over to the larger ones.
    """
    solved: Dict[float, Tuple[float, bool]] = {}
    previous: Optional[Control] = None
    for v in sorted({v for v in values if v != 0.0}, key=abs):
        result, ok = _solve_result(G, G.element(make_point(v)), opts, warm_start=previous)
        if ok:
            previous = result.control
        solved[v] = (result.value, ok)
    return solved


def _verdict(points: List[ProbePoint], opts: SolverOptions,
             notes: List[str], extra_inconclusive: bool = False) -> str:
    """Violation on a breached bound, inconclusive on failed solves or checks."""
    for p in points:
        if p.converged and p.bound_rigorous and p.distance_bound is not None:
            if p.distance < p.distance_bound - combined_tolerance(p.distance, opts):
                notes.append(
                    f"parameter {p.parameter:g}: distance {p.distance:.6f} below bound {p.distance_bound:.6f}"
                )
                return VERDICT_VIOLATION
    if any(not p.converged for p in points):
        notes.append("some points did not converge")
        return VERDICT_INCONCLUSIVE
    if extra_inconclusive:
        return VERDICT_INCONCLUSIVE
    return VERDICT_CONSISTENT


def _strictly_increasing(points: List[ProbePoint], opts: SolverOptions) -> bool:
    """Quotients along the ladder grow by more than their combined tolerances."""
    for prev, nxt in zip(points, points[1:]):
        slack = (combined_tolerance(prev.distance, opts) / prev.parameter ** 2
                 + combined_tolerance(nxt.distance, opts) / nxt.parameter ** 2)
        if not nxt.quotient - prev.quotient > slack:
            return False
    return True


def second_difference(G: CarnotStructure, base: GroupElement, h: Sequence[float],
                      scales: Sequence[float] = DEFAULT_SECOND_DIFFERENCE_SCALES,
                      opts: Optional[SolverOptions] = None) -> ProbeReport:
    """
    Euclidean second differences (d(b + s h) + d(b - s h) - 2 d(b)) / (2 s^2 |h|^2).

    The ``distance`` column holds the mean of the two displaced values.  The
    quotients are called bounded when each one stays below 1.5 times the
    value at the largest scale, up to tolerance.

    Raises:
        ProbeError: If base is the identity or a scale is below the floor
    """
    opts = opts or SolverOptions()
    G.check_element(base)
    if base.is_identity():
        raise ProbeError("the second difference is taken away from the identity")
    h = validate_vector(h, G.state_dim, "direction h")
    scales = sorted((_check_parameter(s, "scale", allow_zero=False) for s in scales), key=abs, reverse=True)
    h_norm2 = float(h @ h)

    d0, ok0 = _solve(G, base, opts)
    points = []
    for s in scales:
        if h_norm2 == 0.0:
            points.append(ProbePoint(s, d0, d0, 0.0, converged=ok0))
            continue
        plus, ok_plus = _solve(G, G.element(base.coords() + s * h), opts)
        minus, ok_minus = _solve(G, G.element(base.coords() - s * h), opts)
        quotient = (plus + minus - 2.0 * d0) / (2.0 * s * s * h_norm2)
        points.append(ProbePoint(s, 0.5 * (plus + minus), d0, quotient,
                                 converged=ok0 and ok_plus and ok_minus))

    notes: List[str] = []
    bounded = True
    if h_norm2 > 0.0 and len(points) > 1:
        reference = points[0].quotient
        for p in points[1:]:
            slack = 4.0 * combined_tolerance(p.distance, opts) / (2.0 * p.parameter ** 2 * h_norm2)
            if p.quotient > 1.5 * abs(reference) + slack:
                bounded = False
        if not bounded:
            notes.append("second differences grow as the scale shrinks")
    verdict = _verdict(points, opts, notes, extra_inconclusive=not bounded)
    return ProbeReport(PROBE_SECOND_DIFFERENCE, points, verdict, opts, notes,
                       summary={'bounded': bounded, 'max_quotient': max(p.quotient for p in points)})


def vertical_cusp_probe(G: StepTwoGroup, w: Sequence[float], sigma: Sequence[float],
                        betas: Sequence[float] = DEFAULT_CUSP_BETAS,
                        opts: Optional[SolverOptions] = None) -> ProbeReport:
    """
    Quotients (d(w, beta sigma) - d(w, 0)) / |beta| at an abnormal endpoint.

    The lower-bound column comes from cusp_lower_bound, (sqrt(1 + d_V^2) - 1) / |beta|.

    Raises:
        OrthogonalityFails: If (sigma A) w does not vanish
    """
    opts = opts or SolverOptions()
    betas = [_check_parameter(b, "beta") for b in betas]
    w_arr = validate_vector(w, G.m, "w")
    sigma_arr = validate_vector(sigma, G.ell, "sigma")
    # Validates the precondition before any solve
    cusp_lower_bound(G, w_arr, sigma_arr, 0.0, opts)

    base = GroupElement(w_arr, np.zeros(G.ell))
    d0, ok0 = _solve(G, base, opts)
    points = []
    for beta in betas:
        if beta == 0.0:
            points.append(ProbePoint(beta, d0, d0, 0.0, 0.0, ok0, 1.0))
            continue
        value, ok = _solve(G, GroupElement(w_arr, beta * sigma_arr), opts)
        bound = cusp_lower_bound(G, w_arr, sigma_arr, beta, opts)
        points.append(ProbePoint(beta, value, d0, (value - d0) / abs(beta),
                                 (bound - 1.0) / abs(beta), ok and ok0, bound))

    notes: List[str] = []
    verdict = _verdict(points, opts, notes)
    return ProbeReport(PROBE_CUSP, points, verdict, opts, notes)


def _wedge_basis(V: np.ndarray) -> np.ndarray:
    """Columns v_i ^ v_j, i < j, for the columns of V."""
    m = V.shape[0]
    pairs = bivector_pairs(V.shape[1])
    if not pairs:
        return np.zeros((m * (m - 1) // 2, 0))
    return np.column_stack([wedge(V[:, i], V[:, j]).coeffs for i, j in pairs])


def free_vertical_cusp_probe(G: StepTwoGroup, g: GroupElement, sigma: Sequence[float],
                             betas: Sequence[float] = DEFAULT_CUSP_BETAS,
                             opts: Optional[SolverOptions] = None) -> ProbeReport:
    """
    Quotients (d(x, t + beta sigma) - d(x, t)) / |beta| in a free group.

    The projection onto G_W (W the minimal subspace of g) fixes (x, t) and
    kills sigma in wedge^2 V, V = W^perp, so a reaching control splits into a
    W-part of length at least d(x, t) and a V-part reaching (0, beta sigma)
    in the free group on V.  This gives the bound
    sqrt(d(x, t)^2 + 4 pi |beta| sum_h mu_h(sigma)), with mu_h the plane
    frequencies of sigma; d(x, t) is |x| when t = 0.  Otherwise the solver
    value stands in for it and the rows are flagged as not rigorous.

    Raises:
        NotFreeGroupError: If G is not free
        ProbeError: If g is not an abnormal endpoint or sigma is not in wedge^2 V
    """
    opts = opts or SolverOptions()
    if not isinstance(G, StepTwoGroup) or not G.is_free:
        raise NotFreeGroupError(f"{G.name} is not a free step-two group")
    betas = [_check_parameter(b, "beta") for b in betas]
    sigma = validate_vector(sigma, G.ell, "sigma")
    abnormal, W_min = abnormal_membership_free(G, g)
    if not abnormal:
        raise ProbeError(f"{g.coords().tolist()} is not the endpoint of an abnormal curve")

    V = linalg.null_space(W_min.T) if W_min.shape[1] else np.eye(G.m)
    planes = _wedge_basis(V)
    sigma_norm = float(np.linalg.norm(sigma))
    if sigma_norm == 0.0:
        raise ProbeError("sigma must be a nonzero bivector")
    projected = planes @ (planes.T @ sigma)
    if np.linalg.norm(sigma - projected) > NULLSPACE_TOLERANCE * max(1.0, sigma_norm):
        raise ProbeError("sigma is not supported in wedge^2 of the complement of W")

    mu = float(skew_spectral(Bivector(G.m, sigma).to_matrix()).frequencies.sum())
    d0, ok0 = _solve(G, g, opts)
    exact_reference = not np.any(g.t)
    reference = float(np.linalg.norm(g.x)) if exact_reference else d0
    points = []
    for beta in betas:
        if beta == 0.0:
            points.append(ProbePoint(beta, d0, d0, 0.0, 0.0, ok0, reference, exact_reference))
            continue
        value, ok = _solve(G, GroupElement(g.x, g.t + beta * sigma), opts)
        bound = float(np.sqrt(reference ** 2 + 4.0 * np.pi * abs(beta) * mu))
        points.append(ProbePoint(beta, value, d0, (value - d0) / abs(beta),
                                 (bound - reference) / abs(beta), ok and ok0, bound, exact_reference))

    notes: List[str] = []
    if not exact_reference:
        notes.append(f"t != 0: d(x, t) = {d0:.6f} is a solver estimate, so the bound column is not rigorous")
    verdict = _verdict(points, opts, notes)
    return ProbeReport(PROBE_FREE_CUSP, points, verdict, opts, notes,
                       summary={'dim_W': W_min.shape[1], 'bound_rigorous': exact_reference})


def _model(kind: str) -> ModelSystem:
    return ModelSystem(kind)


def engel_vertical_bound(x2: float, lam: float) -> float:
    """Lower bound 2 sqrt(x2^2/4 + |lam|/|x2|) on d(0, x2, 0, lam)."""
    return 2.0 * float(np.sqrt(x2 * x2 / 4.0 + abs(lam) / abs(x2)))


def engel_vertical_probe(x2: float = 1.0, lambdas: Sequence[float] = DEFAULT_ENGEL_VERTICAL_LAMBDAS,
                         opts: Optional[SolverOptions] = None) -> ProbeReport:
    """
    Quotients (d(0, x2, 0, lam) - |x2|) / |lam| along the Engel abnormal line.

    The offsets are solved in order of increasing |lam|, each warm-started
    from the previous converged control.

    Raises:
        ProbeError: If x2 = 0
    """
    opts = opts or SolverOptions()
    x2 = validate_finite_number(x2, "x2")
    if x2 == 0.0:
        raise ProbeError("x2 must be nonzero")
    lambdas = [_check_parameter(lam, "lambda") for lam in lambdas]
    G = _model(MODEL_ENGEL)
    base = abs(x2)
    solved = _continued_solves(G, lambda lam: [0.0, x2, 0.0, lam], lambdas, opts)

    points = []
    for lam in lambdas:
        if lam == 0.0:
            points.append(ProbePoint(lam, base, base, 0.0, 0.0, True, base))
            continue
        value, ok = solved[lam]
        bound = engel_vertical_bound(x2, lam)
        points.append(ProbePoint(lam, value, base, (value - base) / abs(lam),
                                 (bound - base) / abs(lam), ok, bound))

    notes: List[str] = []
    verdict = _verdict(points, opts, notes)
    return ProbeReport(PROBE_ENGEL_VERTICAL, points, verdict, opts, notes)


def _horizontal_ladder(kind: str, G: ModelSystem, make_point, base: float,
                       values: Sequence[float], opts: SolverOptions,
                       check_symmetry: bool) -> ProbeReport:
    values = sorted((_check_parameter(v, "parameter", allow_zero=False) for v in values),
                    key=abs, reverse=True)
    points = []
    notes: List[str] = []
    asymmetric = False
    for v in values:
        value, ok = _solve(G, G.element(make_point(v)), opts)
        if check_symmetry:
            mirror, ok_mirror = _solve(G, G.element(make_point(-v)), opts)
            ok = ok and ok_mirror
            if abs(mirror - value) > combined_tolerance(value, opts) + combined_tolerance(mirror, opts):
                asymmetric = True
                notes.append(f"parameter {v:g}: mirrored value {mirror:.6f} differs from {value:.6f}")
        points.append(ProbePoint(abs(v), value, base, (value - base) / (v * v), converged=ok))

    increasing = _strictly_increasing(points, opts)
    if not increasing:
        notes.append("quotients do not increase strictly along the ladder")
    verdict = _verdict(points, opts, notes, extra_inconclusive=asymmetric or not increasing)
    return ProbeReport(kind, points, verdict, opts, notes,
                       summary={'increasing': increasing, 'symmetric': not asymmetric})


def engel_horizontal_probe(x2: float = 1.0, lambdas: Sequence[float] = DEFAULT_HORIZONTAL_LAMBDAS,
                           opts: Optional[SolverOptions] = None,
                           check_symmetry: bool = True) -> ProbeReport:
    """
    Quotients (d(lam, x2, 0, 0) - |x2|) / lam^2 for decreasing |lam|.

    Consistent iff the quotients increase strictly by more than the combined
    tolerance; with check_symmetry the mirrored point (-lam, x2, 0, 0) is
    solved as well and any asymmetry makes the verdict inconclusive.

    Raises:
        ProbeError: If x2 or some lam is zero
    """
    opts = opts or SolverOptions()
    x2 = validate_finite_number(x2, "x2")
    if x2 == 0.0:
        raise ProbeError("x2 must be nonzero")
    return _horizontal_ladder(PROBE_ENGEL_HORIZONTAL, _model(MODEL_ENGEL),
                              lambda lam: [lam, x2, 0.0, 0.0], abs(x2), lambdas, opts, check_symmetry)


def horizontal_semiconcavity_probe(G: StepTwoGroup, g: GroupElement,
                                   ys: Sequence[Sequence[float]],
                                   delta: float = DEFAULT_HORIZONTAL_DELTA,
                                   opts: Optional[SolverOptions] = None,
                                   check_uniformity: bool = False) -> ProbeReport:
    """
    Horizontal second differences at an abnormal endpoint of a free group.

    The displaced points are the right translates g . (+-y, 0).  The quotient
    is (d(g . (y, 0)) + d(g . (-y, 0)) - 2 d(g)) / |y|^2 and the report keeps
    the largest one.  With check_uniformity the max/min ratio of the nonzero
    quotients must stay below 1.5.

    Raises:
        NotFreeGroupError: If G is not free
        ProbeError: If g is not abnormal, d(g) is not 1, or |y| > delta
    """
    opts = opts or SolverOptions()
    if not isinstance(G, StepTwoGroup) or not G.is_free:
        raise NotFreeGroupError(f"{G.name} is not a free step-two group")
    delta = validate_finite_number(delta, "delta")
    abnormal, _ = abnormal_membership_free(G, g)
    if not abnormal:
        raise ProbeError(f"{g.coords().tolist()} is not the endpoint of an abnormal curve")
    ys = [validate_vector(y, G.m, "y") for y in ys]
    for y in ys:
        if np.linalg.norm(y) > delta:
            raise ProbeError(f"|y| = {np.linalg.norm(y):.4g} exceeds delta = {delta}")

    d0, ok0 = _solve(G, g, opts)
    if abs(d0 - 1.0) > UNIT_BASE_TOLERANCE:
        raise ProbeError(f"the base point must be at distance 1, got {d0:.6f}")

    points = []
    for y in ys:
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            points.append(ProbePoint(0.0, d0, d0, 0.0, converged=ok0))
            continue
        plus, ok_plus = _solve(G, G.multiply(g, GroupElement(y, np.zeros(G.ell))), opts)
        minus, ok_minus = _solve(G, G.multiply(g, GroupElement(-y, np.zeros(G.ell))), opts)
        points.append(ProbePoint(norm, 0.5 * (plus + minus), d0, (plus + minus - 2.0 * d0) / (norm * norm),
                                 converged=ok0 and ok_plus and ok_minus))

    notes: List[str] = []
    uneven = False
    magnitudes = [abs(p.quotient) for p in points if p.parameter > 0.0]
    ratio = None
    if check_uniformity and len(magnitudes) > 1:
        ratio = max(magnitudes) / min(magnitudes) if min(magnitudes) > 0.0 else float('inf')
        if ratio >= UNIFORMITY_RATIO:
            uneven = True
            notes.append(f"quotients vary by a factor {ratio:.3g} across directions")
    verdict = _verdict(points, opts, notes, extra_inconclusive=uneven)
    return ProbeReport(PROBE_HORIZONTAL, points, verdict, opts, notes,
                       summary={'max_quotient': max(p.quotient for p in points), 'uniformity_ratio': ratio})


def martinet_vertical_probe(zs: Sequence[float] = DEFAULT_ENGEL_VERTICAL_LAMBDAS,
                            opts: Optional[SolverOptions] = None) -> ProbeReport:
    """
    Quotients (d(1, 0, z) - 1) / |z| along the Martinet abnormal line.

    The Engel bound with x2 = 1 carries over to the projection, giving the
    lower-bound column (2 sqrt(1/4 + |z|) - 1) / |z|.
    """
    opts = opts or SolverOptions()
    zs = [_check_parameter(z, "z") for z in zs]
    G = _model(MODEL_MARTINET)
    solved = _continued_solves(G, lambda z: [1.0, 0.0, z], zs, opts)
    points = []
    for z in zs:
        if z == 0.0:
            points.append(ProbePoint(z, 1.0, 1.0, 0.0, 0.0, True, 1.0))
            continue
        value, ok = solved[z]
        bound = engel_vertical_bound(1.0, z)
        points.append(ProbePoint(z, value, 1.0, (value - 1.0) / abs(z), (bound - 1.0) / abs(z), ok, bound))
    notes: List[str] = []
    verdict = _verdict(points, opts, notes)
    return ProbeReport(PROBE_MARTINET_VERTICAL, points, verdict, opts, notes)


def martinet_horizontal_probe(ys: Sequence[float] = DEFAULT_HORIZONTAL_LAMBDAS,
                              opts: Optional[SolverOptions] = None,
                              check_symmetry: bool = True) -> ProbeReport:
    """Quotients (d(1, y, 0) - 1) / y^2 for decreasing |y|; consistent iff strictly increasing."""
    opts = opts or SolverOptions()
    return _horizontal_ladder(PROBE_MARTINET_HORIZONTAL, _model(MODEL_MARTINET),
                              lambda y: [1.0, y, 0.0], 1.0, ys, opts, check_symmetry)


def martinet_probes(values: Sequence[float], direction: str = "vertical",
                    opts: Optional[SolverOptions] = None) -> ProbeReport:
    """Run the Martinet probe along the abnormal line ("vertical") or across it ("horizontal")."""
    if direction == "vertical":
        return martinet_vertical_probe(values, opts)
    if direction == "horizontal":
        return martinet_horizontal_probe(values, opts)
    raise ProbeError(f"unknown Martinet probe direction '{direction}'")


def admissible_cusp_pair(G: StepTwoGroup) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unit (w, sigma) with (sigma A) w = 0, taken from the Métivier witness.

    Raises:
        OrthogonalityFails: If G is Métivier or the check is inconclusive
    """
    report = check_metivier(G)
    if report.is_metivier is not False or report.witness_sigma is None:
        raise OrthogonalityFails(f"{G.name} has no admissible cusp pair (Métivier: {report.verdict})")
    sigma = report.witness_sigma / np.linalg.norm(report.witness_sigma)
    kernel = linalg.null_space(G.sigma_matrix(sigma).entries, rcond=1e-8)
    w = kernel[:, 0]
    lead = np.flatnonzero(np.abs(w) > 1e-12)
    if lead.size and w[lead[0]] < 0:
        w = -w
    return w, sigma
