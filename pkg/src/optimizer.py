#!/usr/bin/env python3
"""
Control Optimization Engine
Minimize the L2 energy of a piecewise-constant control subject to an exact
endpoint constraint, by an augmented Lagrangian method with analytic
Jacobians and seeded multistart.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import linalg, optimize

try:
    from .constants import (
        DEFAULT_N_STEPS, DEFAULT_N_STARTS, DEFAULT_SEED, DEFAULT_FEAS_TOL,
        DEFAULT_GRAD_TOL, DEFAULT_MAX_OUTER, DEFAULT_PENALTY_GROWTH,
        DEFAULT_INITIAL_PENALTY, DEFAULT_MAX_INNER_ITER, DEFAULT_N_WORKERS,
        MAX_PENALTY, PENALTY_DECREASE_FACTOR, INNER_FTOL,
        START_MAX_MODE, START_MIN_RADIUS, START_NOISE_FRACTION, RESTORATION_MAX_NFEV,
        METHOD_DIRECT, METHOD_IDENTITY
    )
    from .controls import Control, endpoint_coords, jacobian_matrix
    from .groups import CarnotStructure, GroupElement
    from .validation import ValidationError, validate_positive_int, validate_positive_number
except ImportError:
    from constants import (
        DEFAULT_N_STEPS, DEFAULT_N_STARTS, DEFAULT_SEED, DEFAULT_FEAS_TOL,
        DEFAULT_GRAD_TOL, DEFAULT_MAX_OUTER, DEFAULT_PENALTY_GROWTH,
        DEFAULT_INITIAL_PENALTY, DEFAULT_MAX_INNER_ITER, DEFAULT_N_WORKERS,
        MAX_PENALTY, PENALTY_DECREASE_FACTOR, INNER_FTOL,
        START_MAX_MODE, START_MIN_RADIUS, START_NOISE_FRACTION, RESTORATION_MAX_NFEV,
        METHOD_DIRECT, METHOD_IDENTITY
    )
    from controls import Control, endpoint_coords, jacobian_matrix
    from groups import CarnotStructure, GroupElement
    from validation import ValidationError, validate_positive_int, validate_positive_number

logger = logging.getLogger(__name__)


@dataclass
class SolverOptions:
    """Settings shared by the distance solvers"""
    n_steps: int = DEFAULT_N_STEPS
    n_starts: int = DEFAULT_N_STARTS
    rng_seed: int = DEFAULT_SEED
    feas_tol: float = DEFAULT_FEAS_TOL
    grad_tol: float = DEFAULT_GRAD_TOL
    max_outer: int = DEFAULT_MAX_OUTER
    penalty_growth: float = DEFAULT_PENALTY_GROWTH
    initial_penalty: float = DEFAULT_INITIAL_PENALTY
    max_inner_iter: int = DEFAULT_MAX_INNER_ITER
    n_workers: int = DEFAULT_N_WORKERS

    def __post_init__(self):
        self.n_steps = validate_positive_int(self.n_steps, "n_steps")
        self.n_starts = validate_positive_int(self.n_starts, "n_starts")
        self.rng_seed = validate_positive_int(self.rng_seed, "rng_seed", minimum=0)
        self.feas_tol = validate_positive_number(self.feas_tol, "feas_tol")
        self.grad_tol = validate_positive_number(self.grad_tol, "grad_tol")
        self.max_outer = validate_positive_int(self.max_outer, "max_outer")
        self.penalty_growth = validate_positive_number(self.penalty_growth, "penalty_growth")
        if self.penalty_growth <= 1.0:
            raise ValidationError(f"penalty_growth must be greater than 1, got {self.penalty_growth}")
        self.initial_penalty = validate_positive_number(self.initial_penalty, "initial_penalty")
        self.max_inner_iter = validate_positive_int(self.max_inner_iter, "max_inner_iter")
        self.n_workers = validate_positive_int(self.n_workers, "n_workers")

    def with_changes(self, **changes) -> 'SolverOptions':
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_steps': self.n_steps,
            'n_starts': self.n_starts,
            'rng_seed': self.rng_seed,
            'feas_tol': self.feas_tol,
            'grad_tol': self.grad_tol,
            'max_outer': self.max_outer,
            'penalty_growth': self.penalty_growth,
            'initial_penalty': self.initial_penalty,
            'max_inner_iter': self.max_inner_iter,
            'n_workers': self.n_workers,
        }


@dataclass
class DistanceResult:
    """
    Best feasible control found for a target.

    ``value`` is the L2 length of ``control`` and so an upper bound on the
    distance whenever ``converged`` holds.
    """
    value: float
    control: Control
    residual: float
    method: str
    n_starts: int
    converged: bool
    seed: Optional[int] = None
    target: Optional[GroupElement] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': self.value,
            'residual': self.residual,
            'method': self.method,
            'n_starts': self.n_starts,
            'seed': self.seed,
            'converged': self.converged,
            'target': None if self.target is None else self.target.coords().tolist(),
            'n_steps': self.control.n_steps,
            'diagnostics': dict(self.diagnostics),
        }


@dataclass
class StartOutcome:
    """Result of one augmented Lagrangian run"""
    index: int
    flat: np.ndarray
    value: float
    residual: float
    converged: bool
    outer_iterations: int
    penalty: float


class ControlOptimizer:
    """Minimum-energy control reaching a target point"""

    def __init__(self, group: CarnotStructure, target: GroupElement,
                 options: Optional[SolverOptions] = None):
        group.check_element(target)
        self.group = group
        self.target = target
        self.target_coords = target.coords()
        self.options = options or SolverOptions()
        self.n_steps = self.options.n_steps
        self.m = group.m
        self.h = 1.0 / self.n_steps

    def constraint(self, flat: np.ndarray) -> np.ndarray:
        """Endpoint minus target."""
        return endpoint_coords(self.group, flat.reshape(self.n_steps, self.m)) - self.target_coords

    def residual(self, flat: np.ndarray) -> float:
        return float(np.linalg.norm(self.constraint(flat)))

    def energy(self, flat: np.ndarray) -> float:
        """Squared L2 norm of the control."""
        return float(self.h * flat @ flat)

    def lagrangian(self, flat: np.ndarray, multipliers: np.ndarray, penalty: float):
        """
        Augmented Lagrangian value and gradient.

        L = |u|^2 - mu.c + penalty/2 |c|^2 with c the endpoint constraint.
        """
        values = flat.reshape(self.n_steps, self.m)
        c = endpoint_coords(self.group, values) - self.target_coords
        jac = jacobian_matrix(self.group, values)
        value = self.h * flat @ flat - multipliers @ c + 0.5 * penalty * c @ c
        grad = 2.0 * self.h * flat + jac.T @ (penalty * c - multipliers)
        return float(value), grad

    def constraint_jacobian(self, flat: np.ndarray) -> np.ndarray:
        return jacobian_matrix(self.group, flat.reshape(self.n_steps, self.m))

    def restore(self, flat: np.ndarray) -> np.ndarray:
        """
        Pull a start onto the endpoint constraint by trust-region Gauss-Newton.

        Returns the input unchanged when it is already feasible or when the
        least-squares run does not lower the residual.  At abnormal controls
        some constraint rows of the Jacobian vanish and the residual along
        them cannot be reduced here.
        """
        before = self.residual(flat)
        if before <= self.options.feas_tol:
            return flat
        try:
            fit = optimize.least_squares(self.constraint, flat, jac=self.constraint_jacobian,
                                         method='trf', max_nfev=RESTORATION_MAX_NFEV)
        except (ValueError, np.linalg.LinAlgError) as e:
            logger.debug("Restoration failed: %s", e)
            return flat
        return fit.x if self.residual(fit.x) < before else flat

    def multiplier_estimate(self, flat: np.ndarray) -> np.ndarray:
        """Least-squares multipliers of the stationarity condition 2 h u = J^T mu."""
        jac = self.constraint_jacobian(flat)
        multipliers, _, _, _ = linalg.lstsq(jac.T, 2.0 * self.h * flat)
        return multipliers

    def optimize_augmented_lagrangian(self, start: np.ndarray, index: int = 0) -> StartOutcome:
        """
        Run the outer multiplier loop from one initial control.

        The start is first restored onto the constraint and the multipliers
        initialized from the stationarity condition there.  Each round then
        minimizes the augmented Lagrangian with L-BFGS-B, updates the
        multipliers, and raises the penalty when the constraint violation
        did not shrink by the decrease factor.
        """
        opts = self.options
        flat = self.restore(np.array(start, dtype=float).reshape(-1))
        multipliers = self.multiplier_estimate(flat)
        penalty = opts.initial_penalty
        previous = np.inf
        violation = self.residual(flat)
        rounds = 0

        for rounds in range(1, opts.max_outer + 1):
            result = optimize.minimize(
                self.lagrangian, flat, args=(multipliers, penalty), jac=True,
                method='L-BFGS-B',
                options={'gtol': opts.grad_tol, 'ftol': INNER_FTOL, 'maxiter': opts.max_inner_iter},
            )
            flat = result.x
            c = self.constraint(flat)
            violation = float(np.linalg.norm(c))
            if violation <= opts.feas_tol:
                break
            multipliers = multipliers - penalty * c
            if violation > PENALTY_DECREASE_FACTOR * previous:
                penalty = min(penalty * opts.penalty_growth, MAX_PENALTY)
            previous = violation

        converged = violation <= opts.feas_tol
        value = float(np.sqrt(self.energy(flat)))
        logger.debug("Start %d: value %.8f residual %.2e after %d rounds (penalty %.1e)",
                     index, value, violation, rounds, penalty)
        return StartOutcome(index=index, flat=flat, value=value, residual=violation,
                            converged=converged, outer_iterations=rounds, penalty=penalty)

    def fourier_mode(self, frequency: int, directions: np.ndarray, radius: float) -> np.ndarray:
        """
        Cell averages of r (cos(2 pi k s) a + sin(2 pi k s) b), r = 2 pi k radius.

        The horizontal trajectory of this control is a closed loop of the
        given radius, traversed k times, in the plane of the unit vectors a, b.
        """
        a, b = (d / (np.linalg.norm(d) or 1.0) for d in directions)
        omega = 2.0 * np.pi * frequency
        phase = omega * np.linspace(0.0, 1.0, self.n_steps + 1)
        cos_avg = np.diff(np.sin(phase)) / (omega * self.h)
        sin_avg = -np.diff(np.cos(phase)) / (omega * self.h)
        return omega * radius * (np.outer(cos_avg, a) + np.outer(sin_avg, b))

    def initial_controls(self) -> List[np.ndarray]:
        """
        Seeded starting controls.

        Start 0 is the constant control hitting the x-part of the target.
        Odd starts add one Fourier mode in a random plane plus light noise,
        so that they stay off the abnormal controls where some constraint
        gradients vanish; even starts add Gaussian noise of scale |target|.
        """
        opts = self.options
        straight = np.tile(self.target_coords[:self.m], (self.n_steps, 1))
        scale = float(np.linalg.norm(self.target_coords)) or 1.0
        vertical = float(np.linalg.norm(self.target_coords[self.m:]))
        radius = max(float(np.sqrt(vertical)), START_MIN_RADIUS * scale)
        rng = np.random.default_rng(opts.rng_seed)
        starts = [straight.reshape(-1)]
        for i in range(1, opts.n_starts):
            noise = rng.standard_normal((self.n_steps, self.m))
            if i % 2:
                frequency = 1 + (i // 2) % START_MAX_MODE
                loop = self.fourier_mode(frequency, rng.standard_normal((2, self.m)), radius)
                start = straight + loop + START_NOISE_FRACTION * scale * noise
            else:
                start = straight + scale * noise
            starts.append(start.reshape(-1))
        return starts

    def _run_starts(self, starts: List[np.ndarray]) -> List[StartOutcome]:
        if self.options.n_workers > 1 and len(starts) > 1:
            jobs = [(self.group, self.target, self.options, start, index)
                    for index, start in enumerate(starts)]
            with ProcessPoolExecutor(max_workers=self.options.n_workers) as executor:
                return list(executor.map(_run_start, jobs))
        return [self.optimize_augmented_lagrangian(start, index) for index, start in enumerate(starts)]

    def _identity_result(self) -> DistanceResult:
        return DistanceResult(
            value=0.0, control=Control.zeros(self.n_steps, self.m), residual=0.0,
            method=METHOD_IDENTITY, n_starts=0, converged=True,
            seed=self.options.rng_seed, target=self.target,
        )

    def _reduce(self, outcomes: List[StartOutcome], method: str) -> DistanceResult:
        """Best converged run by (value, start index); else the smallest residual."""
        feasible = [o for o in outcomes if o.converged]
        if feasible:
            best = min(feasible, key=lambda o: (o.value, o.index))
        else:
            best = min(outcomes, key=lambda o: (o.residual, o.value, o.index))
            logger.warning("No start reached the feasibility tolerance %.1e (best residual %.2e)",
                           self.options.feas_tol, best.residual)
        return DistanceResult(
            value=best.value,
            control=Control.from_flat(best.flat, self.n_steps, self.m),
            residual=best.residual,
            method=method,
            n_starts=len(outcomes),
            converged=best.converged,
            seed=self.options.rng_seed,
            target=self.target,
            diagnostics={
                'best_start': best.index,
                'outer_iterations': best.outer_iterations,
                'final_penalty': best.penalty,
                'converged_starts': len(feasible),
            },
        )

    def optimize(self, method: str = METHOD_DIRECT) -> DistanceResult:
        """Multistart augmented Lagrangian solve."""
        if self.target.is_identity():
            return self._identity_result()
        outcomes = self._run_starts(self.initial_controls())
        result = self._reduce(outcomes, method)
        logger.info("%s on %s: value %.6f residual %.2e (%d/%d starts feasible)",
                    method, self.group.name, result.value, result.residual,
                    result.diagnostics['converged_starts'], len(outcomes))
        return result

    def polish(self, control: Control, method: str = METHOD_DIRECT) -> DistanceResult:
        """Single augmented Lagrangian run warm-started from a given control."""
        if control.n_steps != self.n_steps or control.m != self.m:
            raise ValidationError(
                f"warm start must have {self.n_steps} steps and {self.m} components, "
                f"got {control.n_steps} and {control.m}"
            )
        if self.target.is_identity():
            return self._identity_result()
        outcome = self.optimize_augmented_lagrangian(control.flat(), 0)
        return self._reduce([outcome], method)


def _run_start(job) -> StartOutcome:
    """Worker entry point for the process pool."""
    group, target, options, start, index = job
    return ControlOptimizer(group, target, options).optimize_augmented_lagrangian(start, index)
