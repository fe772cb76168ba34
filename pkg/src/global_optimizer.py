"""
Brute-force distance oracle.

Random search over coarse piecewise-constant controls followed by Powell
(coordinate direction) refinement of a quadratic-penalty objective.  It
shares no code path with the augmented Lagrangian solver beyond the
endpoint map, so it serves as an independent cross-check.
"""

import logging
from typing import List

import numpy as np
from scipy import optimize

try:
    from .constants import (
        DEFAULT_SEED, ORACLE_DEFAULT_BUDGET, ORACLE_MAX_STEPS, ORACLE_MIN_STEP,
        ORACLE_PENALTY, ORACLE_SAMPLE_FRACTION
    )
    from .groups import CarnotStructure, GroupElement
    from .optimizer import ControlOptimizer, SolverOptions
    from .validation import ValidationError, validate_positive_int
except (ImportError, ValueError):
    from constants import (
        DEFAULT_SEED, ORACLE_DEFAULT_BUDGET, ORACLE_MAX_STEPS, ORACLE_MIN_STEP,
        ORACLE_PENALTY, ORACLE_SAMPLE_FRACTION
    )
    from groups import CarnotStructure, GroupElement
    from optimizer import ControlOptimizer, SolverOptions
    from validation import ValidationError, validate_positive_int

logger = logging.getLogger(__name__)

# Local refinements are started from this many of the best samples
REFINE_STARTS = 4


class BruteForceOptimizer(ControlOptimizer):
    """
    Extends ControlOptimizer with a derivative-free penalized search.
    """

    def __init__(self, group: CarnotStructure, target: GroupElement,
                 n_steps: int = ORACLE_MAX_STEPS, seed: int = DEFAULT_SEED,
                 penalty: float = ORACLE_PENALTY):
        n_steps = validate_positive_int(n_steps, "n_steps")
        if n_steps > ORACLE_MAX_STEPS:
            raise ValidationError(f"the oracle works on at most {ORACLE_MAX_STEPS} steps, got {n_steps}")
        super().__init__(group, target, SolverOptions(n_steps=n_steps, n_starts=1, rng_seed=seed))
        self.penalty = penalty
        self.evaluations = 0

    def penalized_length(self, flat: np.ndarray) -> float:
        """L2 length plus penalty times the squared endpoint residual."""
        self.evaluations += 1
        c = self.constraint(flat)
        return float(np.sqrt(self.energy(flat)) + self.penalty * c @ c)

    def optimize_random_search(self, n_samples: int) -> List[np.ndarray]:
        """
        Evaluate the straight-line control and seeded random perturbations of it.

        Returns:
            Samples sorted from best to worst penalized length
        """
        straight = np.tile(self.target_coords[:self.m], self.n_steps)
        scale = np.sqrt(float(np.linalg.norm(self.target_coords))) + float(np.linalg.norm(straight[:self.m]))
        rng = np.random.default_rng(self.options.rng_seed)

        samples = [straight]
        for _ in range(max(0, n_samples - 1)):
            spread = scale * rng.uniform(0.1, 2.0)
            samples.append(straight + spread * rng.standard_normal(straight.shape[0]))
        merits = [self.penalized_length(s) for s in samples]
        order = np.argsort(merits, kind='stable')
        return [samples[i] for i in order]

    def optimize_coordinate_refinement(self, start: np.ndarray, max_evaluations: int):
        """Powell refinement (successive line searches along coordinate directions)."""
        return optimize.minimize(
            self.penalized_length, start, method='Powell',
            options={'maxfev': max_evaluations, 'xtol': ORACLE_MIN_STEP, 'ftol': 1e-12},
        )

    def search(self, budget: int) -> float:
        budget = validate_positive_int(budget, "budget", minimum=REFINE_STARTS + 1)
        if self.target.is_identity():
            return 0.0
        n_samples = max(1, int(ORACLE_SAMPLE_FRACTION * budget))
        ranked = self.optimize_random_search(n_samples)
        best = self.penalized_length(ranked[0])

        per_start = max(1, (budget - n_samples) // REFINE_STARTS)
        for start in ranked[:REFINE_STARTS]:
            result = self.optimize_coordinate_refinement(start, per_start)
            best = min(best, float(result.fun))

        logger.info("Oracle on %s: penalized length %.6f after %d evaluations",
                    self.group.name, best, self.evaluations)
        return best


def oracle_bruteforce(G: CarnotStructure, target: GroupElement,
                      budget: int = ORACLE_DEFAULT_BUDGET,
                      n_steps: int = ORACLE_MAX_STEPS,
                      seed: int = DEFAULT_SEED) -> float:
    """
    Best penalized length found by random search and coordinate refinement.

    Args:
        G: Carnot structure
        target: Target point
        budget: Total number of objective evaluations (approximate)
        n_steps: Coarse grid size, at most 8
        seed: Random seed

    Returns:
        Penalized length; a consistency bound, not a certified distance
    """
    return BruteForceOptimizer(G, target, n_steps=n_steps, seed=seed).search(budget)
