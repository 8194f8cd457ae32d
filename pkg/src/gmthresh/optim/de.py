"""Differential evolution, best/1/bin."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..mixture import SearchBounds
from .base import CountingObjective


@dataclass(frozen=True)
class DEParams:
    mutation_factor: float = 0.25
    crossover_rate: float = 0.8

    def __post_init__(self):
        if self.mutation_factor < 0:
            raise ValueError("mutation_factor must be >= 0")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")


def draw_donors(n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Two donor indices per member with r1 != r2 and neither equal to the member."""
    i = np.arange(n)
    r1 = rng.integers(0, n - 1, size=n)
    r1 = r1 + (r1 >= i)
    r2 = rng.integers(0, n - 2, size=n)
    lo = np.minimum(i, r1)
    hi = np.maximum(i, r1)
    r2 = r2 + (r2 >= lo)
    r2 = r2 + (r2 >= hi)
    return r1, r2


def de_step(pop: np.ndarray, fitness: np.ndarray, objective: CountingObjective,
            params: DEParams, bounds: SearchBounds, rng) -> tuple[np.ndarray, np.ndarray]:
    """One generation: mutation around the current best, binomial crossover,
    strict greedy selection.  Costs exactly ``len(pop)`` evaluations.

    Draw order: r1 (n), r2 (n), crossover uniforms (n, D), j_rand (n).
    """
    n, d = pop.shape
    best = pop[int(np.argmin(fitness))]
    r1, r2 = draw_donors(n, rng)
    mutant = best + params.mutation_factor * (pop[r1] - pop[r2])

    cross = rng.random((n, d)) <= params.crossover_rate
    j_rand = rng.integers(0, d, size=n)
    cross[np.arange(n), j_rand] = True
    trial = bounds.clip(np.where(cross, mutant, pop))

    trial_fit = objective(trial)
    better = trial_fit < fitness
    new_pop = np.where(better[:, None], trial, pop)
    new_fit = np.where(better, trial_fit, fitness)
    return new_pop, new_fit
