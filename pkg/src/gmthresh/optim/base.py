"""Shared optimizer plumbing: configuration, evaluation accounting, results."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..mixture import SearchBounds

Objective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OptimizerConfig:
    population_size: int = 90
    max_iterations: int = 200
    distance_stop: Optional[float] = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 4:
            raise ValueError("population_size must be >= 4")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


class CountingObjective:
    """Wraps a batch objective and counts one evaluation per candidate row."""

    def __init__(self, objective: Objective):
        self.objective = objective
        self.evaluations = 0

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        self.evaluations += X.shape[0]
        return np.asarray(self.objective(X), dtype=np.float64).reshape(X.shape[0])

    def one(self, x: np.ndarray) -> float:
        return float(self(x[None, :])[0])


@dataclass
class RunResult:
    best_position: np.ndarray
    best_fitness: float
    iterations_used: int
    evaluations_used: int
    wall_time: float
    # index 0 is the initialized population, index k the state after iteration k
    fitness_trace: list = field(default_factory=list)
    evaluation_trace: list = field(default_factory=list)
    scouts: int = 0  # ABC only

    def write_trace_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,best_fitness,evaluations\n")
            for k, (f, n) in enumerate(zip(self.fitness_trace, self.evaluation_trace)):
                fh.write(f"{k},{float(f)!r},{n}\n")


def uniform_sample(bounds: SearchBounds, n: int, rng) -> np.ndarray:
    """n points x_low + rand() * (x_high - x_low), drawn as one (n, D) block."""
    return bounds.lower + rng.random((n, bounds.dim)) * bounds.span


def init_population(objective: CountingObjective, bounds: SearchBounds,
                    config: OptimizerConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random population of ``config.population_size`` members, each evaluated once."""
    pop = bounds.clip(uniform_sample(bounds, config.population_size, rng))
    return pop, objective(pop)
