"""Run loop shared by the three optimizers."""
from __future__ import annotations

import time
from typing import Optional, Union

import numpy as np

from ..mixture import SearchBounds
from .abc import ABCParams, abc_step, init_colony
from .base import CountingObjective, Objective, OptimizerConfig, RunResult, init_population
from .de import DEParams, de_step
from .pso import PSOParams, init_swarm, pso_step

ALGORITHMS = ("DE", "PSO", "ABC")

Params = Union[DEParams, PSOParams, ABCParams]


def default_params(algorithm: str) -> Params:
    return {"DE": DEParams, "PSO": PSOParams, "ABC": ABCParams}[algorithm.upper()]()


def run(algorithm: str, objective: Objective, bounds: SearchBounds,
        config: OptimizerConfig = OptimizerConfig(), params: Optional[Params] = None,
        rng=None) -> RunResult:
    """Minimize ``objective`` over ``bounds``.

    Iterates until ``config.max_iterations`` steps have run or the best
    fitness drops to ``config.distance_stop`` or below.  ``rng`` defaults to
    a PCG64 generator seeded with ``config.rng_seed``.
    """
    algorithm = algorithm.upper()
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    params = params if params is not None else default_params(algorithm)
    rng = rng if rng is not None else np.random.default_rng(config.rng_seed)
    f = CountingObjective(objective)
    stop = config.distance_stop

    t0 = time.perf_counter()
    if algorithm == "DE":
        pop, fit = init_population(f, bounds, config, rng)
        best = lambda: float(fit.min())  # noqa: E731
    elif algorithm == "PSO":
        state = init_swarm(f, bounds, config, params, rng)
        best = lambda: state.gbest_fitness  # noqa: E731
    else:
        params = params.resolve(config.population_size, bounds.dim)
        state = init_colony(f, bounds, config, params, rng)
        best = lambda: state.best_fitness  # noqa: E731

    trace, evals = [best()], [f.evaluations]
    k = 0
    scouts = 0
    while k < config.max_iterations and not (stop is not None and trace[-1] <= stop):
        if algorithm == "DE":
            pop, fit = de_step(pop, fit, f, params, bounds, rng)
        elif algorithm == "PSO":
            state = pso_step(state, f, params, k, config, bounds, rng)
        else:
            state = abc_step(state, f, params, bounds, rng)
            scouts += state.scouts
        k += 1
        trace.append(best())
        evals.append(f.evaluations)
    wall = time.perf_counter() - t0

    if algorithm == "DE":
        i = int(np.argmin(fit))
        position, value = pop[i].copy(), float(fit[i])
    elif algorithm == "PSO":
        position, value = state.gbest.copy(), state.gbest_fitness
    else:
        position, value = state.best.copy(), state.best_fitness
    return RunResult(position, value, k, f.evaluations, wall, trace, evals, scouts)
