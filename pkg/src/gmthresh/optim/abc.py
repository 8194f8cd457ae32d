"""Artificial bee colony: employed, onlooker and (single) scout phases."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..mixture import SearchBounds
from .base import CountingObjective, OptimizerConfig, init_population, uniform_sample


@dataclass(frozen=True)
class ABCParams:
    """Colony split and abandonment limit.

    ``None`` fields resolve from the population size: half employed, the
    rest onlookers, limit = employed * D.
    """

    employed_count: Optional[int] = None
    onlooker_count: Optional[int] = None
    abandonment_limit: Optional[int] = None

    def resolve(self, population_size: int, dim: int) -> "ABCParams":
        employed = self.employed_count if self.employed_count is not None else population_size // 2
        onlooker = self.onlooker_count if self.onlooker_count is not None else population_size - employed
        if employed < 2:
            raise ValueError("ABC needs at least two food sources")
        if employed + onlooker != population_size:
            raise ValueError("employed_count + onlooker_count must equal population_size")
        limit = self.abandonment_limit if self.abandonment_limit is not None else employed * dim
        return ABCParams(employed, onlooker, limit)


@dataclass
class ColonyState:
    sources: np.ndarray
    fitness: np.ndarray
    counters: np.ndarray
    best: np.ndarray
    best_fitness: float
    scouts: int = 0  # scouts sent in the most recent step


def abc_fitness(f):
    """1 / (1 + f) for f >= 0, else 1 + |f|."""
    f = np.asarray(f, dtype=np.float64)
    out = np.where(f >= 0, 1.0 / (1.0 + np.abs(f)), 1.0 + np.abs(f))
    return out if out.ndim else float(out)


def selection_probabilities(fit) -> np.ndarray:
    fit = np.asarray(fit, dtype=np.float64)
    return fit / fit.sum()


def neighbor_value(x_ij: float, x_lj: float, phi: float) -> float:
    return x_ij + phi * (x_ij - x_lj)


def init_colony(objective: CountingObjective, bounds: SearchBounds, config: OptimizerConfig,
                params: ABCParams, rng) -> ColonyState:
    """Evaluate a full uniform population and keep the best ``employed_count`` as food sources."""
    pop, fit = init_population(objective, bounds, config, rng)
    keep = np.argsort(fit, kind="stable")[: params.employed_count]
    sources, fitness = pop[keep].copy(), fit[keep].copy()
    return ColonyState(sources, fitness, np.zeros(len(keep), dtype=np.int64),
                       sources[0].copy(), float(fitness[0]))


def _explore(state: ColonyState, i: int, objective: CountingObjective,
             bounds: SearchBounds, rng) -> None:
    """Neighbor move on source i, greedy acceptance, counter bookkeeping (in place).

    Draw order: dimension j, partner l, phi.
    """
    n, d = state.sources.shape
    j = int(rng.integers(0, d))
    l = int(rng.integers(0, n - 1))
    l += l >= i
    phi = rng.uniform(-1.0, 1.0)
    cand = state.sources[i].copy()
    cand[j] = neighbor_value(cand[j], state.sources[l, j], phi)
    cand[j] = min(max(cand[j], bounds.lower[j]), bounds.upper[j])
    f = objective.one(cand)
    if f < state.fitness[i]:
        state.sources[i] = cand
        state.fitness[i] = f
        state.counters[i] = 0
        if f < state.best_fitness:
            state.best = cand.copy()
            state.best_fitness = f
    else:
        state.counters[i] += 1


def abc_step(state: ColonyState, objective: CountingObjective, params: ABCParams,
             bounds: SearchBounds, rng) -> ColonyState:
    """One cycle: every employed bee, ``onlooker_count`` roulette picks, at most one scout.

    Returns a new state; the input is not modified.
    """
    st = ColonyState(state.sources.copy(), state.fitness.copy(), state.counters.copy(),
                     state.best.copy(), state.best_fitness)
    n = len(st.sources)
    for i in range(n):
        _explore(st, i, objective, bounds, rng)

    cum = np.cumsum(selection_probabilities(abc_fitness(st.fitness)))
    for _ in range(params.onlooker_count):
        i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        _explore(st, min(i, n - 1), objective, bounds, rng)

    worst = int(np.argmax(st.counters))
    if st.counters[worst] >= params.abandonment_limit:
        fresh = bounds.clip(uniform_sample(bounds, 1, rng)[0])
        f = objective.one(fresh)
        st.sources[worst] = fresh
        st.fitness[worst] = f
        st.counters[worst] = 0
        st.scouts = 1
        if f < st.best_fitness:
            st.best, st.best_fitness = fresh.copy(), f
    return st
