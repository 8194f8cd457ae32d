"""Particle swarm with an exponentially decaying constriction factor."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..mixture import SearchBounds
from .base import CountingObjective, OptimizerConfig, init_population


@dataclass(frozen=True)
class PSOParams:
    omega0: float = 3.0
    rho: float = 4.6
    c1: float = 2.0
    c2: float = 2.0
    velocity_fraction: float = 0.25

    def __post_init__(self):
        if min(self.omega0, self.rho, self.c1, self.c2) <= 0:
            raise ValueError("PSO parameters must be positive")
        if not 0.0 < self.velocity_fraction <= 1.0:
            raise ValueError("velocity_fraction must lie in (0, 1]")


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    fitness: np.ndarray
    pbest: np.ndarray
    pbest_fitness: np.ndarray
    gbest: np.ndarray
    gbest_fitness: float


def constriction(k: int, params: PSOParams, max_iterations: int) -> float:
    """omega_k = omega_0 * exp(-rho * k / N_max)."""
    return params.omega0 * math.exp(-params.rho * k / max_iterations)


def velocity_limit(bounds: SearchBounds, params: PSOParams) -> np.ndarray:
    return params.velocity_fraction * bounds.span


def init_swarm(objective: CountingObjective, bounds: SearchBounds, config: OptimizerConfig,
               params: PSOParams, rng) -> SwarmState:
    """Positions first, then velocities uniform in [-vmax, vmax]."""
    pos, fit = init_population(objective, bounds, config, rng)
    vmax = velocity_limit(bounds, params)
    vel = -vmax + rng.random(pos.shape) * (2.0 * vmax)
    g = int(np.argmin(fit))
    return SwarmState(pos, vel, fit, pos.copy(), fit.copy(), pos[g].copy(), float(fit[g]))


def pso_step(state: SwarmState, objective: CountingObjective, params: PSOParams, k: int,
             config: OptimizerConfig, bounds: SearchBounds, rng) -> SwarmState:
    """Move every particle once using omega_k; costs one evaluation per particle.

    The constriction multiplies the whole bracket (previous velocity plus
    cognitive and social pulls).  Draw order: cognitive uniforms (n, D),
    social uniforms (n, D).
    """
    x = state.positions
    w = constriction(k, params, config.max_iterations)
    u1 = rng.random(x.shape)
    u2 = rng.random(x.shape)
    vel = w * (state.velocities
               + params.c1 * u1 * (state.pbest - x)
               + params.c2 * u2 * (state.gbest - x))
    vmax = velocity_limit(bounds, params)
    vel = np.clip(vel, -vmax, vmax)
    pos = bounds.clip(x + vel)
    fit = objective(pos)

    improved = fit < state.pbest_fitness
    pbest = np.where(improved[:, None], pos, state.pbest)
    pbest_fit = np.where(improved, fit, state.pbest_fitness)
    g = int(np.argmin(pbest_fit))
    if pbest_fit[g] < state.gbest_fitness:
        gbest, gbest_fit = pbest[g].copy(), float(pbest_fit[g])
    else:
        gbest, gbest_fit = state.gbest, state.gbest_fitness
    return replace(state, positions=pos, velocities=vel, fitness=fit, pbest=pbest,
                   pbest_fitness=pbest_fit, gbest=gbest, gbest_fitness=gbest_fit)
