from .abc import ABCParams, ColonyState, abc_fitness, abc_step, init_colony, neighbor_value, selection_probabilities
from .base import CountingObjective, OptimizerConfig, RunResult, init_population, uniform_sample
from .de import DEParams, de_step, draw_donors
from .pso import PSOParams, SwarmState, constriction, init_swarm, pso_step, velocity_limit
from .runner import ALGORITHMS, default_params, run

__all__ = [
    "ABCParams", "ColonyState", "abc_fitness", "abc_step", "init_colony", "neighbor_value",
    "selection_probabilities", "CountingObjective", "OptimizerConfig", "RunResult",
    "init_population", "uniform_sample", "DEParams", "de_step", "draw_donors", "PSOParams",
    "SwarmState", "constriction", "init_swarm", "pso_step", "velocity_limit", "ALGORITHMS",
    "default_params", "run",
]
