"""Gaussian mixture model of a gray-level histogram and its Hellinger fitness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .histogram import LEVELS, Histogram

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class MixtureCandidate:
    """K-component mixture; flat layout is [P_1..P_K, mu_1..mu_K, sigma_1..sigma_K]."""

    priors: np.ndarray
    means: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        arrs = [np.array(a, dtype=np.float64).reshape(-1) for a in (self.priors, self.means, self.sigmas)]
        if not (arrs[0].size == arrs[1].size == arrs[2].size):
            raise ValueError("priors, means and sigmas must have equal length")
        for name, a in zip(("priors", "means", "sigmas"), arrs):
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} must be finite")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_vector(cls, vector) -> "MixtureCandidate":
        v = np.asarray(vector, dtype=np.float64)
        if v.ndim != 1 or v.size % 3:
            raise ValueError(f"vector length must be a multiple of 3, got {v.shape}")
        k = v.size // 3
        return cls(v[:k], v[k : 2 * k], v[2 * k :])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.priors, self.means, self.sigmas])

    @property
    def k(self) -> int:
        return self.priors.size

    def component(self, i: int) -> tuple[float, float, float]:
        return float(self.priors[i]), float(self.means[i]), float(self.sigmas[i])


@dataclass(frozen=True)
class SearchBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.array(self.lower, dtype=np.float64).reshape(-1)
        hi = np.array(self.upper, dtype=np.float64).reshape(-1)
        if lo.shape != hi.shape:
            raise ValueError("lower and upper must have the same length")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class ObjectiveConfig:
    penalty_weight: float = 3.0
    sigma_min: float = 1e-2

    def __post_init__(self):
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be >= 0")
        if self.sigma_min <= 0:
            raise ValueError("sigma_min must be > 0")


def default_bounds(k: int = 3, levels: int = LEVELS) -> SearchBounds:
    """Priors in [0, 0.5], means in [0, L-1], deviations in [0, (L-1)/2]."""
    top = levels - 1
    upper = np.concatenate([np.full(k, 0.5), np.full(k, float(top)), np.full(k, top / 2.0)])
    return SearchBounds(np.zeros(3 * k), upper)


def effective_bounds(bounds: SearchBounds, cfg: ObjectiveConfig) -> SearchBounds:
    """Bounds with every sigma coordinate's lower limit raised to ``cfg.sigma_min``.

    Projecting onto these bounds is the same map as :func:`clamp_to_bounds`.
    """
    k = bounds.dim // 3
    lo = bounds.lower.copy()
    hi = bounds.upper.copy()
    lo[2 * k :] = np.maximum(lo[2 * k :], cfg.sigma_min)
    hi[2 * k :] = np.maximum(hi[2 * k :], cfg.sigma_min)
    return SearchBounds(lo, hi)


def clamp_to_bounds(candidate: MixtureCandidate, bounds: SearchBounds,
                    cfg: ObjectiveConfig = ObjectiveConfig()) -> MixtureCandidate:
    v = bounds.clip(candidate.to_vector())
    k = candidate.k
    v[2 * k :] = np.maximum(v[2 * k :], cfg.sigma_min)
    return MixtureCandidate.from_vector(v)


def mixture_pdf(candidate: MixtureCandidate, x):
    """Evaluate sum_i P_i / (sqrt(2 pi) sigma_i) * exp(-(x - mu_i)^2 / (2 sigma_i^2))."""
    x = np.asarray(x, dtype=np.float64)
    p = candidate.priors[:, None]
    mu = candidate.means[:, None]
    s = candidate.sigmas[:, None]
    xs = x.reshape(1, -1)
    vals = (p / (_SQRT_2PI * s) * np.exp(-((xs - mu) ** 2) / (2.0 * s * s))).sum(axis=0)
    return vals.reshape(x.shape) if x.ndim else float(vals[0])


def _batch_pdf(X: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Mixture densities for a batch of flat vectors; returns (n, len(grid))."""
    k = X.shape[1] // 3
    p = X[:, :k, None]
    mu = X[:, k : 2 * k, None]
    s = X[:, 2 * k :, None]
    z = (grid[None, None, :] - mu) / s
    return (p / (_SQRT_2PI * s) * np.exp(-0.5 * z * z)).sum(axis=1)


class MixtureObjective:
    """Penalized Hellinger fitness of flat mixture vectors against one histogram.

    Calling the object on an (n, 3K) array returns n fitness values,
    E + w * |1 - sum(P)|.  Vectors are expected to be inside the effective
    bounds already (the optimizers project before evaluating).
    """

    def __init__(self, hist: Histogram, k: int = 3, cfg: ObjectiveConfig = ObjectiveConfig()):
        self.hist = hist
        self.k = k
        self.cfg = cfg
        self.grid = np.arange(hist.levels, dtype=np.float64)
        self._sqrt_h = np.sqrt(hist.bins)

    @property
    def dim(self) -> int:
        return 3 * self.k

    def distance(self, X) -> np.ndarray:
        """Unpenalized Hellinger term E for each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        diff = np.sqrt(_batch_pdf(X, self.grid)) - self._sqrt_h
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    def penalty(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return self.cfg.penalty_weight * np.abs(1.0 - X[:, : self.k].sum(axis=1))

    def __call__(self, X) -> np.ndarray:
        return self.distance(X) + self.penalty(X)


def hellinger_distance(candidate: MixtureCandidate, observed: Histogram) -> float:
    grid = np.arange(observed.levels, dtype=np.float64)
    diff = np.sqrt(mixture_pdf(candidate, grid)) - np.sqrt(observed.bins)
    return float(np.sqrt(np.dot(diff, diff)))


def hellinger_objective(candidate: MixtureCandidate, observed: Histogram,
                        cfg: ObjectiveConfig = ObjectiveConfig()) -> float:
    """Hellinger term plus ``w * |1 - sum(P)|``; lower is better."""
    e = hellinger_distance(candidate, observed)
    return e + cfg.penalty_weight * abs(1.0 - float(candidate.priors.sum()))
