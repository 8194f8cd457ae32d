"""Thresholds from a fitted mixture, pixel labeling, and the exhaustive Otsu baseline."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateHistogramError, IdenticalComponentsError
from .histogram import GrayImage, Histogram, write_pgm
from .mixture import MixtureCandidate

QUADRATIC = "quadratic-root"
LINEAR = "linear-degenerate"
FALLBACK = "numeric-fallback"
EXHAUSTIVE = "exhaustive-search"

EPS_A = 1e-9
GRID_STEP = 0.01


@dataclass(frozen=True)
class ThresholdSet:
    thresholds: tuple
    tags: tuple

    def __post_init__(self):
        t = tuple(float(v) for v in self.thresholds)
        if len(t) != len(self.tags):
            raise ValueError("one derivation tag per threshold is required")
        if any(b < a for a, b in zip(t, t[1:])):
            raise ValueError(f"thresholds must be increasing: {t}")
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "tags", tuple(self.tags))

    def __len__(self):
        return len(self.thresholds)


@dataclass(frozen=True)
class LabelMap:
    labels: np.ndarray  # (height, width) class indices
    classes: int

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def to_gray(self) -> np.ndarray:
        """Labels spread evenly over 0..255 (0/128/255 for three classes)."""
        if self.classes <= 1:
            return np.zeros(self.labels.shape, dtype=np.uint8)
        return np.rint(self.labels * (255.0 / (self.classes - 1))).astype(np.uint8)

    def write_pgm(self, path) -> None:
        write_pgm(self.to_gray(), path)


def sort_classes(candidate: MixtureCandidate) -> MixtureCandidate:
    order = np.argsort(candidate.means, kind="stable")
    return MixtureCandidate(candidate.priors[order], candidate.means[order], candidate.sigmas[order])


def misclassification_error(t, lower: tuple, upper: tuple):
    """E(T) = P_{i+1} * mass of class i+1 below T + P_i * mass of class i above T."""
    p1, m1, s1 = lower
    p2, m2, s2 = upper
    t = np.asarray(t, dtype=np.float64)
    below_upper = ndtr((t - m2) / s2)
    above_lower = ndtr((m1 - t) / s1)
    return p2 * below_upper + p1 * above_lower


def _grid_minimizer(lower, upper) -> float:
    lo, hi = lower[1], upper[1]
    n = int(math.floor((hi - lo) / GRID_STEP + 1e-9))
    grid = lo + GRID_STEP * np.arange(n + 1)
    if grid[-1] < hi:
        grid = np.append(grid, hi)
    return float(grid[int(np.argmin(misclassification_error(grid, lower, upper)))])


def quadratic_coefficients(lower: tuple, upper: tuple) -> tuple[float, float, float]:
    """Coefficients A, B, C of A T^2 + B T + C = 0 for the adjacent pair."""
    p1, m1, s1 = lower
    p2, m2, s2 = upper
    a = s1 ** 2 - s2 ** 2
    b = 2.0 * (m1 * s2 ** 2 - m2 * s1 ** 2)
    log_term = math.log((s2 * p1) / (s1 * p2)) if p1 > 0 and p2 > 0 else math.nan
    c = (s1 * m2) ** 2 - (s2 * m1) ** 2 + 2.0 * (s1 * s2) ** 2 * log_term
    return a, b, c


def threshold_between(lower: tuple, upper: tuple) -> tuple[float, str]:
    """Threshold separating two adjacent (P, mu, sigma) classes, mu_lower <= mu_upper.

    Solves the stationarity quadratic; with |A| <= EPS_A falls back to the
    linear root; if no root lies in [mu_lower, mu_upper] minimizes E(T) on a
    0.01 gray-level grid over that interval.
    """
    p1, m1, s1 = lower
    p2, m2, s2 = upper
    if m1 > m2:
        raise ValueError("classes must be ordered by mean")
    if m1 == m2 and s1 == s2 and p1 == p2:
        raise IdenticalComponentsError(f"components coincide: {lower}")
    a, b, c = quadratic_coefficients(lower, upper)
    inside = lambda t: m1 <= t <= m2  # noqa: E731

    if math.isfinite(c):
        if abs(a) > EPS_A:
            disc = b * b - 4.0 * a * c
            if disc >= 0:
                sq = math.sqrt(disc)
                # numerically stable pair of roots
                q = -0.5 * (b + math.copysign(sq, b)) if b != 0 else 0.5 * sq
                roots = [q / a, c / q] if q != 0 else [sq / (2 * a), -sq / (2 * a)]
                feasible = [r for r in roots if inside(r)]
                if feasible:
                    best = min(feasible, key=lambda r: float(misclassification_error(r, lower, upper)))
                    return float(best), QUADRATIC
        elif b != 0:
            t = -c / b
            if inside(t):
                return float(t), LINEAR
    return _grid_minimizer(lower, upper), FALLBACK


def derive_thresholds(candidate: MixtureCandidate) -> ThresholdSet:
    if candidate.k < 2:
        raise ValueError("need at least two classes to derive thresholds")
    c = sort_classes(candidate)
    pairs = [threshold_between(c.component(i), c.component(i + 1)) for i in range(c.k - 1)]
    return ThresholdSet(tuple(t for t, _ in pairs), tuple(tag for _, tag in pairs))


def apply_thresholds(image: GrayImage, thresholds: ThresholdSet) -> LabelMap:
    """label(g) = number of thresholds strictly below g."""
    t = np.asarray(thresholds.thresholds, dtype=np.float64)
    lut = np.searchsorted(t, np.arange(256, dtype=np.float64), side="left").astype(np.uint8)
    return LabelMap(lut[image.pixels], len(t) + 1)


def otsu_pair_count(levels: int) -> int:
    """Pairs 0 <= t1 < t2 <= levels-2."""
    return math.comb(levels - 1, 2)


def otsu_two_thresholds(hist) -> tuple[ThresholdSet, int]:
    """Exhaustive two-threshold Otsu search.

    Classes are [0, t1], [t1+1, t2], [t2+1, L-1]; every pair with
    0 <= t1 < t2 <= L-2 is scored by between-class variance
    sum_c w_c (mu_c - mu_T)^2.  Ties go to the smallest t1, then t2.
    Accepts a :class:`Histogram` or any nonnegative 1-D array.
    """
    h = np.asarray(hist.bins if isinstance(hist, Histogram) else hist, dtype=np.float64)
    if h.ndim != 1 or np.any(h < 0):
        raise ValueError("histogram must be a nonnegative 1-D array")
    if np.count_nonzero(h) < 3:
        raise DegenerateHistogramError("need at least three occupied gray levels")
    h = h / h.sum()
    levels = h.size
    g = np.arange(levels, dtype=np.float64)
    w = np.cumsum(h)
    m = np.cumsum(h * g)
    w_total, m_total = w[-1], m[-1]
    mu_t = m_total / w_total

    t1 = np.arange(levels - 2)[:, None]
    t2 = np.arange(1, levels - 1)[None, :]
    w0, m0 = w[t1], m[t1]
    w1, m1 = w[t2] - w[t1], m[t2] - m[t1]
    w2, m2 = w_total - w[t2], m_total - m[t2]

    def term(wc, mc):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(wc > 0, (mc - wc * mu_t) ** 2 / wc, 0.0)

    score = term(w0, m0) + term(w1, m1) + term(w2, m2)
    score = np.where(t2 > t1, score, -np.inf)
    idx = int(np.argmax(score))  # row-major: first hit is smallest (t1, t2)
    a, b = np.unravel_index(idx, score.shape)
    pair = (float(a), float(b + 1))
    return ThresholdSet(pair, (EXHAUSTIVE, EXHAUSTIVE)), otsu_pair_count(levels)
