import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmthresh.histogram import Histogram
from gmthresh.mixture import (
    MixtureCandidate,
    MixtureObjective,
    ObjectiveConfig,
    SearchBounds,
    clamp_to_bounds,
    default_bounds,
    effective_bounds,
    hellinger_distance,
    hellinger_objective,
    mixture_pdf,
)

CFG = ObjectiveConfig()


def point_hist(level, levels=256):
    bins = np.zeros(levels)
    bins[level] = 1.0
    return Histogram(bins, 1)


def brute_hellinger(priors, means, sigmas, hist_bins):
    total = 0.0
    for x in range(len(hist_bins)):
        p = 0.0
        for pi, mu, s in zip(priors, means, sigmas):
            p += pi / (math.sqrt(2 * math.pi) * s) * math.exp(-((x - mu) ** 2) / (2 * s * s))
        total += (math.sqrt(p) - math.sqrt(hist_bins[x])) ** 2
    return math.sqrt(total)


def test_gaussian_peak():
    c = MixtureCandidate([1.0], [128.0], [10.0])
    assert mixture_pdf(c, 128) == pytest.approx(1 / (math.sqrt(2 * math.pi) * 10), abs=1e-12)
    assert mixture_pdf(c, 128) == pytest.approx(0.0398942280401433, abs=1e-9)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.7])
def test_symmetry_about_dominant_mean(k):
    c = MixtureCandidate([1.0, 0.0], [100.0, 30.0], [12.0, 5.0])
    assert mixture_pdf(c, 100 - 12 * k) == pytest.approx(mixture_pdf(c, 100 + 12 * k), abs=1e-15)


def test_three_component_value():
    # 40-digit mpmath evaluation of the same sum
    c = MixtureCandidate([0.2, 0.3, 0.5], [50, 120, 200], [10, 15, 20])
    assert mixture_pdf(c, 120) == pytest.approx(0.007982191363855469805, rel=1e-13)


def test_pdf_array_input_shape():
    c = MixtureCandidate([0.5, 0.5], [60, 180], [10, 20])
    out = mixture_pdf(c, np.arange(256.0))
    assert out.shape == (256,) and np.all(out >= 0)


def test_hellinger_identity():
    c = MixtureCandidate([1.0], [128.0], [10.0])
    bins = mixture_pdf(c, np.arange(256.0))
    hist = Histogram(bins / bins.sum(), 1)
    assert abs(bins.sum() - 1.0) < 1e-14
    assert hellinger_objective(c, hist) == pytest.approx(0.0, abs=1e-9)


def test_hellinger_disjoint_support():
    # unit mass around 100; the histogram sits at 255 where the mixture is ~1e-52
    c = MixtureCandidate([1.0], [100.0], [10.0])
    assert hellinger_objective(c, point_hist(255)) == pytest.approx(math.sqrt(2), abs=1e-9)


def test_hellinger_against_brute_force():
    truth = MixtureCandidate([0.25, 0.35, 0.4], [60, 130, 190], [12, 9, 14])
    h = mixture_pdf(truth, np.arange(256.0))
    hist = Histogram(h / h.sum(), 1)
    c = MixtureCandidate([0.2, 0.3, 0.5], [50, 120, 200], [10, 15, 20])
    expected = brute_hellinger(c.priors, c.means, c.sigmas, hist.bins)
    assert hellinger_objective(c, hist) == pytest.approx(expected, rel=1e-12)
    # frozen from a 40-digit mpmath evaluation
    assert hellinger_objective(c, hist) == pytest.approx(0.42599803438652086, rel=1e-12)


def test_batch_objective_matches_scalar():
    rng = np.random.default_rng(3)
    counts = rng.integers(0, 50, size=256)
    hist = Histogram.from_counts(counts)
    obj = MixtureObjective(hist, 3, CFG)
    b = effective_bounds(default_bounds(), CFG)
    X = b.lower + rng.random((20, 9)) * b.span
    batch = obj(X)
    for x, v in zip(X, batch):
        assert v == pytest.approx(hellinger_objective(MixtureCandidate.from_vector(x), hist, CFG), rel=1e-12)
        assert obj.distance(x)[0] == pytest.approx(hellinger_distance(MixtureCandidate.from_vector(x), hist),
                                                  rel=1e-12)


def test_penalty_monotone():
    hist = point_hist(100)
    base = MixtureCandidate([0.5, 0.5], [90, 110], [5, 5])
    e = hellinger_distance(base, hist)
    values = []
    for dev in [0.0, 0.1, 0.2, 0.4]:
        c = MixtureCandidate([0.5 + dev, 0.5], [90, 110], [5, 5])
        e_c = hellinger_distance(c, hist)
        values.append(hellinger_objective(c, hist) - e_c)
        assert hellinger_objective(c, hist) == pytest.approx(e_c + 3 * dev, abs=1e-12)
    assert values == sorted(values) and len(set(values)) == 4
    assert hellinger_objective(base, hist) == pytest.approx(e)


candidates = st.tuples(
    st.lists(st.floats(0, 0.5), min_size=3, max_size=3),
    st.lists(st.floats(0, 255), min_size=3, max_size=3),
    st.lists(st.floats(0.01, 127.5), min_size=3, max_size=3),
)


@settings(max_examples=100, deadline=None)
@given(candidates, st.integers(0, 2 ** 32 - 1))
def test_objective_nonnegative(cand, seed):
    counts = np.random.default_rng(seed).integers(0, 20, size=256)
    counts[0] += 1
    hist = Histogram.from_counts(counts)
    assert hellinger_objective(MixtureCandidate(*cand), hist) >= 0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.05, 0.5), min_size=3, max_size=3),
       st.lists(st.floats(10, 245), min_size=3, max_size=3),
       st.lists(st.floats(3, 25), min_size=3, max_size=3))
def test_discrete_mass_matches_prior_sum(priors, means, sigmas):
    # keep each component at least 3.5 sigma away from the grid edges
    means = [min(max(m, 3.5 * s + 0.5), 254.5 - 3.5 * s) for m, s in zip(means, sigmas)]
    c = MixtureCandidate(priors, means, sigmas)
    mass = mixture_pdf(c, np.arange(256.0)).sum()
    assert abs(mass - sum(priors)) <= 1e-3


def test_clamp_projection_examples():
    b = default_bounds()
    c = MixtureCandidate([0.3, 0.3, 0.4], [-5, 100, 200], [10, 10, 10])
    assert clamp_to_bounds(c, b, CFG).means[0] == 0.0

    c = MixtureCandidate([0.3, 0.3, 0.4], [50, 100, 200], [10, 0, 10])
    assert clamp_to_bounds(c, b, CFG).sigmas[1] == CFG.sigma_min

    inside = MixtureCandidate([0.3, 0.3, 0.4], [50, 100, 200], [10, 12, 14])
    assert np.array_equal(clamp_to_bounds(inside, b, CFG).to_vector(), inside.to_vector())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=9, max_size=9))
def test_clamp_idempotent_and_matches_effective_bounds(v):
    b = default_bounds()
    c = MixtureCandidate.from_vector(np.array(v))
    once = clamp_to_bounds(c, b, CFG)
    twice = clamp_to_bounds(once, b, CFG)
    assert once.to_vector().tobytes() == twice.to_vector().tobytes()
    assert np.array_equal(effective_bounds(b, CFG).clip(np.array(v)), once.to_vector())


def test_default_bounds_table_values():
    b = default_bounds()
    assert b.upper.tolist() == [0.5] * 3 + [255.0] * 3 + [127.5] * 3
    assert b.lower.tolist() == [0.0] * 9


def test_bounds_and_config_validation():
    with pytest.raises(ValueError):
        SearchBounds([1.0], [0.0])
    with pytest.raises(ValueError):
        ObjectiveConfig(sigma_min=0)
    with pytest.raises(ValueError):
        MixtureCandidate([np.nan], [1], [1])
    assert ObjectiveConfig().penalty_weight == 3 and ObjectiveConfig().sigma_min == 1e-2


def test_vector_round_trip():
    v = np.arange(9, dtype=float) + 1
    c = MixtureCandidate.from_vector(v)
    assert c.priors.tolist() == [1, 2, 3] and c.sigmas.tolist() == [7, 8, 9]
    assert np.array_equal(c.to_vector(), v)
