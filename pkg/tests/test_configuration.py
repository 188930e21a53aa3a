import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import pois_pmf, within
from poissoncalc import (Configuration, Region, configuration_from_points,
                         count, perturb, sample_configuration,
                         sample_configurations)
from poissoncalc.estimates import MomentSummary


def cfg(*xs):
    return configuration_from_points(np.array(xs, dtype=float)[:, None])


def test_duplicate_points_rejected():
    with pytest.raises(ValueError):
        cfg(0.3, 0.3)


def test_points_stored_sorted():
    omega = cfg(0.7, 0.1, 0.4)
    assert list(omega.points[:, 0]) == [0.1, 0.4, 0.7]


def test_perturb_add_remove():
    omega = cfg(0.3)
    grown = perturb(omega, [0.7], "add")
    assert len(grown) == 2 and [0.7] in grown
    back = perturb(grown, [0.7], "remove")
    assert back == omega


def test_perturb_preconditions():
    omega = cfg(0.3, 0.7)
    with pytest.raises(ValueError):
        perturb(omega, [0.7], "add")
    with pytest.raises(ValueError):
        perturb(omega, [0.5], "remove")


@given(st.lists(st.integers(0, 999), min_size=0, max_size=6, unique=True),
       st.integers(1000, 1100))
@settings(max_examples=60, deadline=None)
def test_perturb_roundtrip(grid_points, new_point):
    pts = np.array([p / 1000.0 for p in grid_points], dtype=float)[:, None]
    omega = configuration_from_points(pts) if len(pts) else Configuration.empty(1)
    x = [new_point / 1000.0]
    assert perturb(perturb(omega, x, "add"), x, "remove") == omega


def test_count_of_empty(unit_space):
    assert count(Configuration.empty(1), Region((0.0,), (1.0,))) == 0


def test_count_direct():
    omega = cfg(0.3, 0.7)
    assert count(omega, Region((0.0,), (0.5,))) == 1


def test_membership_is_exact_equality():
    omega = cfg(0.3)
    assert [0.3] in omega
    assert [0.3 + 1e-12] not in omega


def test_json_roundtrip():
    omega = cfg(0.9, 0.2)
    again = Configuration.from_json_obj(omega.to_json_obj())
    assert again == omega


def test_zero_intensity_always_empty(unit_space, rng):
    for _ in range(20):
        assert len(sample_configuration(unit_space, 0.0, rng)) == 0


def test_poisson_count_mean(unit_space, rng):
    sizes = np.array([len(w) for w in
                      sample_configurations(unit_space, 1.0, rng, 100_000)])
    stderr = sizes.std(ddof=1) / math.sqrt(len(sizes))
    assert abs(sizes.mean() - 1.0) <= 3 * stderr


def test_poisson_void_probability(unit_space, rng):
    sizes = np.array([len(w) for w in
                      sample_configurations(unit_space, 1.0, rng, 100_000)])
    p0 = (sizes == 0).mean()
    stderr = math.sqrt(p0 * (1 - p0) / len(sizes))
    assert abs(p0 - math.exp(-1.0)) <= 3 * stderr


def test_thinned_count_mean(unit_space, rng):
    half = Region((0.0,), (0.5,))
    values = np.array([count(w, half) for w in
                       sample_configurations(unit_space, 1.0, rng, 100_000)])
    stderr = values.std(ddof=1) / math.sqrt(len(values))
    assert abs(values.mean() - 0.5) <= 4 * stderr


def test_disjoint_counts_independent_poisson(unit_space, rng):
    # Chi-square on the joint law of counts in two disjoint halves against
    # the product of the exact marginals, at a fixed seed.
    left = Region((0.0,), (0.5,))
    right = Region((0.5,), (1.0,))
    draws = sample_configurations(unit_space, 1.0, rng, 40_000)
    kmax = 3
    observed = np.zeros((kmax + 1, kmax + 1))
    for w in draws:
        i = min(count(w, left), kmax)
        j = min(count(w, right), kmax)
        observed[i, j] += 1
    marginal = [pois_pmf(k, 0.5) for k in range(kmax)]
    marginal.append(1.0 - sum(marginal))
    expected = len(draws) * np.outer(marginal, marginal)
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    # 15 degrees of freedom; 1e-4 quantile is around 44.
    assert chi2 < 44.0


def test_superposition_coupling_law(unit_space, rng):
    # A union of independent draws at intensities 0.6 and 0.4 must follow the
    # exact count law at intensity 1.0.
    n = 60_000
    lo = sample_configurations(unit_space, 0.6, rng, n)
    inc = sample_configurations(unit_space, 0.4, rng, n)
    sizes = np.array([len(a) + len(b) for a, b in zip(lo, inc)])
    for k in range(4):
        pk = (sizes == k).mean()
        exact = pois_pmf(k, 1.0)
        stderr = math.sqrt(max(pk * (1 - pk), 1e-12) / n)
        assert abs(pk - exact) <= 4 * stderr


def test_batch_sampler_matches_law_summary(unit_space):
    rng1 = np.random.default_rng(5)
    batch = sample_configurations(unit_space, 2.0, rng1, 1000)
    summary = MomentSummary.from_values(
        np.array([float(len(w)) for w in batch]))
    assert within(summary.estimate(0), 2.0)
