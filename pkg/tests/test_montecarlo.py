import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import pois_pmf, within
from poissoncalc import (QuadSpec, build_box_space, count_event, expect,
                         indicator, median, total_count)
from poissoncalc.estimates import Estimate, McSpec, MomentSummary
from poissoncalc.functionals import Functional
from poissoncalc.montecarlo import (collect_values, lower_median, paired_run,
                                    poisson_batch, run_stream, shard_sizes,
                                    spawn_shard_rngs)


@pytest.fixture
def space():
    return build_box_space(1, [1.0], 1.0)


def test_mcspec_validation():
    with pytest.raises(ValueError):
        McSpec(1, 0)
    with pytest.raises(ValueError):
        McSpec(10, 0, ci_level=1.5)


def test_estimate_ci():
    est = Estimate(1.0, 0.1, 100, ci_level=0.95)
    lo, hi = est.ci()
    assert lo == pytest.approx(1.0 - 1.959963985 * 0.1, abs=1e-6)
    assert hi == pytest.approx(1.0 + 1.959963985 * 0.1, abs=1e-6)


@given(st.integers(2, 1000), st.integers(1, 16))
@settings(max_examples=50, deadline=None)
def test_shard_sizes_partition(n, shards):
    sizes = shard_sizes(n, shards)
    assert sum(sizes) == n
    assert max(sizes) - min(sizes) <= 1


def test_shard_rngs_deterministic():
    a = [g.random() for g in spawn_shard_rngs(5, 4)]
    b = [g.random() for g in spawn_shard_rngs(5, 4)]
    assert a == b


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=40),
       st.integers(1, 5))
@settings(max_examples=60, deadline=None)
def test_moment_merge_matches_direct(values, cut):
    values = np.asarray(values)[:, None]
    cut = min(cut, len(values) - 1)
    left = MomentSummary.from_values(values[:cut])
    right = MomentSummary.from_values(values[cut:])
    merged = left.merge(right)
    direct = MomentSummary.from_values(values)
    assert merged.n == direct.n
    assert np.allclose(merged.mean, direct.mean, atol=1e-9)
    assert np.allclose(merged.comoment, direct.comoment, atol=1e-7)


def test_expect_constant(space):
    F = Functional(lambda w: 2.5, label="c")
    est = expect(space, F, 1.0, McSpec(1000, 3))
    assert est.mean == 2.5
    assert est.stderr == 0.0


def test_expect_count_mean(space):
    est = expect(space, total_count(space), 1.0, McSpec(100_000, 5))
    assert within(est, 1.0)


def test_expect_void_indicator(space):
    F = indicator(count_event(space, space.full_region(), "=", 0))
    est = expect(space, F, 1.0, McSpec(100_000, 7))
    assert within(est, pois_pmf(0, 1.0))


def test_expect_linear_on_shared_stream(space):
    mc = McSpec(20_000, 11)
    F = total_count(space)
    G = indicator(count_event(space, space.full_region(), "=", 0))

    def visit(sample):
        f, g = F(sample.omega), G(sample.omega)
        return (f, g, 2.0 * f - 3.0 * g)

    summary, _ = run_stream(poisson_batch(space, 1.0), visit, mc, 3)
    combo = 2.0 * summary.mean[0] - 3.0 * summary.mean[1]
    assert summary.mean[2] == pytest.approx(combo, rel=1e-12)


def test_serial_parallel_identical(space):
    F = total_count(space)
    serial = expect(space, F, 1.0, McSpec(20_000, 13, workers=1))
    parallel = expect(space, F, 1.0, McSpec(20_000, 13, workers=4))
    assert serial.mean == parallel.mean
    assert serial.stderr == parallel.stderr


def test_expect_deterministic_per_seed(space):
    F = total_count(space)
    a = expect(space, F, 1.0, McSpec(5_000, 17))
    b = expect(space, F, 1.0, McSpec(5_000, 17))
    assert a.mean == b.mean and a.stderr == b.stderr


def test_lower_median_on_ties():
    assert lower_median(np.array([3.0, 1.0, 2.0, 2.0])) == 2.0
    assert lower_median(np.array([1.0, 2.0])) == 1.0


def test_median_poisson_count(space):
    F = total_count(space)
    assert median(space, F, 1.0, McSpec(50_000, 19)) == 1.0


def test_median_constant(space):
    F = Functional(lambda w: 7.0, label="c")
    assert median(space, F, 1.0, McSpec(100, 23)) == 7.0


def test_median_shifted_count(space):
    F = Functional(lambda w: float(len(w)) - 1.0, label="n-1")
    assert median(space, F, 1.0, McSpec(50_000, 29)) == 0.0


def test_paired_run_exact_identity(space):
    F = total_count(space)
    report = paired_run(
        "self", space, 1.0, McSpec(2_000, 31), QuadSpec(8, seed=1),
        lambda omega, nodes: F(omega), lambda omega, nodes: F(omega))
    assert report.holds
    assert report.difference.mean == 0.0
    assert report.difference.stderr == 0.0


def test_paired_run_detects_violation(space):
    F = total_count(space)
    report = paired_run(
        "off", space, 1.0, McSpec(20_000, 37), QuadSpec(8, seed=1),
        lambda omega, nodes: F(omega), lambda omega, nodes: F(omega) + 0.5)
    assert not report.holds


def test_collect_values_shard_order(space):
    F = total_count(space)
    values = collect_values(space, F, 1.0, McSpec(1_000, 41))
    est = expect(space, F, 1.0, McSpec(1_000, 41))
    assert float(values.mean()) == pytest.approx(est.mean, rel=1e-12)
