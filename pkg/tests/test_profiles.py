import math

import pytest

from helpers import pois_pmf, pois_tail
from poissoncalc import (QuadSpec, Region, build_box_space, count_event,
                         isoperimetric_profile, lsi_constant_witness)
from poissoncalc.estimates import McSpec
from poissoncalc.profiles import ratio_lower_bound


@pytest.fixture
def space():
    return build_box_space(1, [1.0], 1.0)


@pytest.fixture
def mc():
    return McSpec(60_000, 301)


@pytest.fixture
def quad():
    return QuadSpec(16, seed=71)


def family(space):
    full = space.full_region()
    half = Region((0.0,), (0.5,))
    return [count_event(space, full, "=", 0),
            count_event(space, full, "=", 2),
            count_event(space, half, ">=", 1)]


def test_empty_event_ratios(space, mc, quad):
    # For the no-point event the two-sided L1 ratio is 1 and the sup ratio 2.
    fam = [count_event(space, space.full_region(), "=", 0)]
    t1 = isoperimetric_profile(space, fam, 1.0, "full", 1.0, mc, quad)
    row = t1.rows[0]
    assert not row.excluded
    assert abs(row.ratio.mean - 1.0) <= 4 * row.ratio.stderr
    tinf = isoperimetric_profile(space, fam, math.inf, "full", 1.0, mc, quad)
    row = tinf.rows[0]
    assert abs(row.ratio.mean - 2.0) <= 4 * row.ratio.stderr


def test_surface_ratio_p2(space, mc, quad):
    fam = [count_event(space, space.full_region(), "=", 0)]
    table = isoperimetric_profile(space, fam, 2.0, "full", 1.0, mc, quad)
    row = table.rows[0]
    # Surface over volume: sqrt(2) for the no-point event at unit mass.
    assert abs(row.ratio.mean - math.sqrt(2.0)) <= 4 * row.ratio.stderr


def test_full_equals_twice_plus_at_p1(space, mc, quad):
    fam = family(space)
    full = isoperimetric_profile(space, fam, 1.0, "full", 1.0, mc, quad)
    plus = isoperimetric_profile(space, fam, 1.0, "plus", 1.0, mc, quad)
    minus = isoperimetric_profile(space, fam, 1.0, "minus", 1.0, mc, quad)
    for fr, pr, mr in zip(full.rows, plus.rows, minus.rows):
        assert fr.ratio.mean == 2.0 * pr.ratio.mean
        assert pr.ratio.mean == mr.ratio.mean


def test_bounds_hold_on_family(space, mc, quad):
    fam = family(space)
    for p in (1.0, 2.0, math.inf):
        table = isoperimetric_profile(space, fam, p, "full", 1.0, mc, quad)
        assert table.all_bounds_hold
        assert table.family_min >= ratio_lower_bound(p, "full", 1.0) - 0.05


def test_tilde_variant_uses_two_sided_guard(space, mc, quad):
    # An event with probability above one half is allowed under tilde.
    big = count_event(space, space.full_region(), "<=", 1)  # prob ~ 0.736
    table = isoperimetric_profile(space, [big], 1.0, "tilde", 1.0, mc, quad)
    row = table.rows[0]
    assert not row.excluded
    # Tilde ratio of A: E[|D 1_A|_L1(sym)] / (p(1-p)); the mixed norm picks up
    # the single exiting addition at count 1 and the two entering removals at
    # count 2.
    num = 0.5 * (pois_pmf(1, 1.0) + 2.0 * pois_pmf(2, 1.0))
    p = pois_pmf(0, 1.0) + pois_pmf(1, 1.0)
    exact = num / (p * (1.0 - p))
    assert abs(row.ratio.mean - exact) <= 5 * row.ratio.stderr


def test_probability_guard_excludes_events(space, mc, quad):
    guarded = count_event(space, space.full_region(), "<=", 1)  # prob > 1/2
    fine = count_event(space, space.full_region(), "=", 0)
    table = isoperimetric_profile(space, [guarded, fine], 1.0, "full", 1.0,
                                  mc, quad)
    assert table.rows[0].excluded
    assert not table.rows[1].excluded
    with pytest.raises(ValueError, match="guard"):
        isoperimetric_profile(space, [guarded], 1.0, "full", 1.0, mc, quad)


def test_empty_family_rejected(space, mc, quad):
    with pytest.raises(ValueError, match="empty"):
        isoperimetric_profile(space, [], 1.0, "full", 1.0, mc, quad)


def test_lsi_witness_exact_rows(space):
    report = lsi_constant_witness(space, space.full_region(), 1.0, 6)
    assert len(report.rows) == 6
    for row in report.rows:
        prob = pois_tail(row.k, 1.0)
        boundary = pois_pmf(row.k - 1, 1.0) + pois_pmf(row.k, 1.0)
        assert row.prob == pytest.approx(prob, abs=1e-12)
        assert row.boundary_prob == pytest.approx(boundary, abs=1e-12)
        assert row.ratio == pytest.approx(
            boundary / (-prob * math.log(prob)), abs=1e-12)
    assert report.strictly_decreasing


def test_lsi_witness_frozen_ratios(space):
    # Exact-tail ratios at unit mean, frozen from the independent oracle.
    report = lsi_constant_witness(space, space.full_region(), 1.0, 6)
    frozen = [2.537642, 1.569109, 1.211021, 1.018250, 0.895826, 0.810324]
    for row, expected in zip(report.rows, frozen):
        assert row.ratio == pytest.approx(expected, abs=1e-6)


def test_lsi_witness_needs_kmax(space):
    with pytest.raises(ValueError):
        lsi_constant_witness(space, space.full_region(), 1.0, 1)
