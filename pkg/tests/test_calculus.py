import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poissoncalc import (Configuration, QuadSpec, Region, build_box_space,
                         carre_du_champ, count_event, diff, divergence,
                         grad_norm, grad_norm_power, indicator, laplacian,
                         perturb, region_count, sample_configuration,
                         total_count)
from poissoncalc.calculus import own_point_diffs, signed_diffs_at
from poissoncalc.functionals import Functional, TwoVariableProcess
from poissoncalc.space import draw_nodes


def cfg(*xs):
    if not xs:
        return Configuration.empty(1)
    return Configuration(np.array(xs, dtype=float)[:, None])


@pytest.fixture
def space():
    return build_box_space(1, [1.0], 1.0)


@pytest.fixture
def nodes(space):
    return draw_nodes(space, QuadSpec(64, seed=21))


def random_poly_functional(space, rng):
    """Polynomial in two region counts with random small coefficients."""
    half = Region((0.0,), (0.5,))
    coeffs = rng.integers(-3, 4, size=3)

    def evaluate(omega):
        a = len(omega)
        b = sum(1 for x in omega.points if x[0] <= 0.5)
        return float(coeffs[0] * a + coeffs[1] * b * b + coeffs[2])

    return Functional(evaluate, label="poly"), half


def test_count_diff_signs(space):
    F = total_count(space)
    omega = cfg(0.3)
    assert diff(F, omega, [0.7]) == -1.0
    assert diff(F, omega, [0.3]) == 1.0


def test_constant_diff_zero(space):
    F = Functional(lambda w: 4.5, label="c")
    omega = cfg(0.2, 0.8)
    for x in ([0.2], [0.5]):
        assert diff(F, omega, x) == 0.0


def test_indicator_plus_diff(space):
    # Inside the event, adding a region point exits it upward.
    event = count_event(space, Region((0.0,), (1.0,)), "=", 1)
    F = indicator(event)
    omega = cfg(0.4)
    assert diff(F, omega, [0.7], part="plus") == 1.0
    assert diff(F, cfg(0.4, 0.6), [0.2], part="plus") == 0.0


@given(st.lists(st.integers(0, 99), min_size=0, max_size=5, unique=True),
       st.integers(0, 99), st.integers(0, 2))
@settings(max_examples=80, deadline=None)
def test_sign_flip_under_perturbation(grid, probe, which):
    space = build_box_space(1, [1.0], 1.0)
    rng = np.random.default_rng(7)
    F, _ = random_poly_functional(space, rng)
    pts = [g / 100.0 + 0.003 for g in grid]
    omega = cfg(*pts) if pts else Configuration.empty(1)
    x = [probe / 100.0 + 0.0041]
    if which == 0:
        # addition then evaluation at the grown configuration flips the sign
        grown = perturb(omega, x, "add")
        assert diff(F, grown, x) == -diff(F, omega, x)
    else:
        grown = perturb(omega, x, "add")
        assert diff(F, omega, x) == -diff(F, grown, x)


@given(st.lists(st.integers(0, 99), min_size=1, max_size=5, unique=True),
       st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_part_decomposition_pointwise(grid, xval):
    space = build_box_space(1, [1.0], 1.0)
    rng = np.random.default_rng(3)
    F, _ = random_poly_functional(space, rng)
    omega = cfg(*[g / 100.0 + 0.003 for g in grid])
    d = diff(F, omega, [xval])
    plus = diff(F, omega, [xval], part="plus")
    minus = diff(F, omega, [xval], part="minus")
    assert plus * minus == 0.0
    assert plus - minus == pytest.approx(d)
    for p in (1.0, 2.0, 3.5):
        assert abs(d) ** p == pytest.approx(plus ** p + minus ** p)


def test_antisymmetry_of_parts(space):
    F = region_count(space, Region((0.0,), (0.5,)))
    negF = Functional(lambda w: -F.evaluate(w), label="-F")
    omega = cfg(0.1, 0.6)
    for x in ([0.2], [0.1], [0.8]):
        assert diff(F, omega, x, part="plus") == diff(negF, omega, x,
                                                      part="minus")


def test_closed_form_diff_matches_generic(space, nodes):
    F = region_count(space, Region((0.0,), (0.5,)))
    generic = Functional(F.evaluate, label="generic")
    rng = np.random.default_rng(11)
    for lam in (0.5, 2.0):
        omega = sample_configuration(space, lam, rng)
        fast = signed_diffs_at(F, omega, nodes)
        slow = signed_diffs_at(generic, omega, nodes)
        assert np.allclose(fast, slow)
        assert np.allclose(own_point_diffs(F, omega),
                           own_point_diffs(generic, omega))


def test_grad_norm_closed_matches_generic(space, nodes):
    F = region_count(space, Region((0.0,), (0.5,)))
    generic = Functional(F.evaluate, label="generic")
    rng = np.random.default_rng(29)
    for _ in range(10):
        omega = sample_configuration(space, 1.5, rng)
        for measure in ("sigma", "omega", "sym"):
            for part in ("signed", "plus", "minus"):
                fast = grad_norm(space, F, omega, 2.0, measure, part,
                                 nodes=nodes)
                slow = grad_norm(space, generic, omega, 2.0, measure, part,
                                 nodes=nodes)
                assert fast == pytest.approx(slow, abs=1e-12)


def test_grad_norm_count_l2_sigma(space, nodes):
    F = total_count(space)
    omega = cfg(0.25, 0.75)
    power = grad_norm_power(space, F, omega, 2.0, "sigma", nodes=nodes)
    assert power == pytest.approx(space.total_mass)


def test_grad_norm_count_sup(space, nodes):
    F = total_count(space)
    assert grad_norm(space, F, cfg(0.5), math.inf, "sym", nodes=nodes) == 1.0


def test_indicator_omega_power_counts_region_points(space, nodes):
    event = count_event(space, Region((0.0,), (0.5,)), "=", 2)
    F = indicator(event)
    omega = cfg(0.1, 0.2, 0.9)
    for p in (1.0, 2.0):
        power = grad_norm_power(space, F, omega, p, "omega", part="plus",
                                nodes=nodes)
        assert power == pytest.approx(2.0)


def test_sym_norm_is_half_mixture(space, nodes):
    F = region_count(space, Region((0.0,), (0.5,)))
    omega = cfg(0.3, 0.8)
    p = 2.0
    sym = grad_norm_power(space, F, omega, p, "sym", nodes=nodes)
    sig = grad_norm_power(space, F, omega, p, "sigma", nodes=nodes)
    omg = grad_norm_power(space, F, omega, p, "omega", nodes=nodes)
    assert sym == pytest.approx(0.5 * sig + 0.5 * omg)


def test_grad_norm_validates_p(space, nodes):
    F = total_count(space)
    with pytest.raises(ValueError):
        grad_norm(space, F, cfg(0.5), 0.5, "sigma", nodes=nodes)


def test_divergence_constant_process(space, nodes):
    u = TwoVariableProcess(lambda x, w: 1.0,
                           evaluate_many=lambda xs, w: np.ones(len(xs)),
                           evaluate_added=lambda xs, w: np.ones(len(xs)),
                           evaluate_removed=lambda xs, w: np.ones(len(xs)))
    omega = cfg(0.2, 0.5, 0.9)
    div_sigma = divergence(space, u, omega, "sigma", nodes=nodes)
    div_omega = divergence(space, u, omega, "omega", nodes=nodes)
    assert div_sigma == pytest.approx(space.total_mass - len(omega))
    assert div_omega == pytest.approx(len(omega) - space.total_mass)


def test_laplacian_count_eigenfunction(space, nodes):
    F = total_count(space)
    for omega in (cfg(), cfg(0.4), cfg(0.1, 0.9)):
        lap = laplacian(space, F, omega, nodes=nodes)
        assert lap == pytest.approx(0.5 * (len(omega) - space.total_mass))


def test_laplacian_constant_zero(space, nodes):
    F = Functional(lambda w: 3.0, label="c")
    assert laplacian(space, F, cfg(0.3, 0.6), nodes=nodes) == pytest.approx(0.0)


def test_divergences_of_gradient_agree_pointwise(space, nodes):
    # Both divergences of the gradient collapse to the same expression once
    # the same nodes are used for the base-measure integrals.
    rng = np.random.default_rng(23)
    F, _ = random_poly_functional(space, rng)
    from poissoncalc.identities import _diff_process

    DF = _diff_process(F)
    for lam in (0.5, 1.0, 3.0):
        omega = sample_configuration(space, lam, rng)
        left = divergence(space, DF, omega, "sigma", nodes=nodes)
        right = divergence(space, DF, omega, "omega", nodes=nodes)
        assert left == pytest.approx(right, abs=1e-10)


def test_carre_du_champ_is_half_squared_norm(space, nodes):
    F = region_count(space, Region((0.0,), (0.5,)))
    for omega in (cfg(), cfg(0.2), cfg(0.1, 0.7)):
        for sign in ("plus", "minus"):
            gamma = carre_du_champ(space, F, F, omega, sign, nodes=nodes)
            half_norm = 0.5 * grad_norm_power(space, F, omega, 2.0, "sym",
                                              part=sign, nodes=nodes)
            assert gamma == pytest.approx(half_norm)


def test_carre_du_champ_constant_zero(space, nodes):
    F = Functional(lambda w: 2.0, label="c")
    G = total_count(space)
    assert carre_du_champ(space, F, G, cfg(0.4), "plus",
                          nodes=nodes) == pytest.approx(0.0)


def _product_rule_residual(space, nodes, u, F, omega, flavor):
    """Residual of div(u*F) = F*div(u) + div(u*DF) - <u, DF>, all with the
    same nodes."""
    uf = TwoVariableProcess(
        lambda x, w: u.evaluate(x, w) * F.evaluate(w),
        evaluate_many=lambda xs, w: u.values(xs, w) * F.evaluate(w))
    udf = TwoVariableProcess(
        lambda x, w: u.evaluate(x, w) * signed_diffs_at(F, w, np.asarray(
            x).reshape(1, -1))[0],
        evaluate_many=lambda xs, w: u.values(xs, w) * signed_diffs_at(F, w, xs))
    lhs = divergence(space, uf, omega, flavor, nodes=nodes)
    inner_measure = "sigma" if flavor == "sigma" else "omega"
    if inner_measure == "sigma":
        pairing = space.total_mass * float(
            np.mean(u.values(nodes, omega) * signed_diffs_at(F, omega, nodes)))
    else:
        pairing = float(np.sum(u.values(omega.points, omega)
                               * own_point_diffs(F, omega))) if len(omega) else 0.0
    rhs = (F(omega) * divergence(space, u, omega, flavor, nodes=nodes)
           + divergence(space, udf, omega, flavor, nodes=nodes) - pairing)
    return lhs - rhs


@given(st.lists(st.integers(0, 99), min_size=0, max_size=4, unique=True),
       st.sampled_from(["sigma", "omega"]))
@settings(max_examples=40, deadline=None)
def test_product_rules_pointwise(grid, flavor):
    space = build_box_space(1, [1.0], 1.0)
    nodes = draw_nodes(space, QuadSpec(16, seed=2))
    rng = np.random.default_rng(17)
    F, half = random_poly_functional(space, rng)
    u = TwoVariableProcess(
        lambda x, w: float(half.contains_points(np.asarray(x).reshape(1, -1))[0]),
        evaluate_many=lambda xs, w: half.contains_points(xs).astype(float))
    omega = cfg(*[g / 100.0 + 0.003 for g in grid]) if grid else \
        Configuration.empty(1)
    residual = _product_rule_residual(space, nodes, u, F, omega, flavor)
    assert residual == pytest.approx(0.0, abs=1e-9)
