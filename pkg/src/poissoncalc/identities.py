"""Paired verifiers for the integration-by-parts identities of the
finite-difference calculus, and co-area checks for integer-valued functionals.

Every verifier estimates both sides of its identity on one shared
configuration stream, with common quadrature nodes for base-measure integrals,
and reports the paired difference with its own standard error.
"""

from __future__ import annotations

import math

import numpy as np

from .calculus import (divergence, grad_norm, grad_norm_power,
                       own_point_diffs, signed_diffs_at)
from .estimates import IdentityReport, McSpec
from .events import count_event, indicator
from .functionals import Functional, TwoVariableProcess
from .montecarlo import paired_run
from .space import PointSpace, QuadSpec

IDENTITY_IDS = ("adjoint_sigma", "adjoint_omega", "exchange", "mecke",
                "mecke_plus", "mecke_minus", "delta_equal", "grad_mean_flip",
                "dirichlet_equal", "mean_zero_sigma", "mean_zero_omega")


def _diff_process(F: Functional) -> TwoVariableProcess:
    """The two-variable process (x, w) -> D_x F(w)."""

    def evaluate(x, omega):
        return signed_diffs_at(F, omega, np.asarray(x).reshape(1, -1))[0]

    def evaluate_many(xs, omega):
        return signed_diffs_at(F, omega, xs)

    def evaluate_removed(pts, omega):
        # D_x F at w - x for x in w equals minus D_x F at w.
        return -own_point_diffs(F, omega)

    def evaluate_added(xs, omega):
        return -signed_diffs_at(F, omega, xs)

    return TwoVariableProcess(evaluate, label=f"D{F.label}",
                              evaluate_many=evaluate_many,
                              evaluate_added=evaluate_added,
                              evaluate_removed=evaluate_removed)


def verify_identity(check_id: str, space: PointSpace, lam: float, mc: McSpec,
                    quad: QuadSpec, *, F: Functional | None = None,
                    G: Functional | None = None,
                    u: TwoVariableProcess | None = None, p: float = 1.0,
                    z: float = 4.0, exact: float | None = None,
                    label: str | None = None) -> IdentityReport:
    """Run one named identity check and report the paired estimates.

    Which inputs are read depends on the identity: the adjointness checks use
    F and u, the exchange and norm identities F and p, the divergence
    mean-zero checks just u.
    """
    if check_id == "mecke":
        check_id = "mecke_minus"
    if check_id not in IDENTITY_IDS:
        raise ValueError(f"unknown identity {check_id!r}; "
                         f"expected one of {IDENTITY_IDS}")
    m = space.total_mass
    name = label or check_id

    if check_id == "adjoint_sigma":
        def left(omega, nodes):
            return F(omega) * divergence(space, u, omega, "sigma", nodes=nodes)

        def right(omega, nodes):
            d = signed_diffs_at(F, omega, nodes)
            return m * float(np.mean(d * u.values(nodes, omega)))

    elif check_id == "adjoint_omega":
        def left(omega, nodes):
            return F(omega) * divergence(space, u, omega, "omega", nodes=nodes)

        def right(omega, nodes):
            if not len(omega):
                return 0.0
            d = own_point_diffs(F, omega)
            return float(np.sum(d * u.values(omega.points, omega)))

    elif check_id == "exchange":
        def left(omega, nodes):
            return grad_norm_power(space, F, omega, p, "sigma", "plus",
                                   nodes=nodes)

        def right(omega, nodes):
            return grad_norm_power(space, F, omega, p, "omega", "minus")

    elif check_id == "mecke_minus":
        def left(omega, nodes):
            return len(omega) * F(omega) - float(np.sum(own_point_diffs(F, omega)))

        def right(omega, nodes):
            return m * F(omega)

    elif check_id == "mecke_plus":
        def left(omega, nodes):
            d = signed_diffs_at(F, omega, nodes)
            return m * float(np.mean(F(omega) - d))

        def right(omega, nodes):
            return len(omega) * F(omega)

    elif check_id == "delta_equal":
        DF = _diff_process(F)

        def left(omega, nodes):
            return divergence(space, DF, omega, "sigma", nodes=nodes)

        def right(omega, nodes):
            return divergence(space, DF, omega, "omega", nodes=nodes)

    elif check_id == "grad_mean_flip":
        def left(omega, nodes):
            return m * float(np.mean(signed_diffs_at(F, omega, nodes)))

        def right(omega, nodes):
            return -float(np.sum(own_point_diffs(F, omega)))

    elif check_id == "dirichlet_equal":
        def left(omega, nodes):
            return grad_norm_power(space, F, omega, 2.0, "sigma", nodes=nodes)

        def right(omega, nodes):
            return grad_norm_power(space, F, omega, 2.0, "omega")

    elif check_id == "mean_zero_sigma":
        def left(omega, nodes):
            return divergence(space, u, omega, "sigma", nodes=nodes)

        def right(omega, nodes):
            return 0.0

    else:  # mean_zero_omega
        def left(omega, nodes):
            return divergence(space, u, omega, "omega", nodes=nodes)

        def right(omega, nodes):
            return 0.0

    return paired_run(name, space, lam, mc, quad, left, right, relation="eq",
                      z=z, exact=exact)


def _level_functional(space: PointSpace, F: Functional, k: int) -> Functional:
    """Indicator of the level set {F > k + 1/2}.

    Count functionals get exact count-event closed forms; other integer
    functionals are re-evaluated on perturbed configurations.
    """
    if F.count_region is not None:
        return indicator(count_event(space, F.count_region, "ge", k + 1))
    threshold = k + 0.5
    return Functional(lambda w: float(float(F.evaluate(w)) > threshold),
                      label=f"1[{F.label}>{threshold}]")


def coarea_check(space: PointSpace, F: Functional, p: float, measure: str,
                 lam: float, mc: McSpec, quad: QuadSpec, part: str = "plus",
                 z: float = 4.0, exact: float | None = None) -> IdentityReport:
    """Layer-cake identity for an integer-valued functional.

    The left side is the mean gradient norm of F; the right side sums, over
    half-integer thresholds, the matching norm of the level indicators
    {F > k + 1/2}. measure "sup" selects the essential-sup norm against the
    symmetrized neighborhood; the finite measures require p = 1.
    """
    if measure == "sup":
        norm_measure, norm_p = "sym", math.inf
    elif measure in ("sigma", "omega", "sym"):
        if p != 1:
            raise ValueError("finite-measure co-area checks require p = 1")
        norm_measure, norm_p = measure, 1.0
    else:
        raise ValueError(f"unknown co-area measure {measure!r}")

    levels: dict[int, Functional] = {}

    def left(omega, nodes):
        if math.isinf(norm_p):
            return grad_norm(space, F, omega, norm_p, norm_measure, part,
                             nodes=nodes)
        return grad_norm_power(space, F, omega, norm_p, norm_measure, part,
                               nodes=nodes)

    def right(omega, nodes):
        # Neighbor values bound the thresholds that can contribute at omega.
        base = float(F.evaluate(omega))
        diffs = [np.zeros(1), own_point_diffs(F, omega)]
        if nodes is not None:
            diffs.append(signed_diffs_at(F, omega, nodes))
        values = base - np.concatenate(diffs)
        if float(np.abs(values - np.rint(values)).max()) > 1e-9:
            raise ValueError(f"co-area requires an integer-valued functional; "
                             f"got values of {F.label!r} off the integers")
        lo = int(np.rint(values.min()))
        hi = int(np.rint(values.max()))
        total = 0.0
        for k in range(lo, hi):
            level = levels.get(k)
            if level is None:
                level = levels.setdefault(k, _level_functional(space, F, k))
            if math.isinf(norm_p):
                total += grad_norm(space, level, omega, norm_p, norm_measure,
                                   part, nodes=nodes)
            else:
                total += grad_norm_power(space, level, omega, norm_p,
                                         norm_measure, part, nodes=nodes)
        return total

    name = f"coarea[{part},{measure},{F.label}]"
    return paired_run(name, space, lam, mc, quad, left, right, relation="eq",
                      z=z, exact=exact)
