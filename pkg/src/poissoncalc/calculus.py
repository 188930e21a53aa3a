"""Finite-difference gradient, gradient norms, divergences, Laplacian and
squared-field (carre du champ) operators.

The gradient of F at a probe point x is F(w) - F(w + x) when x is outside the
configuration and F(w) - F(w - x) when x is one of its points. Norms are taken
against the base measure (integral over probe nodes), the configuration
(exact sum over its points), or their even mixture; the essential supremum for
the mixture is approximated by a maximum over configuration points and probe
nodes unless the functional is an event indicator carrying exact boundary
closed forms, in which case those are used.
"""

from __future__ import annotations

import math

import numpy as np

from .configuration import Configuration, perturb
from .functionals import Functional, TwoVariableProcess
from .space import EvaluationError, PointSpace, QuadSpec, draw_nodes

MEASURES = ("sigma", "omega", "sym")
PARTS = ("signed", "plus", "minus")


def apply_part(values, part: str):
    if part == "signed":
        return values
    if part == "plus":
        return np.maximum(values, 0.0)
    if part == "minus":
        return np.maximum(-np.asarray(values, dtype=float), 0.0)
    raise ValueError(f"unknown part {part!r}")


def _check_finite(values: np.ndarray, F: Functional, xs: np.ndarray):
    if not np.isfinite(values).all():
        bad = ~np.isfinite(values)
        where = np.atleast_2d(xs)[int(np.argmax(bad))]
        raise EvaluationError(
            f"difference of {F.label!r} is not finite at point {where.tolist()}")


def signed_diffs_at(F: Functional, omega: Configuration, xs) -> np.ndarray:
    """Signed differences of F at an array of probe points.

    Points that coincide exactly with configuration points take the removal
    branch; all others the addition branch.
    """
    if not (isinstance(xs, np.ndarray) and xs.ndim == 2):
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if not xs.size:
        return np.zeros(0)
    if omega.points.shape[0]:
        member = (xs[:, None, :] == omega.points).all(axis=2).any(axis=1)
    else:
        member = None
    if F.closed_form_diff is not None:
        out = np.asarray(F.closed_form_diff(omega, xs, "add"), dtype=float)
        if member is not None and member.any():
            out = out.copy()
            fixes = F.closed_form_diff(omega, xs[member], "remove")
            out[member] = np.asarray(fixes, dtype=float)
    else:
        out = np.empty(len(xs))
        for i, x in enumerate(xs):
            direction = "remove" if member is not None and member[i] else "add"
            out[i] = F.generic_diff(omega, x, direction)
    _check_finite(out, F, xs)
    return out


def own_point_diffs(F: Functional, omega: Configuration) -> np.ndarray:
    """Signed removal differences at every configuration point."""
    if not len(omega):
        return np.zeros(0)
    if F.closed_form_diff is not None:
        out = np.asarray(F.closed_form_diff(omega, omega.points, "remove"),
                         dtype=float)
    else:
        out = np.array([F.generic_diff(omega, x, "remove") for x in omega.points])
    _check_finite(out, F, omega.points)
    return out


def diff(F: Functional, omega: Configuration, x, part: str = "signed") -> float:
    """One-point finite difference of F, or its positive/negative part."""
    d = signed_diffs_at(F, omega, np.asarray(x, dtype=float).reshape(1, -1))[0]
    return float(apply_part(d, part))


def _closed_indicator_powers(F: Functional, omega: Configuration,
                             part: str) -> tuple[float, float] | None:
    """(base-measure power, configuration power) of the gradient of an event
    indicator, from the event's exact kernel masses. Valid for any finite p
    since indicator differences take values in {0, 1}."""
    event = F.event
    if event is None or event.closed is None:
        return None
    forms = event.closed
    member = bool(event.predicate(omega))
    plus_sigma = forms.kplus(omega, member=False) if member else 0.0
    plus_omega = forms.kminus(omega, member=False) if member else 0.0
    minus_sigma = 0.0 if member else forms.kplus(omega, member=True)
    minus_omega = 0.0 if member else forms.kminus(omega, member=True)
    if part == "plus":
        return plus_sigma, plus_omega
    if part == "minus":
        return minus_sigma, minus_omega
    return plus_sigma + minus_sigma, plus_omega + minus_omega


def grad_norm_power(space: PointSpace, F: Functional, omega: Configuration,
                    p: float, measure: str = "sigma", part: str = "signed",
                    quad: QuadSpec | None = None,
                    nodes: np.ndarray | None = None) -> float:
    """p-th power of the gradient norm against the chosen measure."""
    if not p >= 1 or math.isinf(p):
        raise ValueError("grad_norm_power needs a finite exponent p >= 1")
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    closed = _closed_indicator_powers(F, omega, part)
    if closed is not None:
        sigma_power, omega_power = closed
    else:
        sigma_power = None
        if measure in ("sigma", "sym"):
            if nodes is None:
                if quad is None:
                    raise ValueError("base-measure norms need quad or nodes")
                nodes = draw_nodes(space, quad)
            d = apply_part(signed_diffs_at(F, omega, nodes), part)
            sigma_power = space.total_mass * float(np.mean(np.abs(d) ** p))
        omega_power = float(
            np.sum(np.abs(apply_part(own_point_diffs(F, omega), part)) ** p))
    if measure == "sigma":
        return float(sigma_power)
    if measure == "omega":
        return float(omega_power)
    return 0.5 * float(sigma_power) + 0.5 * float(omega_power)


def _sup_norm(space: PointSpace, F: Functional, omega: Configuration,
              measure: str, part: str, quad, nodes) -> float:
    event = F.event
    if event is not None and event.closed is not None:
        forms = event.closed
        member = bool(event.predicate(omega))
        into_member = not member
        sigma_mass = forms.kplus(omega, member=into_member)
        omega_mass = forms.kminus(omega, member=into_member)
        wrong_side = (part == "plus" and not member) or (part == "minus" and member)
        if wrong_side:
            return 0.0
        if measure == "sigma":
            return 1.0 if sigma_mass > 0.0 else 0.0
        if measure == "omega":
            return 1.0 if omega_mass > 0.0 else 0.0
        return 1.0 if sigma_mass + omega_mass > 0.0 else 0.0
    sup = 0.0
    if measure in ("sigma", "sym"):
        if nodes is None:
            if quad is None:
                raise ValueError("base-measure sup norms need quad or nodes")
            nodes = draw_nodes(space, quad)
        d = apply_part(signed_diffs_at(F, omega, nodes), part)
        if d.size:
            sup = max(sup, float(np.max(np.abs(d))))
    if measure in ("omega", "sym"):
        d = apply_part(own_point_diffs(F, omega), part)
        if d.size:
            sup = max(sup, float(np.max(np.abs(d))))
    return sup


def grad_norm(space: PointSpace, F: Functional, omega: Configuration,
              p: float, measure: str = "sigma", part: str = "signed",
              quad: QuadSpec | None = None,
              nodes: np.ndarray | None = None) -> float:
    """Gradient norm of F at a configuration.

    Finite p returns the p-th root of grad_norm_power; p = inf returns the
    (approximate, or exact for indicators with closed forms) essential sup.
    """
    if math.isinf(p):
        return _sup_norm(space, F, omega, measure, part, quad, nodes)
    power = grad_norm_power(space, F, omega, p, measure, part, quad, nodes)
    return float(power ** (1.0 / p))


def _added_values(u: TwoVariableProcess, omega: Configuration,
                  xs: np.ndarray) -> np.ndarray:
    if getattr(u, "evaluate_added", None) is not None:
        out = np.asarray(u.evaluate_added(xs, omega), dtype=float)
    else:
        out = np.array([float(u.evaluate(x, perturb(omega, x, "add")))
                        for x in xs])
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"process {u.label!r} non-finite on added point")
    return out


def _removed_values(u: TwoVariableProcess, omega: Configuration) -> np.ndarray:
    if not len(omega):
        return np.zeros(0)
    if getattr(u, "evaluate_removed", None) is not None:
        out = np.asarray(u.evaluate_removed(omega.points, omega), dtype=float)
    else:
        out = np.array([float(u.evaluate(x, perturb(omega, x, "remove")))
                        for x in omega.points])
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"process {u.label!r} non-finite on removed point")
    return out


def divergence(space: PointSpace, u: TwoVariableProcess, omega: Configuration,
               flavor: str = "sigma", quad: QuadSpec | None = None,
               nodes: np.ndarray | None = None) -> float:
    """Adjoint of the gradient under the base-measure ("sigma") or
    configuration ("omega") pairing.

    sigma: integral of u(x, w) dmeasure - sum over x in w of u(x, w - x);
    omega: sum over x in w of u(x, w) - integral of u(x, w + x) dmeasure.
    """
    if flavor not in ("sigma", "omega"):
        raise ValueError(f"unknown divergence flavor {flavor!r}")
    if nodes is None:
        if quad is None:
            raise ValueError("divergence needs quad or nodes")
        nodes = draw_nodes(space, quad)
    if flavor == "sigma":
        integral = space.total_mass * float(np.mean(u.values(nodes, omega)))
        removed = float(np.sum(_removed_values(u, omega)))
        return integral - removed
    own = float(np.sum(u.values(omega.points, omega))) if len(omega) else 0.0
    integral = space.total_mass * float(np.mean(_added_values(u, omega, nodes)))
    return own - integral


def laplacian(space: PointSpace, F: Functional, omega: Configuration,
              quad: QuadSpec | None = None,
              nodes: np.ndarray | None = None) -> float:
    """Half the divergence of the gradient: half of (integral of the signed
    difference against the base measure plus its sum over the configuration).
    """
    if nodes is None:
        if quad is None:
            raise ValueError("laplacian needs quad or nodes")
        nodes = draw_nodes(space, quad)
    sigma_part = space.total_mass * float(np.mean(signed_diffs_at(F, omega, nodes)))
    omega_part = float(np.sum(own_point_diffs(F, omega)))
    return 0.5 * (sigma_part + omega_part)


def carre_du_champ(space: PointSpace, F: Functional, G: Functional,
                   omega: Configuration, sign: str = "plus",
                   quad: QuadSpec | None = None,
                   nodes: np.ndarray | None = None) -> float:
    """Squared-field operator: half the symmetrized-kernel integral of the
    product of matching signed parts of the differences of F and G."""
    if sign not in ("plus", "minus"):
        raise ValueError(f"unknown sign {sign!r}")
    if nodes is None:
        if quad is None:
            raise ValueError("carre_du_champ needs quad or nodes")
        nodes = draw_nodes(space, quad)
    df_nodes = apply_part(signed_diffs_at(F, omega, nodes), sign)
    dg_nodes = apply_part(signed_diffs_at(G, omega, nodes), sign)
    sigma_part = space.total_mass * float(np.mean(df_nodes * dg_nodes))
    df_own = apply_part(own_point_diffs(F, omega), sign)
    dg_own = apply_part(own_point_diffs(G, omega), sign)
    omega_part = float(np.sum(df_own * dg_own))
    return 0.25 * (sigma_part + omega_part)
