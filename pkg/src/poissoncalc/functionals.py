"""Real-valued functionals of configurations and two-variable processes.

A Functional wraps an evaluation map and, optionally, a closed form for the
one-point difference F(w) - F(w +/- x). The closed form must be vectorized
over an (n, d) array of points; the generic path rebuilds the perturbed
configuration and re-evaluates, and the two are cross-checked in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

from .configuration import Configuration, count, perturb
from .space import EvaluationError, PointSpace, Region

if TYPE_CHECKING:
    from .events import EventSet

DiffClosedForm = Callable[[Configuration, np.ndarray, str], np.ndarray]


@dataclass(frozen=True)
class Functional:
    evaluate: Callable[[Configuration], float]
    label: str = "F"
    closed_form_diff: DiffClosedForm | None = None
    event: "EventSet | None" = None
    count_region: Region | None = None

    def __call__(self, omega: Configuration) -> float:
        v = float(self.evaluate(omega))
        if not math.isfinite(v):
            raise EvaluationError(
                f"functional {self.label!r} is not finite on {omega!r}")
        return v

    def generic_diff(self, omega: Configuration, x, direction: str) -> float:
        return self(omega) - self(perturb(omega, x, direction))


@dataclass(frozen=True)
class TwoVariableProcess:
    """Map u(x, w) on point-configuration pairs, optionally vectorized in x.

    evaluate_added / evaluate_removed, when given, must return the values
    u(x_i, w + x_i) resp. u(x_i, w - x_i) for an array of probe points; the
    divergence operators fall back to rebuilding perturbed configurations.
    """

    evaluate: Callable[[np.ndarray, Configuration], float]
    label: str = "u"
    evaluate_many: Callable[[np.ndarray, Configuration], np.ndarray] | None = None
    evaluate_added: Callable[[np.ndarray, Configuration], np.ndarray] | None = None
    evaluate_removed: Callable[[np.ndarray, Configuration], np.ndarray] | None = None

    def values(self, xs: np.ndarray, omega: Configuration) -> np.ndarray:
        if self.evaluate_many is not None:
            out = np.asarray(self.evaluate_many(xs, omega), dtype=float)
        else:
            out = np.array([float(self.evaluate(x, omega)) for x in xs])
        if not np.all(np.isfinite(out)):
            where = xs[int(np.argmax(~np.isfinite(out)))]
            raise EvaluationError(
                f"process {self.label!r} is not finite at point {where.tolist()}")
        return out


def constant_functional(c: float) -> Functional:
    value = float(c)
    return Functional(lambda omega: value, label=f"const({c})",
                      closed_form_diff=lambda omega, xs, direction:
                      np.zeros(len(xs)))


def region_count(space: PointSpace, region: Region, transform=None,
                 label: str | None = None) -> Functional:
    """g(w(B)) for a sub-box B; g defaults to the identity.

    The closed-form difference is g(c) - g(c -/+ 1_B(x)), vectorized over the
    probe points.
    """
    g = transform if transform is not None else (lambda c: float(c))

    def evaluate(omega: Configuration) -> float:
        return float(g(count(omega, region)))

    def closed(omega: Configuration, xs: np.ndarray, direction: str) -> np.ndarray:
        c = count(omega, region)
        step = 1 if direction == "add" else -1
        in_b = region.contains_points(xs)
        base = float(g(c))
        changed = float(g(c + step))
        return np.where(in_b, base - changed, 0.0)

    name = label or f"count({region.lower}..{region.upper})"
    if transform is not None and label is None:
        name = f"g({name})"
    return Functional(evaluate, label=name, closed_form_diff=closed,
                      count_region=region if transform is None else None)


def total_count(space: PointSpace) -> Functional:
    return region_count(space, space.full_region(), label="count(X)")


def exp_count(space: PointSpace, region: Region, rate: float = 1.0,
              label: str | None = None) -> Functional:
    return region_count(space, region, transform=lambda c: float(np.exp(rate * c)),
                        label=label or f"exp({rate}*count)")


def linear_sum(f: Callable[[np.ndarray], float], label: str = "sum f",
               f_many: Callable[[np.ndarray], np.ndarray] | None = None) -> Functional:
    """Sum of f over the configuration points; difference is -/+ f(x)."""

    def values(pts: np.ndarray) -> np.ndarray:
        if f_many is not None:
            return np.asarray(f_many(pts), dtype=float)
        return np.array([float(f(p)) for p in pts])

    def evaluate(omega: Configuration) -> float:
        if not len(omega):
            return 0.0
        return float(values(omega.points).sum())

    def closed(omega: Configuration, xs: np.ndarray, direction: str) -> np.ndarray:
        sign = -1.0 if direction == "add" else 1.0
        return sign * values(xs)

    return Functional(evaluate, label=label, closed_form_diff=closed)


def scale_functional(a: float, F: Functional, label: str | None = None) -> Functional:
    closed = None
    if F.closed_form_diff is not None:
        closed = (lambda omega, xs, direction:
                  a * F.closed_form_diff(omega, xs, direction))
    return Functional(lambda omega: a * F.evaluate(omega),
                      label=label or f"{a}*{F.label}", closed_form_diff=closed)


def shift_functional(F: Functional, offset: float,
                     label: str | None = None) -> Functional:
    # Differences are unchanged by constant shifts.
    return Functional(lambda omega: F.evaluate(omega) - offset,
                      label=label or f"{F.label}-{offset}",
                      closed_form_diff=F.closed_form_diff,
                      count_region=None)
