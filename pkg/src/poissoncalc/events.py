"""Measurable sets of configurations: structured families, boundaries,
surface measures and monotonicity probing.

A configuration in A belongs to the inner boundary of A when the symmetrized
one-step kernel gives positive mass to A-complement (some removal exits, or a
positive-measure set of additions exits); the outer boundary is symmetric.
Count events (thresholds on the number of points in a sub-box) carry exact
closed forms for kernel masses, boundary membership and their law; generic
events fall back to exact removal scans plus sampled addition witnesses, which
can only under-report boundaries (a positive witness is conclusive, absence of
one is not).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .configuration import Configuration, count, perturb
from .estimates import Estimate, McSpec
from .functionals import Functional
from .montecarlo import McSample, poisson_batch, run_stream
from .space import PointSpace, QuadSpec, Region, draw_nodes, region_inside

RELATIONS = ("eq", "ge", "le")
_RELATION_ALIASES = {"=": "eq", "==": "eq", "eq": "eq",
                     ">=": "ge", "ge": "ge", "≥": "ge",
                     "<=": "le", "le": "le", "≤": "le"}
BOUNDARY_KINDS = ("inner", "outer", "full")


@dataclass(frozen=True)
class CountEventForms:
    """Exact closed forms for an event of the shape relation(w(B), k).

    kplus(w, member) is the base-measure mass of single additions landing in
    the event (member=True) or its complement; kminus counts removals the same
    way. prob/dprob give the event's exact law and its intensity derivative.
    """

    space: PointSpace
    region: Region
    relation: str
    k: int

    @property
    def region_mass(self) -> float:
        return self.space.density * self.region.volume

    def holds(self, c: int) -> bool:
        if self.relation == "eq":
            return c == self.k
        if self.relation == "ge":
            return c >= self.k
        return c <= self.k

    def count(self, omega: Configuration) -> int:
        return count(omega, self.region)

    def kplus(self, omega: Configuration, member: bool) -> float:
        c = self.count(omega)
        s = self.region_mass
        rest = self.space.total_mass - s
        mass = s * float(self.holds(c + 1)) + rest * float(self.holds(c))
        return mass if member else self.space.total_mass - mass

    def kminus(self, omega: Configuration, member: bool) -> float:
        c = self.count(omega)
        n = len(omega)
        mass = c * float(self.holds(c - 1)) + (n - c) * float(self.holds(c))
        return mass if member else n - mass

    def boundary(self, omega: Configuration, kind: str) -> bool:
        inside = self.holds(self.count(omega))
        if kind == "inner":
            return inside and (self.kplus(omega, member=False)
                               + self.kminus(omega, member=False)) > 0.0
        if kind == "outer":
            return (not inside) and (self.kplus(omega, member=True)
                                     + self.kminus(omega, member=True)) > 0.0
        return self.boundary(omega, "inner") or self.boundary(omega, "outer")

    def crossing_mass(self, omega: Configuration) -> tuple[bool, float]:
        """(membership, symmetrized kernel mass reaching the other side)."""
        c = self.count(omega)
        s = self.region_mass
        h0 = self.holds(c)
        hup = self.holds(c + 1)
        hdn = self.holds(c - 1)
        if h0:
            cross = 0.5 * (s * (not hup) + c * (not hdn))
        else:
            cross = 0.5 * (s * hup + c * hdn)
        return h0, cross

    def prob(self, lam: float) -> float:
        mu = lam * self.region_mass
        if self.relation == "eq":
            return float(stats.poisson.pmf(self.k, mu))
        if self.relation == "ge":
            return float(stats.poisson.sf(self.k - 1, mu))
        return float(stats.poisson.cdf(self.k, mu))

    def dprob(self, lam: float) -> float:
        """Exact derivative of prob with respect to the intensity scale."""
        mu = lam * self.region_mass
        s = self.region_mass
        if self.relation == "eq":
            below = float(stats.poisson.pmf(self.k - 1, mu)) if self.k >= 1 else 0.0
            return s * (below - float(stats.poisson.pmf(self.k, mu)))
        if self.relation == "ge":
            return s * float(stats.poisson.pmf(self.k - 1, mu))
        return -s * float(stats.poisson.pmf(self.k, mu))

    def grad_sigma_integral(self, omega: Configuration, part: str) -> float:
        """Exact integral over the base measure of the chosen signed part of
        the indicator's difference."""
        inside = self.holds(self.count(omega))
        if part == "plus":
            return self.kplus(omega, member=False) if inside else 0.0
        if part == "minus":
            return 0.0 if inside else self.kplus(omega, member=True)
        raise ValueError(f"unknown part {part!r}")


@dataclass(frozen=True)
class EventSet:
    predicate: Callable[[Configuration], bool]
    label: str
    monotone_tag: str = "unknown"  # increasing | decreasing | none | unknown
    closed: CountEventForms | None = None

    def __call__(self, omega: Configuration) -> bool:
        return bool(self.predicate(omega))


def count_event(space: PointSpace, region: Region, relation: str,
                k: int) -> EventSet:
    """Event relation(w(B), k) for a sub-box B, with exact closed forms."""
    if k < 0:
        raise ValueError("threshold k must be a non-negative integer")
    rel = _RELATION_ALIASES.get(relation)
    if rel is None:
        raise ValueError(f"unknown relation {relation!r}")
    if not region_inside(space, region):
        raise ValueError("region is not contained in the space")
    forms = CountEventForms(space, region, rel, int(k))
    tag = {"ge": "increasing", "le": "decreasing", "eq": "none"}[rel]
    symbol = {"ge": ">=", "le": "<=", "eq": "="}[rel]
    label = f"count{tuple(region.lower)}..{tuple(region.upper)}{symbol}{k}"
    return EventSet(lambda omega: forms.holds(forms.count(omega)),
                    label=label, monotone_tag=tag, closed=forms)


def linear_event(f: Callable[[np.ndarray], float], threshold: float,
                 sign: str = "unknown", label: str = "linear") -> EventSet:
    """Event {sum of f over the configuration > threshold}; increasing when
    f >= 0, decreasing when f <= 0 (the declared sign is trusted)."""
    tag = {"+": "increasing", "-": "decreasing"}.get(sign, "unknown")

    def predicate(omega: Configuration) -> bool:
        total = float(np.sum([f(x) for x in omega.points])) if len(omega) else 0.0
        return total > threshold

    return EventSet(predicate, label=f"{label}>{threshold}", monotone_tag=tag)


class ComplementForms:
    """Closed forms of an event complement, delegating to the original."""

    def __init__(self, forms: CountEventForms):
        self._forms = forms
        self.space = forms.space
        self.region = forms.region

    def holds(self, c: int) -> bool:
        return not self._forms.holds(c)

    def count(self, omega: Configuration) -> int:
        return self._forms.count(omega)

    def kplus(self, omega: Configuration, member: bool) -> float:
        return self._forms.kplus(omega, not member)

    def kminus(self, omega: Configuration, member: bool) -> float:
        return self._forms.kminus(omega, not member)

    def boundary(self, omega: Configuration, kind: str) -> bool:
        flipped = {"inner": "outer", "outer": "inner", "full": "full"}[kind]
        return self._forms.boundary(omega, flipped)

    def crossing_mass(self, omega: Configuration) -> tuple[bool, float]:
        member, cross = self._forms.crossing_mass(omega)
        return not member, cross

    def prob(self, lam: float) -> float:
        return 1.0 - self._forms.prob(lam)

    def dprob(self, lam: float) -> float:
        return -self._forms.dprob(lam)

    def grad_sigma_integral(self, omega: Configuration, part: str) -> float:
        flipped = {"plus": "minus", "minus": "plus"}[part]
        return self._forms.grad_sigma_integral(omega, flipped)


def complement(event: EventSet) -> EventSet:
    closed = ComplementForms(event.closed) if event.closed is not None else None
    if event.closed is not None:
        tag = {"ge": "decreasing", "le": "increasing",
               "eq": "none"}[event.closed.relation]
    else:
        # A decreasing forces its complement increasing; the other direction
        # does not hold in general.
        tag = "increasing" if event.monotone_tag == "decreasing" else "unknown"
    return EventSet(lambda omega: not event.predicate(omega),
                    label=f"not({event.label})", monotone_tag=tag,
                    closed=closed)


def full_event(space: PointSpace) -> EventSet:
    big = Region((0.0,) * space.dimension, space.sides)
    return count_event(space, big, "ge", 0)


def empty_event(space: PointSpace) -> EventSet:
    # The always-false predicate; sampled kernel masses into it are exactly 0,
    # so no closed forms are needed.
    return EventSet(lambda omega: False, label="empty", monotone_tag="none",
                    closed=None)


def indicator(event: EventSet) -> Functional:
    """Indicator functional of an event, with vectorized closed differences
    when the event carries count closed forms."""
    closed_diff = None
    if event.closed is not None:
        forms = event.closed

        def closed_diff(omega: Configuration, xs: np.ndarray,
                        direction: str) -> np.ndarray:
            c = forms.count(omega)
            step = 1 if direction == "add" else -1
            in_b = forms.region.contains_points(xs)
            base = float(forms.holds(c))
            changed = float(forms.holds(c + step))
            return np.where(in_b, base - changed, 0.0)

    return Functional(lambda omega: float(event.predicate(omega)),
                      label=f"1[{event.label}]", closed_form_diff=closed_diff,
                      event=event)


def _sampled_kernel_masses(space: PointSpace, omega: Configuration,
                           event: EventSet, member: bool,
                           nodes: np.ndarray) -> tuple[float, float]:
    """(addition mass, removal count) of one-point moves landing in the event
    (member=True) or its complement, additions estimated on the given nodes."""
    if event.closed is not None:
        return (event.closed.kplus(omega, member),
                event.closed.kminus(omega, member))
    hits = 0
    for x in nodes:
        inside = event.predicate(perturb(omega, x, "add"))
        hits += int(inside == member)
    kplus = space.total_mass * hits / len(nodes)
    kminus = 0.0
    for x in omega.points:
        inside = event.predicate(perturb(omega, x, "remove"))
        kminus += float(inside == member)
    return kplus, kminus


def boundary_membership(space: PointSpace, omega: Configuration, A: EventSet,
                        kind: str = "full", quad: QuadSpec | None = None,
                        nodes: np.ndarray | None = None) -> bool:
    """Exact for events with closed forms. Otherwise removal exits are checked
    exactly and addition exits are witnessed on sampled nodes, so a False for
    a generic event is only "no witness found among quad.n_sigma_samples"."""
    if kind not in BOUNDARY_KINDS:
        raise ValueError(f"unknown boundary kind {kind!r}")
    if A.closed is not None:
        return A.closed.boundary(omega, kind)
    if kind == "full":
        return (boundary_membership(space, omega, A, "inner", quad, nodes)
                or boundary_membership(space, omega, A, "outer", quad, nodes))
    if nodes is None:
        if quad is None:
            raise ValueError("generic boundary membership needs quad or nodes")
        nodes = draw_nodes(space, quad)
    member = bool(A.predicate(omega))
    if kind == "inner" and not member:
        return False
    if kind == "outer" and member:
        return False
    kplus, kminus = _sampled_kernel_masses(space, omega, A,
                                           member=(kind == "outer"), nodes=nodes)
    return (kplus + kminus) > 0.0


def interior_membership(space: PointSpace, omega: Configuration, A: EventSet,
                        quad: QuadSpec | None = None,
                        nodes: np.ndarray | None = None) -> bool:
    return bool(A.predicate(omega)) and not boundary_membership(
        space, omega, A, "inner", quad, nodes)


def closure_membership(space: PointSpace, omega: Configuration, A: EventSet,
                       quad: QuadSpec | None = None,
                       nodes: np.ndarray | None = None) -> bool:
    return bool(A.predicate(omega)) or boundary_membership(
        space, omega, A, "outer", quad, nodes)


def _boundary_values(space, omega, A, nodes) -> tuple[float, float]:
    """(inner, outer) surface integrands: indicator times the square root of
    the symmetrized kernel mass across the boundary."""
    member = bool(A.predicate(omega))
    if member:
        kplus, kminus = _sampled_kernel_masses(space, omega, A, False, nodes)
        return float(np.sqrt(0.5 * (kplus + kminus))), 0.0
    kplus, kminus = _sampled_kernel_masses(space, omega, A, True, nodes)
    return 0.0, float(np.sqrt(0.5 * (kplus + kminus)))


def surface_measure(space: PointSpace, A: EventSet, kind: str, lam: float,
                    mc: McSpec, quad: QuadSpec) -> Estimate:
    """Surface measure of the chosen boundary: the mean of the square root of
    the symmetrized kernel mass from the relevant side."""
    if kind not in BOUNDARY_KINDS:
        raise ValueError(f"unknown boundary kind {kind!r}")

    def visit(sample: McSample):
        inner, outer = _boundary_values(space, sample.omega, A, sample.nodes)
        return (inner, outer, inner + outer)

    summary, _ = run_stream(poisson_batch(space, lam, quad.n_sigma_samples),
                            visit, mc, 3)
    index = {"inner": 0, "outer": 1, "full": 2}[kind]
    return summary.estimate(index, mc.ci_level)


def boundary_probability(space: PointSpace, A: EventSet, kind: str, lam: float,
                         mc: McSpec, quad: QuadSpec) -> Estimate:
    """Probability of the chosen boundary under the Poisson law.

    All three boundary indicators are accumulated on one stream, so the full
    estimate is exactly the sum of the inner and outer estimates.
    """
    if kind not in BOUNDARY_KINDS:
        raise ValueError(f"unknown boundary kind {kind!r}")

    def visit(sample: McSample):
        inner = float(boundary_membership(space, sample.omega, A, "inner",
                                          nodes=sample.nodes))
        outer = float(boundary_membership(space, sample.omega, A, "outer",
                                          nodes=sample.nodes))
        return (inner, outer, inner + outer)

    summary, _ = run_stream(poisson_batch(space, lam, quad.n_sigma_samples),
                            visit, mc, 3)
    index = {"inner": 0, "outer": 1, "full": 2}[kind]
    return summary.estimate(index, mc.ci_level)


@dataclass(frozen=True)
class MonotonicityReport:
    label: str
    n_in_event: int
    add_trials: int
    add_violations: int
    remove_trials: int
    remove_violations: int

    @property
    def add_violation_rate(self) -> float:
        return self.add_violations / self.add_trials if self.add_trials else 0.0

    @property
    def remove_violation_rate(self) -> float:
        return (self.remove_violations / self.remove_trials
                if self.remove_trials else 0.0)


def monotonicity_probe(space: PointSpace, A: EventSet, lam: float, mc: McSpec,
                       quad: QuadSpec) -> MonotonicityReport:
    """Sample configurations in A; probe sampled additions against the
    increasing property and all removals against the decreasing property.

    A zero violation rate is consistent with, not proof of, monotonicity.
    """

    def visit(sample: McSample):
        omega = sample.omega
        if not A.predicate(omega):
            return (0.0, 0.0, 0.0, 0.0, 0.0)
        add_bad = sum(0 if A.predicate(perturb(omega, x, "add")) else 1
                      for x in sample.nodes)
        rem_bad = sum(0 if A.predicate(perturb(omega, x, "remove")) else 1
                      for x in omega.points)
        return (1.0, float(len(sample.nodes)), float(add_bad),
                float(len(omega)), float(rem_bad))

    summary, _ = run_stream(poisson_batch(space, lam, quad.n_sigma_samples),
                            visit, mc, 5)
    totals = summary.mean * summary.n
    return MonotonicityReport(A.label, int(round(totals[0])),
                              int(round(totals[1])), int(round(totals[2])),
                              int(round(totals[3])), int(round(totals[4])))
