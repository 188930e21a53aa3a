"""Intensity-derivative identities for monotone events and the derived
deviation profile.

The derivative of the event probability in the intensity scale equals the
expected base-measure mass of one-point moves that cross the event boundary;
the finite-difference side is estimated with superposition coupling (the
higher-intensity sample is the lower one plus an independent thinning), which
is exact in law and strongly variance-reduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import apply_part, signed_diffs_at
from .configuration import Configuration
from .estimates import Estimate, McSpec
from .events import EventSet, indicator
from .gaussian import gaussian
from .montecarlo import poisson_batch, run_stream
from .space import PointSpace, QuadSpec


@dataclass(frozen=True)
class MargulisRussoReport:
    event: str
    dlam: float
    deriv_fd: Estimate
    deriv_formula: Estimate
    exact: float | None
    z: float = 4.0

    def agree(self, abs_floor: float = 0.0) -> bool:
        pooled = self.z * math.hypot(self.deriv_fd.stderr,
                                     self.deriv_formula.stderr)
        tol = max(pooled, abs_floor)
        ok = abs(self.deriv_fd.mean - self.deriv_formula.mean) <= tol
        if self.exact is not None:
            ok = ok and abs(self.deriv_fd.mean - self.exact) <= max(
                self.z * self.deriv_fd.stderr, abs_floor)
            ok = ok and abs(self.deriv_formula.mean - self.exact) <= max(
                self.z * self.deriv_formula.stderr, abs_floor)
        return ok


def _coupled_batch(space: PointSpace, lam: float, dlam: float, quad_n: int):
    """Samples (low, increment) with low at intensity lam - dlam and the
    union low + increment at intensity lam + dlam."""
    mu_lo = (lam - dlam) * space.total_mass
    mu_inc = 2.0 * dlam * space.total_mass

    def make(rng: np.random.Generator, n: int):
        lo_counts = rng.poisson(mu_lo, size=n)
        inc_counts = rng.poisson(mu_inc, size=n)
        lo_pool = space.sample_points(rng, int(lo_counts.sum()))
        inc_pool = space.sample_points(rng, int(inc_counts.sum()))
        nodes = space.sample_points(rng, n * quad_n).reshape(
            n, quad_n, space.dimension) if quad_n else None
        lo_off = np.concatenate(([0], np.cumsum(lo_counts)))
        inc_off = np.concatenate(([0], np.cumsum(inc_counts)))
        out = []
        for i in range(n):
            lo_pts = lo_pool[lo_off[i]:lo_off[i + 1]]
            inc_pts = inc_pool[inc_off[i]:inc_off[i + 1]]
            out.append((Configuration(lo_pts),
                        Configuration(np.concatenate([lo_pts, inc_pts])),
                        None if nodes is None else nodes[i]))
        return out

    return make


def margulis_russo(space: PointSpace, A: EventSet, lam: float, dlam: float,
                   mc: McSpec, quad: QuadSpec,
                   z: float = 4.0) -> MargulisRussoReport:
    """Coupled central finite difference of the event probability in the
    intensity, against the gradient-mass formula, plus the exact derivative
    when the event's law is available in closed form.

    Increasing events use the expected base-measure mass of entering
    additions; decreasing events the negated mass of exiting additions.
    """
    if A.monotone_tag not in ("increasing", "decreasing"):
        raise ValueError(f"event {A.label!r} is not tagged monotone")
    if not 0.0 < dlam < lam:
        raise ValueError("need 0 < dlam < lam")
    increasing = A.monotone_tag == "increasing"
    part = "minus" if increasing else "plus"
    sign = 1.0 if increasing else -1.0
    one_a = indicator(A)

    def fd_visit(sample):
        lo, hi, _ = sample
        return ((float(A.predicate(hi)) - float(A.predicate(lo)))
                / (2.0 * dlam),)

    fd_summary, _ = run_stream(_coupled_batch(space, lam, dlam, 0),
                               fd_visit, mc, 1)

    def formula_visit(sample):
        omega, nodes = sample.omega, sample.nodes
        if A.closed is not None:
            value = A.closed.grad_sigma_integral(omega, part)
        else:
            d = apply_part(signed_diffs_at(one_a, omega, nodes), part)
            value = space.total_mass * float(np.mean(d))
        return (sign * value,)

    formula_summary, _ = run_stream(
        poisson_batch(space, lam, quad.n_sigma_samples), formula_visit, mc, 1)
    exact = A.closed.dprob(lam) if A.closed is not None else None
    return MargulisRussoReport(A.label, dlam,
                               fd_summary.estimate(0, mc.ci_level),
                               formula_summary.estimate(0, mc.ci_level),
                               exact, z)


@dataclass(frozen=True)
class DeviationRow:
    lam: float
    prob: float
    bound: float
    direction: str  # "<=", ">=", "~"
    flagged: bool   # observed direction contradicts <= for lam > theta


@dataclass(frozen=True)
class DeviationReport:
    event: str
    theta: float
    delta: float
    rows: tuple[DeviationRow, ...]

    def as_dict(self) -> dict:
        return {"event": self.event, "theta": self.theta, "delta": self.delta,
                "rows": [{"lam": r.lam, "prob": r.prob, "bound": r.bound,
                          "direction": r.direction, "flagged": r.flagged}
                         for r in self.rows]}


def solve_half_level(prob, lo: float = 1e-9, hi: float = 1.0,
                     tol: float = 1e-9, max_expand: int = 60) -> float:
    """Bisection solve of prob(theta) = 1/2 for a monotone prob."""
    p_lo, p_hi = prob(lo), prob(hi)
    increasing = p_hi >= p_lo
    expand = 0
    while ((prob(hi) - 0.5) * (prob(lo) - 0.5)) > 0:
        hi *= 2.0
        expand += 1
        if expand > max_expand:
            raise ValueError("no intensity with event probability 1/2 "
                             "in the search range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        above = prob(mid) > 0.5
        if above == increasing:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def deviation_profile(space: PointSpace, A: EventSet, lam_grid,
                      mc: McSpec | None = None,
                      quad: QuadSpec | None = None,
                      rel_tol: float = 5e-3) -> DeviationReport:
    """Tabulate the event probability against the normal-cdf comparison curve
    built from the half-level intensity theta and the boundary gradient mass.

    For each intensity the observed inequality direction is recorded; rows
    with lam > theta whose observed direction is ">=" are flagged, since the
    direction stated alongside the original bound is "<=" while re-deriving
    the comparison yields the opposite one. The profile reports, it does not
    assert.
    """
    if A.monotone_tag not in ("increasing", "decreasing"):
        raise ValueError(f"event {A.label!r} is not tagged monotone")
    if A.closed is None:
        raise ValueError("deviation profile needs an event with a closed-form "
                         "law (count events)")
    forms = A.closed
    increasing = A.monotone_tag == "increasing"
    delta = forms.region_mass
    theta = solve_half_level(forms.prob)
    rows = []
    for lam in lam_grid:
        prob = forms.prob(lam)
        if increasing:
            arg = math.sqrt(2.0 * lam * delta) - math.sqrt(2.0 * theta * delta)
        else:
            arg = math.sqrt(2.0 * theta * delta) - math.sqrt(2.0 * lam * delta)
        bound = float(gaussian.cdf(arg))
        if abs(prob - bound) <= rel_tol * max(abs(bound), 1e-12):
            direction = "~"
        elif prob <= bound:
            direction = "<="
        else:
            direction = ">="
        flagged = lam > theta and direction == ">="
        rows.append(DeviationRow(float(lam), prob, bound, direction, flagged))
    return DeviationReport(A.label, theta, delta, tuple(rows))
