"""Isoperimetric ratio tables over event families, and the exact-tail witness
showing the log-Sobolev-type boundary ratio has infimum zero.

Each event contributes the ratio of its mean boundary-gradient norm to its
probability. The table minimum is an upper bound for the corresponding
isoperimetric constant; no claim to compute the constant itself is made (it is
an infimum over all events), but every per-event ratio must sit above the
constant's proven lower bound, which the table checks with propagated errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .estimates import Estimate, McSpec
from .events import EventSet, count_event
from .montecarlo import poisson_batch, run_stream
from .space import PointSpace, QuadSpec, Region

VARIANTS = ("plus", "minus", "full", "tilde")


def ratio_lower_bound(p: float, variant: str, total_mass: float) -> float | None:
    """Proven lower bound for the isoperimetric constant matching (p, variant),
    valid per event since each ratio dominates the constant.

    The one-sided constants at p = 1 are half the two-sided one; the tilde
    normalization only enlarges ratios, so the two-sided bounds carry over.
    """
    if math.isinf(p):
        if variant in ("full", "tilde"):
            return max(1.0 / math.sqrt(math.pi * total_mass),
                       1.0 / (2.0 * total_mass))
        return None
    if p == 1:
        if variant in ("full", "tilde"):
            return 0.5
        return 0.25
    if p == 2 and variant in ("full", "tilde"):
        return 1.0 / math.sqrt(2.0 * math.pi)
    return None


@dataclass(frozen=True)
class ProfileRow:
    label: str
    prob: Estimate
    ratio: Estimate | None
    excluded: bool
    exact_prob: float | None
    lower_bound: float | None
    bound_ok: bool | None


@dataclass(frozen=True)
class ProfileTable:
    p: float
    variant: str
    rows: tuple[ProfileRow, ...]
    z: float

    @property
    def family_min(self) -> float:
        included = [r.ratio.mean for r in self.rows if not r.excluded]
        return min(included)

    @property
    def all_bounds_hold(self) -> bool:
        return all(r.bound_ok is not False for r in self.rows)


def _norm_values(space: PointSpace, event: EventSet, omega, nodes,
                 p: float) -> tuple[float, float, float, float]:
    """(membership, plus, minus, full) boundary-gradient norms of the event
    indicator at one configuration.

    For p = 1 the one-sided values are symmetrized to half the two-sided one;
    the exchange identity makes that estimator unbiased and it ties the
    two-sided ratio to exactly twice the one-sided one on a shared stream.
    """
    closed = getattr(event.closed, "crossing_mass", None)
    if closed is not None:
        member, cross = closed(omega)
    else:
        from .events import _sampled_kernel_masses

        member = bool(event.predicate(omega))
        kp, km = _sampled_kernel_masses(space, omega, event, not member, nodes)
        cross = 0.5 * (kp + km)
    if math.isinf(p):
        value = 1.0 if cross > 0.0 else 0.0
    else:
        value = cross ** (1.0 / p)
    plus = value if member else 0.0
    minus = 0.0 if member else value
    if p == 1:
        half = 0.5 * (plus + minus)
        return float(member), half, half, plus + minus
    return float(member), plus, minus, plus + minus


def isoperimetric_profile(space: PointSpace, family, p: float, variant: str,
                          lam: float, mc: McSpec, quad: QuadSpec,
                          z: float = 4.0) -> ProfileTable:
    """Ratio table over an event family, all events on one shared stream.

    Events whose estimated probability CI is not strictly inside (0, 1/2)
    ((0, 1) for the tilde variant) are excluded from the table minimum; an
    error is raised if nothing survives the guard.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    family = list(family)
    if not family:
        raise ValueError("empty event family")
    quad_n = 0 if all(e.closed is not None for e in family) else quad.n_sigma_samples

    def visit(sample):
        out = []
        for event in family:
            out.extend(_norm_values(space, event, sample.omega,
                                    sample.nodes, p))
        return out

    summary, _ = run_stream(poisson_batch(space, lam, quad_n), visit, mc,
                            4 * len(family))
    bound = ratio_lower_bound(p, variant, space.total_mass)
    rows = []
    for i, event in enumerate(family):
        base = 4 * i
        prob = summary.estimate(base, mc.ci_level)
        upper = 0.5 if variant != "tilde" else 1.0
        lo_edge = prob.mean - z * prob.stderr
        hi_edge = prob.mean + z * prob.stderr
        excluded = not (lo_edge > 0.0 and hi_edge < upper)
        exact = event.closed.prob(lam) if event.closed is not None else None
        if excluded:
            rows.append(ProfileRow(event.label, prob, None, True, exact,
                                   bound, None))
            continue
        num_index = base + {"plus": 1, "minus": 2, "full": 3, "tilde": 3}[variant]
        if variant == "tilde":
            num = summary.mean[num_index]
            pm = summary.mean[base]
            den = pm * (1.0 - pm)
            value = num / den
            grad = np.zeros(summary.k)
            grad[num_index] = 1.0 / den
            grad[base] = -num * (1.0 - 2.0 * pm) / den ** 2
            ratio = summary.delta_estimate(value, grad, mc.ci_level)
        else:
            ratio = summary.ratio_estimate(num_index, base, mc.ci_level)
        ok = None
        if bound is not None:
            ok = ratio.mean >= bound - z * ratio.stderr
        rows.append(ProfileRow(event.label, prob, ratio, False, exact, bound, ok))
    if all(r.excluded for r in rows):
        raise ValueError("no event in the family passes the probability guard")
    return ProfileTable(p, variant, tuple(rows), z)


@dataclass(frozen=True)
class LsiWitnessRow:
    k: int
    prob: float
    boundary_prob: float
    ratio: float


@dataclass(frozen=True)
class LsiWitnessReport:
    rows: tuple[LsiWitnessRow, ...]

    @property
    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows]

    @property
    def strictly_decreasing(self) -> bool:
        r = self.ratios
        return all(b < a for a, b in zip(r, r[1:]))


def lsi_constant_witness(space: PointSpace, region: Region, lam: float,
                         k_max: int) -> LsiWitnessReport:
    """Exact-tail table of boundary probability over minus prob times log prob
    for the increasing threshold events {count >= k}, k = 1..k_max.

    The tabulated ratio upper-bounds the log-Sobolev-type boundary constant
    for each k and decreases toward zero, witnessing that the constant
    vanishes. Everything is computed from the exact law, no sampling.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    rows = []
    for k in range(1, k_max + 1):
        event = count_event(space, region, "ge", k)
        forms = event.closed
        prob = forms.prob(lam)
        if not 0.0 < prob < 1.0:
            raise ValueError(f"degenerate event probability at k={k}")
        mu = lam * forms.region_mass
        boundary = float(stats.poisson.pmf(k - 1, mu) + stats.poisson.pmf(k, mu))
        ratio = boundary / (-prob * math.log(prob))
        rows.append(LsiWitnessRow(k, prob, boundary, ratio))
    return LsiWitnessReport(tuple(rows))
