"""Functional inequality checks: spectral-gap ratios, the Gaussian-type
isoperimetric inequality, the modified logarithmic Sobolev inequality, Orlicz
norms and Cheeger-type relaxations.

The Cheeger checks replace the unknown isoperimetric constants by their proven
lower bounds, which inflates the right-hand side and keeps the inequality in
the testable direction; the substituted bound is recorded in each report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .calculus import grad_norm, grad_norm_power
from .estimates import (Estimate, IdentityReport, McSpec, MomentSummary,
                        verdict_for)
from .functionals import Functional
from .gaussian import gaussian
from .montecarlo import lower_median, poisson_batch, run_stream
from .space import PointSpace, QuadSpec

# Proven lower bounds used by the relaxed Cheeger right-hand sides: the
# two-sided L1 isoperimetric constant is at least 1/2, the one-sided ones at
# least 1/4, and the variance-profile constant at least (1 - 1/sqrt(2)) times
# the one-sided L1 constant.
H1_LOWER = 0.5
K1_PLUS_LOWER = 0.25
BVAR_LOWER = (1.0 - 1.0 / math.sqrt(2.0)) * K1_PLUS_LOWER


@dataclass(frozen=True)
class PoincareReport:
    label: str
    variance: Estimate
    ratio_l2_sigma: Estimate
    ratio_linf: Estimate


def poincare_ratio(space: PointSpace, F: Functional, lam: float, mc: McSpec,
                   quad: QuadSpec) -> PoincareReport:
    """Spectral-gap witnesses: mean squared gradient norms over the variance,
    for the base-measure L2 norm and the symmetrized sup norm."""

    def visit(sample):
        f = F(sample.omega)
        l2 = grad_norm_power(space, F, sample.omega, 2.0, "sigma",
                             nodes=sample.nodes)
        sup = grad_norm(space, F, sample.omega, math.inf, "sym",
                        nodes=sample.nodes)
        return (f, f * f, l2, sup * sup)

    summary, _ = run_stream(poisson_batch(space, lam, quad.n_sigma_samples),
                            visit, mc, 4)
    m1, m2, l2, sup2 = summary.mean
    var = m2 - m1 * m1
    if var <= 0.0:
        raise ValueError(f"functional {F.label!r} has zero sample variance")
    var_est = summary.delta_estimate(var, (-2.0 * m1, 1.0, 0.0, 0.0),
                                     mc.ci_level)

    def ratio_est(num_index):
        num = summary.mean[num_index]
        grad = [2.0 * m1 * num / var ** 2, -num / var ** 2, 0.0, 0.0]
        grad[num_index] = grad[num_index] + 1.0 / var
        return summary.delta_estimate(num / var, grad, mc.ci_level)

    return PoincareReport(F.label, var_est, ratio_est(2), ratio_est(3))


def gaussian_iso_check(space: PointSpace, F: Functional, lam: float,
                       mc: McSpec, quad: QuadSpec,
                       z: float = 4.0) -> IdentityReport:
    """Isoperimetric inequality for [0,1]-valued functionals: the Gaussian
    isoperimetric function of the mean is at most the mean of
    sqrt(iso(F)^2 + 2 * squared base-measure gradient norm)."""

    def visit(sample):
        f = F(sample.omega)
        if not 0.0 <= f <= 1.0:
            raise ValueError(
                f"functional {F.label!r} left [0, 1]: value {f}")
        g2 = grad_norm_power(space, F, sample.omega, 2.0, "sigma",
                             nodes=sample.nodes)
        return (f, math.sqrt(gaussian.iso(f) ** 2 + 2.0 * g2))

    summary, _ = run_stream(poisson_batch(space, lam, quad.n_sigma_samples),
                            visit, mc, 2)
    mean_f = float(summary.mean[0])
    left_value = float(gaussian.iso(mean_f))
    slope = -float(gaussian.quantile(mean_f)) if 0.0 < mean_f < 1.0 else 0.0
    left = summary.delta_estimate(left_value, (slope, 0.0), mc.ci_level)
    right = summary.estimate(1, mc.ci_level)
    diff = Estimate(left.mean - right.mean,
                    math.hypot(left.stderr, right.stderr), summary.n,
                    mc.ci_level)
    return IdentityReport("gaussian_iso", left, right, diff, "le",
                          verdict_for("le", diff, z), z)


def mod_lsi_check(space: PointSpace, F: Functional, lam: float, mc: McSpec,
                  quad: QuadSpec, z: float = 4.0) -> IdentityReport:
    """Modified logarithmic Sobolev inequality for positive functionals:
    Ent(F) at most half the mean of (1/F) times the squared base-measure
    gradient norm."""

    def visit(sample):
        f = F(sample.omega)
        if f <= 0.0:
            raise ValueError(f"functional {F.label!r} must stay positive, "
                             f"got {f}")
        g2 = grad_norm_power(space, F, sample.omega, 2.0, "sigma",
                             nodes=sample.nodes)
        return (f, f * math.log(f), g2 / f)

    summary, _ = run_stream(poisson_batch(space, lam, quad.n_sigma_samples),
                            visit, mc, 3)
    m_f, m_flog, m_w = summary.mean
    ent = m_flog - m_f * math.log(m_f)
    left = summary.delta_estimate(ent, (-(math.log(m_f) + 1.0), 1.0, 0.0),
                                  mc.ci_level)
    right = summary.delta_estimate(0.5 * m_w, (0.0, 0.0, 0.5), mc.ci_level)
    diff = Estimate(left.mean - right.mean,
                    math.hypot(left.stderr, right.stderr), summary.n,
                    mc.ci_level)
    return IdentityReport("mod_lsi", left, right, diff, "le",
                          verdict_for("le", diff, z), z)


@dataclass(frozen=True)
class YoungFunction:
    """Convex even gauge with N(0) = 0 and N > 0 away from 0, plus the
    homogeneity constant sup x N'(x) / N(x)."""

    fn: Callable[[np.ndarray], np.ndarray]
    c_n: float
    label: str = "N"

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    @classmethod
    def power(cls, p: float) -> "YoungFunction":
        if p < 1:
            raise ValueError("power gauge needs p >= 1")
        return cls(lambda x: np.abs(x) ** p, c_n=float(p), label=f"|x|^{p}")

    @classmethod
    def sqrt_shift(cls) -> "YoungFunction":
        # N(x) = sqrt(1 + x^2) - 1 has x N'(x) / N(x) increasing to 2.
        return cls(lambda x: np.sqrt(1.0 + np.square(x)) - 1.0, c_n=2.0,
                   label="sqrt(1+x^2)-1")

    def spot_check(self, grid: np.ndarray | None = None) -> None:
        xs = grid if grid is not None else np.linspace(-8.0, 8.0, 401)
        vals = self(xs)
        if not np.allclose(vals, self(-xs)):
            raise ValueError("gauge is not even")
        mid = 0.5 * (vals[:-2] + vals[2:])
        if np.any(self(0.5 * (xs[:-2] + xs[2:])) > mid + 1e-9):
            raise ValueError("gauge is not convex on the check grid")
        if self(np.array(0.0)) != 0.0:
            raise ValueError("gauge must vanish at 0")


def orlicz_norm_of_samples(values: np.ndarray, young: YoungFunction,
                           tol: float = 1e-9,
                           max_iter: int = 200) -> float:
    """Bisection solve of mean N(values / kappa) = 1 on a fixed sample."""
    values = np.asarray(values, dtype=float)
    if not values.size or not np.any(values != 0.0):
        raise ValueError("Orlicz norm needs a sample that is not all zero")

    def excess(kappa: float) -> float:
        return float(np.mean(young(values / kappa))) - 1.0

    lo, hi = 2.0 ** -30, 2.0 ** 30
    if excess(lo) < 0.0 or excess(hi) > 0.0:
        raise ValueError("no bisection bracket inside [2^-30, 2^30]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, lo):
            break
    return 0.5 * (lo + hi)


def orlicz_norm(space: PointSpace, F: Functional, young: YoungFunction,
                lam: float, mc: McSpec, tol: float = 1e-9) -> float:
    """Gauge norm of F over a fixed seeded sample stream."""
    def visit(sample):
        return (F(sample.omega),)

    _, values = run_stream(poisson_batch(space, lam), visit, mc, 1,
                           collect=True)
    return orlicz_norm_of_samples(values[:, 0], young, tol)


@dataclass(frozen=True)
class CheegerReport:
    mode: str
    left: float
    right: float
    constant_lower_bound: float
    verdict: str
    left_estimate: Estimate | None = None
    right_estimate: Estimate | None = None
    difference: Estimate | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "consistent"


def cheeger_check(space: PointSpace, F: Functional, mode: str, lam: float,
                  mc: McSpec, quad: QuadSpec, p: float = 2.0,
                  young: YoungFunction | None = None,
                  z: float = 4.0) -> CheegerReport:
    """Cheeger-type inequalities for a functional recentred at its empirical
    median.

    mode "power": mean |F|^p against the mean of (p / h1_lower * mixed L1
    gradient norm)^p, paired per sample.
    mode "young": gauge norm of F against (C_N / k_lower) times the gauge norm
    of the mixed gradient norm of order p, both norms on one fixed stream.
    mode "gvar": variance-profile isoperimetry with the optimal constant
    replaced by its lower bound; needs F valued in [0, 1].
    """
    if mode not in ("power", "young", "gvar"):
        raise ValueError(f"unknown cheeger mode {mode!r}")

    grad_p = 1.0 if mode in ("power", "young") else 2.0

    def visit(sample):
        f = F(sample.omega)
        g = grad_norm_power(space, F, sample.omega, 1.0, "sym",
                            nodes=sample.nodes) if grad_p == 1.0 else \
            math.sqrt(grad_norm_power(space, F, sample.omega, 2.0, "sym",
                                      nodes=sample.nodes))
        return (f, g)

    _, values = run_stream(poisson_batch(space, lam, quad.n_sigma_samples),
                           visit, mc, 2, collect=True)
    f_values = values[:, 0]
    g_values = values[:, 1]
    med = lower_median(f_values)
    centered = f_values - med
    if abs(lower_median(centered)) > 1e-12:
        raise ValueError("functional median did not recentre to zero")

    if mode == "power":
        left_vals = np.abs(centered) ** p
        right_vals = (p / H1_LOWER * g_values) ** p
        summary = MomentSummary.from_values(
            np.column_stack([left_vals, right_vals, left_vals - right_vals]))
        left = summary.estimate(0, mc.ci_level)
        right = summary.estimate(1, mc.ci_level)
        diff = summary.estimate(2, mc.ci_level)
        return CheegerReport("power", left.mean, right.mean, H1_LOWER,
                             verdict_for("le", diff, z), left, right, diff)

    if mode == "young":
        gauge = young if young is not None else YoungFunction.power(2.0)
        left = orlicz_norm_of_samples(centered, gauge)
        right = gauge.c_n / K1_PLUS_LOWER * orlicz_norm_of_samples(
            g_values, gauge)
        verdict = "consistent" if left <= right + 1e-9 else "violated"
        return CheegerReport("young", left, right, K1_PLUS_LOWER, verdict)

    # gvar mode: recentring is not applied, the profile needs values in [0,1].
    if np.any((f_values < 0.0) | (f_values > 1.0)):
        raise ValueError("gvar mode needs a [0, 1]-valued functional")
    right_vals = np.sqrt(gaussian.iso_var(f_values) ** 2
                         + np.square(g_values) / BVAR_LOWER)
    summary = MomentSummary.from_values(np.column_stack([f_values, right_vals]))
    mean_f = float(summary.mean[0])
    left_value = float(gaussian.iso_var(mean_f))
    left = summary.delta_estimate(left_value, (1.0 - 2.0 * mean_f, 0.0),
                                  mc.ci_level)
    right = summary.estimate(1, mc.ci_level)
    diff = Estimate(left.mean - right.mean,
                    math.hypot(left.stderr, right.stderr), summary.n,
                    mc.ci_level)
    return CheegerReport("gvar", left.mean, right.mean, BVAR_LOWER,
                         verdict_for("le", diff, z), left, right, diff)
