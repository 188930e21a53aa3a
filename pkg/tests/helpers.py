"""Independent oracles for the test suite.

Everything here is computed from first principles with the standard library
(math.exp, math.factorial, math.erf), on purpose not sharing any code path
with the package (which uses numpy/scipy internals), so package results are
checked against a second route.
"""

from __future__ import annotations

import math


def pois_pmf(k: int, mu: float) -> float:
    if k < 0:
        return 0.0
    return math.exp(-mu) * mu ** k / math.factorial(k)


def pois_cdf(k: int, mu: float) -> float:
    return sum(pois_pmf(j, mu) for j in range(k + 1))


def pois_tail(k: int, mu: float) -> float:
    """P(N >= k)."""
    return 1.0 - pois_cdf(k - 1, mu) if k >= 1 else 1.0


def pois_moment(r: int, mu: float, cutoff: float = 1e-18) -> float:
    """Raw moment by direct summation of the mass function."""
    total = 0.0
    k = 0
    pmf = math.exp(-mu)
    while True:
        term = (k ** r) * pmf
        total += term
        k += 1
        pmf *= mu / k
        if pmf < cutoff and k > mu + 10:
            return total


def pois_expect(f, mu: float, cutoff: float = 1e-18) -> float:
    """E[f(N)] by direct summation."""
    total = 0.0
    k = 0
    pmf = math.exp(-mu)
    while True:
        total += f(k) * pmf
        k += 1
        pmf *= mu / k
        if pmf < cutoff and k > mu + 10:
            return total


def norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def norm_quantile(p: float) -> float:
    lo, hi = -12.0, 12.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if norm_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def gauss_iso(t: float) -> float:
    if not 0.0 < t < 1.0:
        return 0.0
    return norm_pdf(norm_quantile(t))


def within(estimate, exact: float, z: float = 4.0, atol: float = 1e-9) -> bool:
    return abs(estimate.mean - exact) <= z * estimate.stderr + atol
