"""Monte Carlo estimates, run specifications and paired identity reports.

A MomentSummary accumulates per-sample value vectors (count, mean, centered
cross-moment matrix) and merges across shards in a fixed order, so that serial
and parallel executions of the same stream assignment produce bit-identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gaussian import gaussian


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error.

    stderr is the sample standard deviation divided by sqrt(n); the
    confidence interval half-width is z(ci_level) * stderr.
    """

    mean: float
    stderr: float
    n: int
    ci_level: float = 0.95

    def half_width(self) -> float:
        return gaussian.z_value(self.ci_level) * self.stderr

    def ci(self) -> tuple[float, float]:
        h = self.half_width()
        return (self.mean - h, self.mean + h)

    def as_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n,
                "ci_level": self.ci_level}


@dataclass(frozen=True)
class McSpec:
    """Outer Monte Carlo controls: replication count, master seed, CI level.

    n_shards fixes how the stream is split into substreams; it must not change
    between serial and parallel runs for their results to coincide. workers
    only selects how many shards are processed concurrently.
    """

    n_outer: int
    seed: int
    ci_level: float = 0.95
    n_shards: int = 8
    workers: int = 1

    def __post_init__(self):
        if self.n_outer < 2:
            raise ValueError("n_outer must be at least 2")
        if self.n_shards < 1 or self.workers < 1:
            raise ValueError("n_shards and workers must be positive")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must be in (0, 1)")


class MomentSummary:
    """Count, mean vector and centered cross-moment matrix of a value stream.

    Shard results are combined with the pairwise update
    C = C_a + C_b + (n_a n_b / n) * outer(delta, delta); merging always happens
    in shard-index order, which makes the result independent of scheduling.
    """

    __slots__ = ("k", "n", "mean", "comoment")

    def __init__(self, k: int):
        self.k = k
        self.n = 0
        self.mean = np.zeros(k)
        self.comoment = np.zeros((k, k))

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MomentSummary":
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        s = cls(values.shape[1])
        s.n = values.shape[0]
        if s.n:
            s.mean = values.mean(axis=0)
            centered = values - s.mean
            s.comoment = centered.T @ centered
        return s

    def merge(self, other: "MomentSummary") -> "MomentSummary":
        if self.k != other.k:
            raise ValueError("component count mismatch")
        if other.n == 0:
            return self
        if self.n == 0:
            self.n, self.mean, self.comoment = other.n, other.mean, other.comoment
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        self.comoment = (self.comoment + other.comoment
                         + np.outer(delta, delta) * (self.n * other.n / n))
        self.mean = self.mean + delta * (other.n / n)
        self.n = n
        return self

    def covariance(self) -> np.ndarray:
        if self.n < 2:
            raise ValueError("need at least two samples")
        return self.comoment / (self.n - 1)

    def estimate(self, j: int = 0, ci_level: float = 0.95) -> Estimate:
        var = self.covariance()[j, j]
        stderr = float(np.sqrt(max(var, 0.0) / self.n))
        return Estimate(float(self.mean[j]), stderr, self.n, ci_level)

    def delta_estimate(self, value: float, grad: Sequence[float],
                       ci_level: float = 0.95) -> Estimate:
        """First-order (delta method) estimate for a smooth function of the
        component means, evaluated at the sample means with gradient `grad`."""
        g = np.asarray(grad, dtype=float)
        var = float(g @ self.covariance() @ g)
        stderr = float(np.sqrt(max(var, 0.0) / self.n))
        return Estimate(float(value), stderr, self.n, ci_level)

    def ratio_estimate(self, num: int, den: int, ci_level: float = 0.95) -> Estimate:
        d = float(self.mean[den])
        if d == 0.0:
            raise ZeroDivisionError("ratio denominator mean is zero")
        value = float(self.mean[num]) / d
        grad = np.zeros(self.k)
        grad[num] = 1.0 / d
        grad[den] = -value / d
        return self.delta_estimate(value, grad, ci_level)


# Exact-arithmetic slack used when a paired difference has zero sample
# variance (identities that hold pointwise on the shared stream).
EXACT_ATOL = 1e-9


@dataclass(frozen=True)
class IdentityReport:
    """Two paired estimates plus their common-random-numbers difference.

    relation "eq" asserts left = right, "le" asserts left <= right; the
    verdict compares the paired difference against z times its own standard
    error (plus a tiny absolute slack for exactly-matching streams).
    """

    check: str
    left: Estimate
    right: Estimate
    difference: Estimate
    relation: str = "eq"
    verdict: str = "consistent"
    z: float = 4.0
    exact: float | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "consistent"

    def as_dict(self) -> dict:
        d = {"check": self.check, "left": self.left.as_dict(),
             "right": self.right.as_dict(),
             "difference": self.difference.as_dict(),
             "relation": self.relation, "verdict": self.verdict, "z": self.z}
        if self.exact is not None:
            d["exact"] = self.exact
        return d


def verdict_for(relation: str, difference: Estimate, z: float,
                atol: float = EXACT_ATOL) -> str:
    slack = z * difference.stderr + atol
    if relation == "eq":
        ok = abs(difference.mean) <= slack
    elif relation == "le":
        ok = difference.mean <= slack
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return "consistent" if ok else "violated"


def make_report(check: str, summary: MomentSummary, relation: str = "eq",
                z: float = 4.0, ci_level: float = 0.95,
                exact: float | None = None) -> IdentityReport:
    """Build a report from a 3-component summary (left, right, left-right)."""
    left = summary.estimate(0, ci_level)
    right = summary.estimate(1, ci_level)
    diff = summary.estimate(2, ci_level)
    return IdentityReport(check, left, right, diff, relation,
                          verdict_for(relation, diff, z), z, exact)
