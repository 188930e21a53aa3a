"""Base space: an axis-aligned box carrying a finite diffuse uniform measure.

The measure assigns total_mass to the whole box with constant density, so the
mass of any sub-box is exact (density times volume) and sampling from the
normalized measure is plain uniform sampling. Everything downstream only uses
this surface: sample points, measure sub-boxes, integrate against the measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimates import Estimate


class EvaluationError(ValueError):
    """A functional or integrand produced a non-finite value."""


@dataclass(frozen=True)
class PointSpace:
    dimension: int
    sides: tuple[float, ...]
    total_mass: float

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.sides) != self.dimension:
            raise ValueError("need one side length per dimension")
        if any(s <= 0 for s in self.sides):
            raise ValueError("side lengths must be positive")
        if not (self.total_mass > 0 and math.isfinite(self.total_mass)):
            raise ValueError("total_mass must be positive and finite")

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    @property
    def density(self) -> float:
        return self.total_mass / self.volume

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= 0.0) and np.all(x <= np.asarray(self.sides)))

    def sample_points(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n i.i.d. points with the normalized (uniform) law, shape (n, d)."""
        return rng.random((n, self.dimension)) * np.asarray(self.sides)

    def full_region(self) -> "Region":
        return Region((0.0,) * self.dimension, self.sides)


def build_box_space(dimension: int, side_lengths, total_mass: float) -> PointSpace:
    return PointSpace(dimension, tuple(float(s) for s in side_lengths),
                      float(total_mass))


@dataclass(frozen=True)
class Region:
    """Axis-aligned sub-box, closed on both ends (its boundary has measure 0)."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("corner dimensions differ")
        if any(lo > up for lo, up in zip(self.lower, self.upper)):
            raise ValueError("lower corner must not exceed upper corner")
        object.__setattr__(self, "_lo", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "_up", np.asarray(self.upper, dtype=float))

    @property
    def volume(self) -> float:
        return float(np.prod(self._up - self._lo))

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Boolean mask over an (n, d) array of points."""
        if not (isinstance(pts, np.ndarray) and pts.ndim == 2):
            pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[1] == 1:
            col = pts[:, 0]
            return (col >= self._lo[0]) & (col <= self._up[0])
        return ((pts >= self._lo) & (pts <= self._up)).all(axis=1)


def region_inside(space: PointSpace, region: Region) -> bool:
    return (len(region.lower) == space.dimension
            and all(lo >= 0.0 for lo in region.lower)
            and all(up <= s for up, s in zip(region.upper, space.sides)))


def sigma_measure(space: PointSpace, region: Region) -> float:
    """Exact mass of a sub-box under the space's uniform measure."""
    if not region_inside(space, region):
        raise ValueError("region is not contained in the space")
    return space.density * region.volume


def sample_sigma(space: PointSpace, n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 0:
        raise ValueError("n must be non-negative")
    return space.sample_points(rng, n)


@dataclass(frozen=True)
class QuadSpec:
    """Controls for integrals against the base measure.

    mode "mc" draws nodes from the normalized measure; mode "midpoint" is a
    deterministic midpoint rule, available in dimension 1 only.
    """

    n_sigma_samples: int = 64
    seed: int = 0
    mode: str = "mc"

    def __post_init__(self):
        if self.n_sigma_samples < 1:
            raise ValueError("n_sigma_samples must be >= 1")
        if self.mode not in ("mc", "midpoint"):
            raise ValueError(f"unknown quadrature mode {self.mode!r}")


def draw_nodes(space: PointSpace, quad: QuadSpec,
               rng: np.random.Generator | None = None) -> np.ndarray:
    """Quadrature nodes for one integral, shape (q, d).

    MC nodes come from `rng` when given, else from a generator seeded with
    quad.seed; midpoint nodes are deterministic and require dimension 1.
    """
    q = quad.n_sigma_samples
    if quad.mode == "midpoint":
        if space.dimension != 1:
            raise ValueError("midpoint quadrature is only available for d=1")
        mids = (np.arange(q) + 0.5) / q * space.sides[0]
        return mids[:, None]
    if rng is None:
        rng = np.random.default_rng(quad.seed)
    return space.sample_points(rng, q)


def integrate_sigma(space: PointSpace, f, quad: QuadSpec) -> Estimate:
    """Estimate of the integral of f against the base measure.

    The estimator is total_mass times the node average of f; for MC nodes the
    standard error is reported, for the midpoint rule it is zero (the rule is
    deterministic and its discretization error is not stochastic).
    """
    nodes = draw_nodes(space, quad)
    values = np.array([float(f(x)) for x in nodes])
    bad = ~np.isfinite(values)
    if bad.any():
        where = nodes[int(np.argmax(bad))]
        raise EvaluationError(f"integrand is not finite at point {where.tolist()}")
    mean = space.total_mass * float(values.mean())
    if quad.mode == "midpoint":
        return Estimate(mean, 0.0, len(values))
    sd = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    stderr = space.total_mass * sd / math.sqrt(len(values))
    return Estimate(mean, stderr, len(values))
