"""Finite point configurations and Poisson sampling.

A configuration is an immutable, lexicographically sorted array of distinct
points. Membership tests use exact coordinate equality: samples from a diffuse
measure almost surely produce new points, and perturbations only ever add or
remove exactly stored rows, so no tolerance is needed (and a tolerance would
corrupt the add/remove case split of the finite-difference gradient).
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

from .space import PointSpace, Region


def _canonical(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.size and pts.shape[0] > 1:
        order = np.lexsort(tuple(pts[:, c] for c in range(pts.shape[1] - 1, -1, -1)))
        pts = pts[order]
    pts = np.ascontiguousarray(pts)
    pts.setflags(write=False)
    return pts


class Configuration:
    """Finite set of distinct points, stored as a sorted (n, d) array."""

    __slots__ = ("points", "_region_counts")

    def __init__(self, points: np.ndarray, _canonical_input: bool = False):
        pts = points if _canonical_input else _canonical(points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_region_counts", {})

    def __setattr__(self, name, value):
        raise AttributeError("Configuration is immutable")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Configuration)
                and self.points.shape == other.points.shape
                and bool(np.array_equal(self.points, other.points)))

    def __hash__(self):
        return hash(self.points.tobytes())

    def __repr__(self) -> str:
        return f"Configuration({self.points.tolist()})"

    def member_index(self, x) -> int:
        """Row index of x under exact equality, or -1."""
        if not len(self):
            return -1
        x = np.asarray(x, dtype=float).reshape(-1)
        hits = np.nonzero(np.all(self.points == x, axis=1))[0]
        return int(hits[0]) if hits.size else -1

    def __contains__(self, x) -> bool:
        return self.member_index(x) >= 0

    def to_json_obj(self) -> list:
        return [list(map(float, row)) for row in self.points]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: Iterable) -> "Configuration":
        rows = [tuple(map(float, row)) for row in obj]
        if not rows:
            return cls(np.empty((0, 1)))
        return configuration_from_points(np.asarray(rows, dtype=float))

    @classmethod
    def empty(cls, dimension: int) -> "Configuration":
        return cls(np.empty((0, dimension)))


def configuration_from_points(points) -> Configuration:
    pts = _canonical(points)
    if pts.shape[0] > 1 and np.any(np.all(pts[1:] == pts[:-1], axis=1)):
        raise ValueError("configuration points must be distinct")
    return Configuration(pts, _canonical_input=True)


def sample_configuration(space: PointSpace, lam: float,
                         rng: np.random.Generator) -> Configuration:
    """One draw of the point process with intensity lam times the base measure:
    Poisson(lam * total_mass) many i.i.d. normalized-measure points."""
    if lam < 0:
        raise ValueError("intensity must be non-negative")
    n = int(rng.poisson(lam * space.total_mass))
    return Configuration(space.sample_points(rng, n))


def sample_configurations(space: PointSpace, lam: float,
                          rng: np.random.Generator, n: int) -> list[Configuration]:
    """Pooled batch sampler; same law per draw as sample_configuration."""
    if lam < 0:
        raise ValueError("intensity must be non-negative")
    counts = rng.poisson(lam * space.total_mass, size=n)
    pool = space.sample_points(rng, int(counts.sum()))
    offsets = np.concatenate(([0], np.cumsum(counts)))
    return [Configuration(pool[offsets[i]:offsets[i + 1]]) for i in range(n)]


def perturb(omega: Configuration, x, direction: str) -> Configuration:
    """Neighbor configuration with the point x added or removed."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    idx = omega.member_index(x[0])
    if direction == "add":
        if idx >= 0:
            raise ValueError("cannot add a point already in the configuration")
        return Configuration(np.concatenate([omega.points, x], axis=0))
    if direction == "remove":
        if idx < 0:
            raise ValueError("cannot remove a point absent from the configuration")
        return Configuration(np.delete(omega.points, idx, axis=0),
                             _canonical_input=False)
    raise ValueError(f"unknown direction {direction!r}")


def count(omega: Configuration, region: Region) -> int:
    """Number of configuration points in the region.

    Counts are memoized per configuration keyed on the region object, since
    estimator visits probe the same catalogue regions repeatedly.
    """
    if not omega.points.shape[0]:
        return 0
    cache = omega._region_counts
    key = id(region)
    hit = cache.get(key)
    if hit is None:
        hit = int(region.contains_points(omega.points).sum())
        cache[key] = hit
    return hit
