"""Sharded, reproducible Monte Carlo engine.

Stream splitting: the master seed is expanded with
numpy.random.SeedSequence(seed).spawn(n_shards) and shard i owns the i-th
child generator. Shard sizes are fixed by (n_outer, n_shards) alone, shard
results are combined in shard-index order, and workers only control how many
shards run concurrently, so serial and parallel executions of the same spec
produce bit-identical results.

Per sample, a shard draws the configuration first and its quadrature nodes
second; both sides of a paired identity are evaluated on that same draw, so
equalities are compared under common random numbers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .configuration import Configuration
from .estimates import Estimate, IdentityReport, McSpec, MomentSummary, make_report
from .functionals import Functional
from .space import PointSpace, QuadSpec


@dataclass(frozen=True)
class McSample:
    omega: Configuration
    nodes: np.ndarray | None = None


def spawn_shard_rngs(seed: int, n_shards: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(n_shards)
    return [np.random.default_rng(c) for c in children]


def shard_sizes(n: int, n_shards: int) -> list[int]:
    base, extra = divmod(n, n_shards)
    return [base + (1 if i < extra else 0) for i in range(n_shards)]


def poisson_batch(space: PointSpace, lam: float, quad_n: int = 0):
    """Batch factory for i.i.d. Poisson configurations, with optional
    per-sample quadrature nodes drawn right after the configurations."""
    if lam < 0:
        raise ValueError("intensity must be non-negative")
    mu = lam * space.total_mass

    def make(rng: np.random.Generator, n: int) -> list[McSample]:
        counts = rng.poisson(mu, size=n)
        pool = space.sample_points(rng, int(counts.sum()))
        offsets = np.concatenate(([0], np.cumsum(counts)))
        nodes = space.sample_points(rng, n * quad_n).reshape(
            n, quad_n, space.dimension) if quad_n else None
        return [McSample(Configuration(pool[offsets[i]:offsets[i + 1]]),
                         None if nodes is None else nodes[i])
                for i in range(n)]

    return make


def run_stream(make_batch, visit: Callable[[object], Sequence[float]],
               mc: McSpec, k: int,
               collect: bool = False) -> tuple[MomentSummary, np.ndarray | None]:
    """Drive `visit` over a sharded sample stream and summarize its k outputs.

    With collect=True the raw (n_outer, k) value matrix is returned as well,
    concatenated in shard order.
    """
    rngs = spawn_shard_rngs(mc.seed, mc.n_shards)
    sizes = shard_sizes(mc.n_outer, mc.n_shards)

    def run_shard(i: int) -> np.ndarray:
        batch = make_batch(rngs[i], sizes[i])
        out = np.empty((sizes[i], k))
        for j, sample in enumerate(batch):
            out[j, :] = visit(sample)
        return out

    if mc.workers > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            blocks = list(pool.map(run_shard, range(mc.n_shards)))
    else:
        blocks = [run_shard(i) for i in range(mc.n_shards)]

    summary = MomentSummary(k)
    for block in blocks:
        summary.merge(MomentSummary.from_values(block))
    values = np.concatenate(blocks, axis=0) if collect else None
    return summary, values


def expect(space: PointSpace, F: Functional, lam: float, mc: McSpec) -> Estimate:
    """Mean of F under the Poisson law of intensity lam times the base measure."""
    summary, _ = run_stream(poisson_batch(space, lam),
                            lambda s: (F(s.omega),), mc, 1)
    return summary.estimate(0, mc.ci_level)


def collect_values(space: PointSpace, F: Functional, lam: float,
                   mc: McSpec) -> np.ndarray:
    _, values = run_stream(poisson_batch(space, lam),
                           lambda s: (F(s.omega),), mc, 1, collect=True)
    return values[:, 0]


def lower_median(values: np.ndarray) -> float:
    v = np.sort(np.asarray(values, dtype=float))
    if not v.size:
        raise ValueError("median of an empty sample")
    return float(v[(len(v) - 1) // 2])


def median(space: PointSpace, F: Functional, lam: float, mc: McSpec) -> float:
    """Empirical (lower) median of F over the sample stream."""
    return lower_median(collect_values(space, F, lam, mc))


PairSide = Callable[[Configuration, np.ndarray | None], float]


def paired_run(check: str, space: PointSpace, lam: float, mc: McSpec,
               quad: QuadSpec | None, left: PairSide, right: PairSide,
               relation: str = "eq", z: float = 4.0,
               exact: float | None = None) -> IdentityReport:
    """Estimate two sides of an identity or inequality on one shared stream.

    Each sample's quadrature nodes are passed to both sides, so base-measure
    integrals on the two sides cancel their node noise in the difference.
    """
    quad_n = quad.n_sigma_samples if quad is not None else 0

    def visit(sample: McSample):
        l = left(sample.omega, sample.nodes)
        r = right(sample.omega, sample.nodes)
        return (l, r, l - r)

    summary, _ = run_stream(poisson_batch(space, lam, quad_n), visit, mc, 3)
    return make_report(check, summary, relation, z, mc.ci_level, exact)
