"""Forward, backward and symmetrized one-step kernels.

The forward kernel weights the single-point additions of a configuration by
the base measure; the backward kernel counts its single-point removals. Their
average is the symmetrized kernel. Backward sums are always computed exactly
(finite sums over the configuration); forward integrals use quadrature nodes
unless the target event carries closed forms.
"""

from __future__ import annotations

import numpy as np

from .calculus import own_point_diffs, signed_diffs_at
from .configuration import Configuration, perturb
from .estimates import IdentityReport, McSpec
from .events import EventSet
from .functionals import Functional
from .montecarlo import paired_run
from .space import PointSpace, QuadSpec, draw_nodes

DIRECTIONS = ("forward", "backward", "symmetrized")


def kernel_measure(space: PointSpace, omega: Configuration, A: EventSet,
                   direction: str = "forward", quad: QuadSpec | None = None,
                   nodes: np.ndarray | None = None) -> float:
    """Mass the chosen kernel puts on the event A, seen from omega."""
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown kernel direction {direction!r}")
    forward = backward = None
    if direction in ("forward", "symmetrized"):
        if A.closed is not None:
            forward = A.closed.kplus(omega, member=True)
        else:
            if nodes is None:
                if quad is None:
                    raise ValueError("generic forward kernel needs quad or nodes")
                nodes = draw_nodes(space, quad)
            hits = sum(1 for x in nodes if A.predicate(perturb(omega, x, "add")))
            forward = space.total_mass * hits / len(nodes)
    if direction in ("backward", "symmetrized"):
        if A.closed is not None:
            backward = A.closed.kminus(omega, member=True)
        else:
            backward = float(sum(
                1 for x in omega.points if A.predicate(perturb(omega, x, "remove"))))
    if direction == "forward":
        return float(forward)
    if direction == "backward":
        return float(backward)
    return 0.5 * (float(forward) + float(backward))


def apply_kernel(space: PointSpace, F: Functional, omega: Configuration,
                 direction: str = "forward", quad: QuadSpec | None = None,
                 nodes: np.ndarray | None = None) -> float:
    """Kernel applied to a functional: forward integrates F over single-point
    additions, backward sums F over single-point removals.

    Both reduce to F(omega) minus the finite difference, so vectorized closed
    differences keep this exact for functionals that provide them.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown kernel direction {direction!r}")
    forward = backward = None
    base = F(omega)
    if direction in ("forward", "symmetrized"):
        if nodes is None:
            if quad is None:
                raise ValueError("forward kernel application needs quad or nodes")
            nodes = draw_nodes(space, quad)
        d = signed_diffs_at(F, omega, nodes)
        forward = space.total_mass * float(np.mean(base - d))
    if direction in ("backward", "symmetrized"):
        d = own_point_diffs(F, omega)
        backward = len(omega) * base - float(np.sum(d))
    if direction == "forward":
        return float(forward)
    if direction == "backward":
        return float(backward)
    return 0.5 * (float(forward) + float(backward))


def reversibility_check(space: PointSpace, F: Functional, G: Functional,
                        lam: float, mc: McSpec, quad: QuadSpec,
                        z: float = 4.0,
                        exact: float | None = None) -> IdentityReport:
    """Mutual adjointness of the forward and backward kernels under the
    Poisson law: E[F * (forward G)] against E[G * (backward F)], both sides
    estimated on the same configuration stream."""

    def left(omega, nodes):
        return F(omega) * apply_kernel(space, G, omega, "forward", nodes=nodes)

    def right(omega, nodes):
        return G(omega) * apply_kernel(space, F, omega, "backward")

    return paired_run("reversibility", space, lam, mc, quad, left, right,
                      relation="eq", z=z, exact=exact)


def stationarity_check(space: PointSpace, A: EventSet, lam: float, mc: McSpec,
                       quad: QuadSpec, z: float = 4.0) -> IdentityReport:
    """Invariance of the Poisson law under the normalized symmetrized kernel.

    The kernel is normalized by the mass plus the point count of the *target*
    configuration (one more point after an addition, one less after a
    removal); normalizing by the source configuration does not preserve the
    law. The left side applies the normalized kernel to the event indicator,
    the right side is the plain event probability, on a shared stream.
    """
    m = space.total_mass

    def left(omega, nodes):
        n = len(omega)
        if A.closed is not None:
            forward = A.closed.kplus(omega, member=True)
            backward = A.closed.kminus(omega, member=True)
        else:
            forward = kernel_measure(space, omega, A, "forward", nodes=nodes)
            backward = kernel_measure(space, omega, A, "backward")
        fwd = forward * 2.0 / (m + n + 1)
        bwd = backward * 2.0 / (m + n - 1) if n else 0.0
        return 0.5 * (fwd + bwd)

    def right(omega, nodes):
        return float(A.predicate(omega))

    exact = A.closed.prob(lam) if A.closed is not None else None
    return paired_run(f"stationarity[{A.label}]", space, lam, mc, quad,
                      left, right, relation="eq", z=z, exact=exact)
