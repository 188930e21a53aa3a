"""The check catalogue: named suites binding the verifiers to concrete
functionals and events, producing one report row per check.

Every check derives its own seed from the master seed and its identifier, so
checks are independent, reordering-safe and reproducible. Paired checks
compare their two sides under common random numbers; oracle checks compare an
estimate against an exactly computed value.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import clark as clark_mod
from .calculus import carre_du_champ
from .configuration import Configuration
from .estimates import Estimate, McSpec
from .events import (boundary_membership, boundary_probability,
                     complement, count_event, indicator, surface_measure)
from .functionals import (TwoVariableProcess, exp_count, region_count,
                          shift_functional, total_count)
from .identities import coarea_check, verify_identity
from .inequalities import (YoungFunction, cheeger_check, gaussian_iso_check,
                           mod_lsi_check, orlicz_norm, poincare_ratio)
from .intensity import deviation_profile, margulis_russo
from .kernels import kernel_measure, reversibility_check, stationarity_check
from .montecarlo import paired_run, shard_sizes, spawn_shard_rngs
from .profiles import isoperimetric_profile, lsi_constant_witness, ratio_lower_bound
from .reporting import CheckRow
from .runconfig import RunConfig
from .space import Region

DEVIATION_GRID = (1.0, 1.5, 2.0)
LSI_WITNESS_KMAX = 6

# (suite, check id, description). Descriptions name the verified relation in
# plain mathematical terms; n(B) is the point count of a region B, D the
# one-point difference, D+/D- its signed parts.
CHECK_CATALOGUE: tuple[tuple[str, str, str], ...] = (
    ("identities", "exchange_count_level1",
     "mass(X)*E[1{n(X)=1}] equals 2*E[1{n(X)=2}]: plus/minus exchange of the "
     "gradient of a count-level indicator"),
    ("identities", "adjoint_sigma_linear",
     "E[F*div_sigma(u)] equals E[<DF,u>_sigma] for F=n(X), u=1"),
    ("identities", "adjoint_omega_linear",
     "E[F*div_omega(u)] equals E[<DF,u>_omega] for F=n(X), u=1"),
    ("identities", "mecke_minus_count",
     "E[sum over removals of F] equals mass(X)*E[F] for F=n(X)"),
    ("identities", "mecke_plus_count",
     "E[integral of F over additions] equals E[n(X)*F] for F=n(X)"),
    ("identities", "mecke_minus_indicator",
     "removal identity for F=1{n(X)=1}"),
    ("identities", "mecke_plus_indicator",
     "addition identity for F=1{n(X)=1}"),
    ("identities", "mecke_minus_exp",
     "removal identity for F=exp(-n(X))"),
    ("identities", "mecke_plus_exp",
     "addition identity for F=exp(-n(X))"),
    ("identities", "delta_equal_halfcount",
     "the two divergences of the gradient coincide pointwise, F=n([0,1/2])"),
    ("identities", "grad_mean_flip_count",
     "E[integral of DF d(base)] equals -E[sum of DF over points], F=n(X)"),
    ("identities", "dirichlet_equal_halfcount",
     "base-measure and configuration Dirichlet energies agree, F=n([0,1/2])"),
    ("identities", "mean_zero_sigma_uhalf",
     "E[div_sigma(u)] = 0 for u(x,w)=1[0,1/2](x)*n(X)"),
    ("identities", "mean_zero_omega_uhalf",
     "E[div_omega(u)] = 0 for the same u"),
    ("identities", "carre_du_champ_balance",
     "E[Gamma+(F,F)] equals E[Gamma-(F,F)] for F=n([0,1/2])"),
    ("kernels", "reversibility_count",
     "E[F*(forward G)] equals E[G*(backward F)] for F=G=n(X)"),
    ("kernels", "stationarity_eq1",
     "normalized symmetrized kernel preserves the law of {n(X)=1}"),
    ("kernels", "stationarity_half_ge1",
     "normalized symmetrized kernel preserves the law of {n([0,1/2])>=1}"),
    ("kernels", "stationarity_empty",
     "normalized symmetrized kernel preserves the law of {n(X)=0}"),
    ("kernels", "kbar_additivity",
     "symmetrized kernel mass of A plus that of its complement equals "
     "(mass(X)+n(X))/2 pointwise"),
    ("boundaries", "surface_inner_empty",
     "inner surface measure of {n(X)=0} against its exact value"),
    ("boundaries", "surface_full_empty",
     "two-sided surface measure of {n(X)=0} against its exact value"),
    ("boundaries", "boundary_prob_empty",
     "boundary probability of {n(X)=0} against the exact law of {n(X)<=1}"),
    ("boundaries", "boundary_prob_eq1_half",
     "boundary probability of {n([0,1/2])=1} against the exact law"),
    ("boundaries", "boundary_duality",
     "inner boundary of A equals outer boundary of its complement, pointwise"),
    ("boundaries", "interior_closure",
     "closure of A equals the complement of the interior of the complement"),
    ("coarea", "coarea_l1_omega_plus",
     "layer-cake identity for the plus part in the configuration L1 norm, "
     "F=n(X)"),
    ("coarea", "coarea_l1_sigma_plus",
     "layer-cake identity for the plus part in the base-measure L1 norm "
     "(both sides vanish), F=n(X)"),
    ("coarea", "coarea_sup_plus",
     "layer-cake identity for the plus part in the symmetrized sup norm, "
     "F=n(X)"),
    ("margulis_russo", "russo_increasing_ge1",
     "coupled intensity derivative of {n(X)>=1} matches the gradient-mass "
     "formula and the exact derivative"),
    ("margulis_russo", "russo_decreasing_le0",
     "coupled intensity derivative of {n(X)<=0} matches the formula and the "
     "exact derivative"),
    ("deviation", "deviation_ge1_lam1.0",
     "probability of {n(X)>=1} against the normal-cdf comparison curve at "
     "intensity 1.0 (direction reported)"),
    ("deviation", "deviation_ge1_lam1.5",
     "same comparison at intensity 1.5"),
    ("deviation", "deviation_ge1_lam2.0",
     "same comparison at intensity 2.0"),
    ("profiles", "profile_p1_full_bounds",
     "every two-sided L1 boundary ratio in the event family stays above 1/2"),
    ("profiles", "profile_p2_full_bounds",
     "every two-sided L2 (surface over volume) ratio stays above "
     "1/sqrt(2*pi)"),
    ("profiles", "profile_pinf_full_bounds",
     "every boundary-probability ratio stays above "
     "max(1/sqrt(pi*mass), 1/(2*mass))"),
    ("profiles", "profile_p1_full_eq_twice_plus",
     "two-sided L1 ratio equals exactly twice the one-sided ratio on the "
     "shared stream, for every family event"),
    ("profiles", "lsi_witness_decreasing",
     "exact-tail boundary over -p*log(p) ratios of {n(B)>=k} decrease "
     "strictly in k"),
    ("inequalities", "poincare_l2_count",
     "squared base-measure gradient energy over variance equals 1 for F=n(X)"),
    ("inequalities", "poincare_linf_count",
     "squared sup-norm gradient energy over variance equals 1/mass(X) for "
     "F=n(X)"),
    ("inequalities", "gaussian_iso_indicator",
     "Gaussian-profile isoperimetric inequality for the indicator of "
     "{n(X)=0}"),
    ("inequalities", "mod_lsi_exp",
     "modified logarithmic Sobolev inequality for F=exp(n(X))"),
    ("inequalities", "cheeger_power_p2",
     "squared-deviation bound from the relaxed two-sided L1 constant, "
     "F=n(X)-1"),
    ("inequalities", "cheeger_young_square",
     "gauge-norm bound from the relaxed one-sided L1 constant, gauge x^2"),
    ("inequalities", "cheeger_gvar_indicator",
     "variance-profile isoperimetric bound with the relaxed constant, "
     "F=1{n(X)=0}"),
    ("inequalities", "orlicz_square_scaling",
     "gauge norm with x^2 is homogeneous: norm(2F) = 2*norm(F) on a fixed "
     "stream"),
    ("clark", "clark_residual_linear",
     "representation residual vanishes for the terminal count"),
    ("clark", "clark_residual_square_monotone",
     "representation residual for the squared terminal count decreases as "
     "the grid refines"),
    ("clark", "clark_poincare_chain",
     "variance <= projection energy <= difference energy for the terminal "
     "count"),
    ("clark", "clark_martingale_zero",
     "compensated integral of a predictable integrand has mean zero"),
)


def list_checks() -> str:
    lines = []
    suite = None
    for s, check, desc in CHECK_CATALOGUE:
        if s != suite:
            lines.append(f"[{s}]")
            suite = s
        lines.append(f"  {check}: {desc}")
    return "\n".join(lines)


def derive_mc(mc: McSpec, check_id: str) -> McSpec:
    salt = zlib.crc32(check_id.encode("utf-8"))
    seed = int(np.random.SeedSequence((mc.seed, salt)).generate_state(1)[0])
    return replace(mc, seed=seed)


@dataclass(frozen=True)
class RunContext:
    config: RunConfig
    z: float = 4.0

    @property
    def space(self):
        return self.config.space

    @property
    def lam(self):
        return self.config.lam

    @property
    def quad(self):
        return self.config.quad

    def mc_for(self, check_id: str) -> McSpec:
        return derive_mc(self.config.mc, check_id)


def _report_row(suite: str, check: str, inputs: str, rep) -> CheckRow:
    return CheckRow(suite, check, inputs, rep.left.mean, rep.right.mean,
                    rep.difference.stderr, rep.verdict, exact=rep.exact,
                    detail=rep.as_dict())


def _oracle_row(suite: str, check: str, inputs: str, est: Estimate,
                exact: float, z: float) -> CheckRow:
    ok = abs(est.mean - exact) <= z * est.stderr + 1e-9
    return CheckRow(suite, check, inputs, est.mean, exact, est.stderr,
                    "consistent" if ok else "violated", exact=exact,
                    detail={"estimate": est.as_dict()})


def _half_region(ctx: RunContext) -> Region:
    space = ctx.space
    upper = list(space.sides)
    upper[0] = 0.5 * space.sides[0]
    return Region((0.0,) * space.dimension, tuple(upper))


def _u_one() -> TwoVariableProcess:
    ones = lambda xs, omega: np.ones(len(np.atleast_2d(xs)))
    return TwoVariableProcess(lambda x, omega: 1.0, label="1",
                              evaluate_many=ones, evaluate_added=ones,
                              evaluate_removed=ones)


def _u_half_count(ctx: RunContext) -> TwoVariableProcess:
    half = _half_region(ctx)

    def many(xs, omega):
        return half.contains_points(xs) * float(len(omega))

    def added(xs, omega):
        return half.contains_points(xs) * float(len(omega) + 1)

    def removed(xs, omega):
        return half.contains_points(xs) * float(len(omega) - 1)

    return TwoVariableProcess(
        lambda x, omega: float(half.contains_points(x)[0]) * len(omega),
        label="1B*n(X)", evaluate_many=many, evaluate_added=added,
        evaluate_removed=removed)


def run_identities(ctx: RunContext) -> list[CheckRow]:
    space, lam, quad, z = ctx.space, ctx.lam, ctx.quad, ctx.z
    m = space.total_mass
    mu = lam * m
    count_x = total_count(space)
    ind1 = indicator(count_event(space, space.full_region(), "=", 1))
    expneg = exp_count(space, space.full_region(), rate=-1.0,
                       label="exp(-n(X))")
    half_count = region_count(space, _half_region(ctx))
    rows = []

    def ident(check, inputs, exact=None, **kwargs):
        rep = verify_identity(kwargs.pop("identity"), space, lam,
                              ctx.mc_for(check), quad, z=z, exact=exact,
                              label=check, **kwargs)
        rows.append(_report_row("identities", check, inputs, rep))

    ident("exchange_count_level1", "F=1{n(X)=1}, p=1",
          exact=m * float(stats.poisson.pmf(1, mu)),
          identity="exchange", F=ind1, p=1.0)
    ident("adjoint_sigma_linear", "F=n(X), u=1",
          identity="adjoint_sigma", F=count_x, u=_u_one())
    ident("adjoint_omega_linear", "F=n(X), u=1",
          identity="adjoint_omega", F=count_x, u=_u_one())
    ident("mecke_minus_count", "F=n(X)", exact=m * mu,
          identity="mecke_minus", F=count_x)
    ident("mecke_plus_count", "F=n(X)", exact=mu + mu * mu,
          identity="mecke_plus", F=count_x)
    ident("mecke_minus_indicator", "F=1{n(X)=1}",
          exact=m * float(stats.poisson.pmf(1, mu)),
          identity="mecke_minus", F=ind1)
    ident("mecke_plus_indicator", "F=1{n(X)=1}",
          exact=float(stats.poisson.pmf(1, mu)),
          identity="mecke_plus", F=ind1)
    ident("mecke_minus_exp", "F=exp(-n(X))",
          exact=m * math.exp(mu * (math.exp(-1.0) - 1.0)),
          identity="mecke_minus", F=expneg)
    ident("mecke_plus_exp", "F=exp(-n(X))",
          exact=mu * math.exp(-1.0) * math.exp(mu * (math.exp(-1.0) - 1.0)),
          identity="mecke_plus", F=expneg)
    ident("delta_equal_halfcount", "F=n([0,1/2])",
          identity="delta_equal", F=half_count)
    ident("grad_mean_flip_count", "F=n(X)",
          identity="grad_mean_flip", F=count_x)
    ident("dirichlet_equal_halfcount", "F=n([0,1/2])",
          identity="dirichlet_equal", F=half_count)
    ident("mean_zero_sigma_uhalf", "u=1B*n(X)",
          exact=0.0, identity="mean_zero_sigma", u=_u_half_count(ctx))
    ident("mean_zero_omega_uhalf", "u=1B*n(X)",
          exact=0.0, identity="mean_zero_omega", u=_u_half_count(ctx))

    check = "carre_du_champ_balance"
    rep = paired_run(
        check, space, lam, ctx.mc_for(check), quad,
        lambda omega, nodes: carre_du_champ(space, half_count, half_count,
                                            omega, "plus", nodes=nodes),
        lambda omega, nodes: carre_du_champ(space, half_count, half_count,
                                            omega, "minus", nodes=nodes),
        relation="eq", z=z)
    rows.append(_report_row("identities", check, "F=n([0,1/2])", rep))
    return rows


def run_kernels(ctx: RunContext) -> list[CheckRow]:
    space, lam, quad, z = ctx.space, ctx.lam, ctx.quad, ctx.z
    m = space.total_mass
    mu = lam * m
    rows = []
    count_x = total_count(space)
    # E[N*(N+1)]*m and E[N^2*(N-1)] coincide for a Poisson count N.
    exact = m * (mu + mu * mu + mu)
    rep = reversibility_check(space, count_x, count_x, lam,
                              ctx.mc_for("reversibility_count"), quad, z=z,
                              exact=exact)
    rows.append(_report_row("kernels", "reversibility_count", "F=G=n(X)", rep))

    half = _half_region(ctx)
    for check, event in (
            ("stationarity_eq1",
             count_event(space, space.full_region(), "=", 1)),
            ("stationarity_half_ge1", count_event(space, half, ">=", 1)),
            ("stationarity_empty",
             count_event(space, space.full_region(), "=", 0))):
        rep = stationarity_check(space, event, lam, ctx.mc_for(check), quad,
                                 z=z)
        rows.append(_report_row("kernels", check, f"A={event.label}", rep))

    event = count_event(space, space.full_region(), "=", 1)
    comp = complement(event)

    def left(omega, nodes):
        return (kernel_measure(space, omega, event, "symmetrized", nodes=nodes)
                + kernel_measure(space, omega, comp, "symmetrized",
                                 nodes=nodes))

    def right(omega, nodes):
        return 0.5 * (m + len(omega))

    rep = paired_run("kbar_additivity", space, lam,
                     ctx.mc_for("kbar_additivity"), quad, left, right, z=z)
    rows.append(_report_row("kernels", "kbar_additivity",
                            f"A={event.label}", rep))
    return rows


def run_boundaries(ctx: RunContext) -> list[CheckRow]:
    space, lam, quad, z = ctx.space, ctx.lam, ctx.quad, ctx.z
    m = space.total_mass
    mu = lam * m
    rows = []
    empty_cfg = count_event(space, space.full_region(), "=", 0)

    est = surface_measure(space, empty_cfg, "inner", lam,
                          ctx.mc_for("surface_inner_empty"), quad)
    exact = math.sqrt(0.5 * m) * float(stats.poisson.pmf(0, mu))
    rows.append(_oracle_row("boundaries", "surface_inner_empty",
                            "A={n(X)=0}", est, exact, z))

    est = surface_measure(space, empty_cfg, "full", lam,
                          ctx.mc_for("surface_full_empty"), quad)
    exact = (math.sqrt(0.5 * m) * float(stats.poisson.pmf(0, mu))
             + math.sqrt(0.5) * float(stats.poisson.pmf(1, mu)))
    rows.append(_oracle_row("boundaries", "surface_full_empty",
                            "A={n(X)=0}", est, exact, z))

    est = boundary_probability(space, empty_cfg, "full", lam,
                               ctx.mc_for("boundary_prob_empty"), quad)
    exact = float(stats.poisson.cdf(1, mu))
    rows.append(_oracle_row("boundaries", "boundary_prob_empty",
                            "A={n(X)=0}", est, exact, z))

    half_eq1 = count_event(space, _half_region(ctx), "=", 1)
    est = boundary_probability(space, half_eq1, "full", lam,
                               ctx.mc_for("boundary_prob_eq1_half"), quad)
    mu_half = lam * space.density * _half_region(ctx).volume
    exact = float(stats.poisson.cdf(2, mu_half))
    rows.append(_oracle_row("boundaries", "boundary_prob_eq1_half",
                            "A={n([0,1/2])=1}", est, exact, z))

    event = count_event(space, space.full_region(), "=", 1)
    comp = complement(event)

    def dual_left(omega, nodes):
        return float(boundary_membership(space, omega, event, "inner",
                                         nodes=nodes)
                     == boundary_membership(space, omega, comp, "outer",
                                            nodes=nodes))

    rep = paired_run("boundary_duality", space, lam,
                     ctx.mc_for("boundary_duality"), quad, dual_left,
                     lambda omega, nodes: 1.0, z=z)
    rows.append(_report_row("boundaries", "boundary_duality",
                            f"A={event.label}", rep))

    from .events import closure_membership, interior_membership

    def closure_left(omega, nodes):
        direct = closure_membership(space, omega, event, nodes=nodes)
        via_interior = not interior_membership(space, omega, comp, nodes=nodes)
        return float(direct == via_interior)

    rep = paired_run("interior_closure", space, lam,
                     ctx.mc_for("interior_closure"), quad, closure_left,
                     lambda omega, nodes: 1.0, z=z)
    rows.append(_report_row("boundaries", "interior_closure",
                            f"A={event.label}", rep))
    return rows


def run_coarea(ctx: RunContext) -> list[CheckRow]:
    space, lam, quad, z = ctx.space, ctx.lam, ctx.quad, ctx.z
    mu = lam * space.total_mass
    count_x = total_count(space)
    rows = []
    cases = (
        ("coarea_l1_omega_plus", "omega", mu),
        ("coarea_l1_sigma_plus", "sigma", 0.0),
        ("coarea_sup_plus", "sup", -float(math.expm1(-mu))),
    )
    for check, measure, exact in cases:
        rep = coarea_check(space, count_x, 1.0, measure, lam,
                           ctx.mc_for(check), quad, part="plus", z=z,
                           exact=exact)
        rows.append(_report_row("coarea", check,
                                f"F=n(X), measure={measure}", rep))
    return rows


def run_margulis_russo(ctx: RunContext) -> list[CheckRow]:
    space, lam, quad, z = ctx.space, ctx.lam, ctx.quad, ctx.z
    rows = []
    for check, relation, k in (("russo_increasing_ge1", ">=", 1),
                               ("russo_decreasing_le0", "<=", 0)):
        event = count_event(space, space.full_region(), relation, k)
        report = margulis_russo(space, event, lam, 0.05, ctx.mc_for(check),
                                quad, z=z)
        ok = report.agree(abs_floor=0.01)
        pooled = math.hypot(report.deriv_fd.stderr,
                            report.deriv_formula.stderr)
        rows.append(CheckRow(
            "margulis_russo", check, f"A={event.label}, dlam=0.05",
            report.deriv_fd.mean, report.deriv_formula.mean, pooled,
            "consistent" if ok else "violated", exact=report.exact,
            detail={"deriv_fd": report.deriv_fd.as_dict(),
                    "deriv_formula": report.deriv_formula.as_dict(),
                    "exact": report.exact}))
    return rows


def run_deviation(ctx: RunContext) -> list[CheckRow]:
    space = ctx.space
    event = count_event(space, space.full_region(), ">=", 1)
    report = deviation_profile(space, event, DEVIATION_GRID)
    rows = []
    for row in report.rows:
        check = f"deviation_ge1_lam{row.lam}"
        rows.append(CheckRow(
            "deviation", check, f"A={event.label}, theta={report.theta:.6f}",
            row.prob, row.bound, 0.0, "reported", exact=row.prob,
            detail={"theta": report.theta, "delta": report.delta,
                    "direction": row.direction, "flagged": row.flagged}))
    return rows


def run_profiles(ctx: RunContext) -> list[CheckRow]:
    space, lam, quad, z = ctx.space, ctx.lam, ctx.quad, ctx.z
    family = list(ctx.config.events)
    if not family:
        raise ValueError("the profiles suite needs a declared event family")
    rows = []
    tables = {}
    for check, p in (("profile_p1_full_bounds", 1.0),
                     ("profile_p2_full_bounds", 2.0),
                     ("profile_pinf_full_bounds", math.inf)):
        table = isoperimetric_profile(space, family, p, "full", lam,
                                      ctx.mc_for(check), quad, z=z)
        tables[p] = table
        bound = ratio_lower_bound(p, "full", space.total_mass)
        rows.append(CheckRow(
            "profiles", check, f"{len(family)} events, p={p}",
            table.family_min, bound, 0.0,
            "consistent" if table.all_bounds_hold else "violated",
            exact=bound,
            detail={"rows": [{"event": r.label,
                              "prob": None if r.prob is None else r.prob.mean,
                              "ratio": None if r.ratio is None else r.ratio.mean,
                              "stderr": None if r.ratio is None else r.ratio.stderr,
                              "excluded": r.excluded,
                              "exact_prob": r.exact_prob}
                             for r in table.rows]}))

    plus_table = isoperimetric_profile(
        space, family, 1.0, "plus", lam,
        ctx.mc_for("profile_p1_full_bounds"), quad, z=z)
    full_table = tables[1.0]
    max_gap = 0.0
    for fr, pr in zip(full_table.rows, plus_table.rows):
        if fr.excluded or pr.excluded:
            continue
        max_gap = max(max_gap, abs(fr.ratio.mean - 2.0 * pr.ratio.mean))
    rows.append(CheckRow(
        "profiles", "profile_p1_full_eq_twice_plus",
        f"{len(family)} events, p=1", max_gap, 0.0, 0.0,
        "consistent" if max_gap <= 1e-12 else "violated"))

    witness = lsi_constant_witness(space, space.full_region(), lam,
                                   LSI_WITNESS_KMAX)
    rows.append(CheckRow(
        "profiles", "lsi_witness_decreasing",
        f"A_k={{n(X)>=k}}, k=1..{LSI_WITNESS_KMAX}",
        witness.ratios[0], witness.ratios[-1], 0.0,
        "consistent" if witness.strictly_decreasing else "violated",
        detail={"rows": [{"k": r.k, "prob": r.prob,
                          "boundary_prob": r.boundary_prob, "ratio": r.ratio}
                         for r in witness.rows]}))
    return rows


def run_inequalities(ctx: RunContext) -> list[CheckRow]:
    space, lam, quad, z = ctx.space, ctx.lam, ctx.quad, ctx.z
    m = space.total_mass
    rows = []
    count_x = total_count(space)

    report = poincare_ratio(space, count_x, lam,
                            ctx.mc_for("poincare_l2_count"), quad)
    rows.append(_oracle_row("inequalities", "poincare_l2_count", "F=n(X)",
                            report.ratio_l2_sigma, 1.0 / lam, z))
    rows.append(_oracle_row("inequalities", "poincare_linf_count", "F=n(X)",
                            report.ratio_linf, 1.0 / (lam * m), z))

    empty_ind = indicator(count_event(space, space.full_region(), "=", 0))
    rep = gaussian_iso_check(space, empty_ind, lam,
                             ctx.mc_for("gaussian_iso_indicator"), quad, z=z)
    rows.append(_report_row("inequalities", "gaussian_iso_indicator",
                            "F=1{n(X)=0}", rep))

    exp_x = exp_count(space, space.full_region(), rate=1.0, label="exp(n(X))")
    rep = mod_lsi_check(space, exp_x, lam, ctx.mc_for("mod_lsi_exp"), quad,
                        z=z)
    rows.append(_report_row("inequalities", "mod_lsi_exp", "F=exp(n(X))", rep))

    recentred = shift_functional(count_x, lam * m, label="n(X)-mean")
    cheeger = cheeger_check(space, recentred, "power", lam,
                            ctx.mc_for("cheeger_power_p2"), quad, p=2.0, z=z)
    rows.append(CheckRow(
        "inequalities", "cheeger_power_p2", "F=n(X)-1, p=2", cheeger.left,
        cheeger.right,
        cheeger.difference.stderr if cheeger.difference else 0.0,
        cheeger.verdict, detail={"constant_lower_bound":
                                 cheeger.constant_lower_bound}))

    cheeger = cheeger_check(space, recentred, "young", lam,
                            ctx.mc_for("cheeger_young_square"), quad,
                            young=YoungFunction.power(2.0), p=1.0, z=z)
    rows.append(CheckRow(
        "inequalities", "cheeger_young_square", "F=n(X)-1, N=x^2",
        cheeger.left, cheeger.right, 0.0, cheeger.verdict,
        detail={"constant_lower_bound": cheeger.constant_lower_bound}))

    cheeger = cheeger_check(space, empty_ind, "gvar", lam,
                            ctx.mc_for("cheeger_gvar_indicator"), quad, z=z)
    rows.append(CheckRow(
        "inequalities", "cheeger_gvar_indicator", "F=1{n(X)=0}", cheeger.left,
        cheeger.right,
        cheeger.difference.stderr if cheeger.difference else 0.0,
        cheeger.verdict, detail={"constant_lower_bound":
                                 cheeger.constant_lower_bound}))

    gauge = YoungFunction.power(2.0)
    mc_orlicz = ctx.mc_for("orlicz_square_scaling")
    base = orlicz_norm(space, recentred, gauge, lam, mc_orlicz)
    from .functionals import scale_functional

    doubled = orlicz_norm(space, scale_functional(2.0, recentred), gauge, lam,
                          mc_orlicz)
    gap = abs(doubled - 2.0 * base)
    rows.append(CheckRow(
        "inequalities", "orlicz_square_scaling", "F=n(X)-1, N=x^2", doubled,
        2.0 * base, 0.0, "consistent" if gap <= 1e-6 else "violated"))
    return rows


def run_clark(ctx: RunContext) -> list[CheckRow]:
    z = ctx.z
    lam = 1.0  # the representation module works on the unit interval
    grid = clark_mod.PathGrid(32)
    space = clark_mod.UNIT_SPACE
    count_1 = total_count(space)
    mc = derive_mc(ctx.config.mc, "clark_suite")
    mc = replace(mc, n_outer=min(mc.n_outer, 10000))
    rows = []

    residual = clark_mod.clark_residual(
        count_1, lam, mc, grid,
        projection=clark_mod.linear_count_projection(1.0))
    ok = residual.mean <= max(z * residual.stderr, 1e-9)
    rows.append(CheckRow("clark", "clark_residual_linear", "F=N1, m=32",
                         residual.mean, 0.0, residual.stderr,
                         "consistent" if ok else "violated",
                         detail={"residual": residual.as_dict()}))

    square = region_count(space, space.full_region(),
                          transform=lambda c: float(c * c), label="N1^2")
    residuals = []
    for cells in (8, 32, 128):
        est = clark_mod.clark_residual(
            square, lam, replace(mc, seed=mc.seed + cells),
            clark_mod.PathGrid(cells),
            projection=clark_mod.squared_count_projection(lam))
        residuals.append((cells, est))
    monotone = all(
        a[1].mean >= b[1].mean - z * math.hypot(a[1].stderr, b[1].stderr)
        for a, b in zip(residuals, residuals[1:]))
    rows.append(CheckRow(
        "clark", "clark_residual_square_monotone", "F=N1^2, m in {8,32,128}",
        residuals[0][1].mean, residuals[-1][1].mean, residuals[-1][1].stderr,
        "consistent" if monotone else "violated",
        detail={"residuals": {str(c): e.as_dict() for c, e in residuals}}))

    chain = clark_mod.poincare_from_clark(
        count_1, mc, grid, projection=clark_mod.linear_count_projection(1.0),
        lam=lam, z=z)
    rows.append(CheckRow(
        "clark", "clark_poincare_chain", "F=N1, m=32", chain.variance.mean,
        chain.gradient_energy.mean, chain.gradient_energy.stderr,
        "consistent" if chain.holds else "violated",
        detail={"variance": chain.variance.as_dict(),
                "projection_energy": chain.projection_energy.as_dict(),
                "gradient_energy": chain.gradient_energy.as_dict()}))

    integrals = []
    rngs = spawn_shard_rngs(mc.seed, mc.n_shards)
    sizes = shard_sizes(mc.n_outer, mc.n_shards)
    for rng, size in zip(rngs, sizes):
        for _ in range(size):
            n_pts = int(rng.poisson(lam))
            omega = Configuration(rng.random(n_pts)[:, None])
            integrals.append(clark_mod.compensated_integral(
                lambda t, past: float(len(past)), omega, grid, lam))
    integrals = np.asarray(integrals)
    est = Estimate(float(integrals.mean()),
                   float(integrals.std(ddof=1)) / math.sqrt(len(integrals)),
                   len(integrals), mc.ci_level)
    rows.append(_oracle_row("clark", "clark_martingale_zero",
                            "u(t)=N(t-), m=32", est, 0.0, z))
    return rows


SUITE_RUNNERS = {
    "identities": run_identities,
    "kernels": run_kernels,
    "boundaries": run_boundaries,
    "coarea": run_coarea,
    "margulis_russo": run_margulis_russo,
    "deviation": run_deviation,
    "profiles": run_profiles,
    "inequalities": run_inequalities,
    "clark": run_clark,
}


def run_suites(config: RunConfig, z: float = 4.0) -> list[CheckRow]:
    ctx = RunContext(config, z)
    rows: list[CheckRow] = []
    for suite in config.suites:
        rows.extend(SUITE_RUNNERS[suite](ctx))
    return rows
