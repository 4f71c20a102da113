"""Acceptance suite: one pass/fail result per criterion, shared by tests and ``selftest``."""

from __future__ import annotations

import itertools
import math
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .charfun import autocorrelation_charfun, density_from_charfun, support_extent
from .errors import EdgeSupport
from .generators import BumpSpec, DisjointPairSpec, make_bump, make_disjoint_pair
from .grid_core import (
    DensityFunction,
    Grid,
    GridFunction,
    distance,
    fourier_transform,
    inverse_fourier_transform,
)
from .operators import (
    Eigensystem,
    OperatorFamilySpec,
    OperatorSpec,
    build_operator_family,
    check_self_adjoint,
    eigenbasis_density,
    evolve,
    evolve_oracle,
    operator_charfun,
    pair_state,
)
from .stieltjes import (
    StieltjesFamilySpec,
    build_stieltjes_family,
    q_derivatives_at_zero,
    q_from_charfun,
    q_tolerances,
)
from .verify import verify_family, two_path_moment_check

N_POINTS = 4096
ORACLE_POINTS = 1024
HALF_WIDTH = 1.0
LAMBDA = 2.5
BROKEN_LAMBDA = 1.0
EPSILONS = (-1.0, -0.5, 0.0, 0.5, 1.0)
PAIR_HALF_WIDTH = 0.5
GAP = 3.0
BETAS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
GAUGE_C = 0.3
GAUGE_N = 2
N_MAX = 8


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict[str, float] = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        info = ", ".join(f"{k}={v:.3g}" for k, v in self.details.items())
        return f"{status}  {self.number:>2}  {self.title}  [{info}]  ({self.seconds:.2f}s)"


def default_grid(n_points: int = N_POINTS) -> Grid:
    return Grid(-4.0, 4.0, n_points)


@lru_cache(maxsize=None)
def _stieltjes(lam: float):
    spec = StieltjesFamilySpec(BumpSpec(0.0, HALF_WIDTH), lam, 0.0, EPSILONS, N_MAX)
    return build_stieltjes_family(spec, default_grid(), enforce_condition=lam > 2 * HALF_WIDTH)


def _pair_spec() -> DisjointPairSpec:
    return DisjointPairSpec.shifted_copy(BumpSpec(-0.5 * GAP, PAIR_HALF_WIDTH), GAP)


@lru_cache(maxsize=None)
def _operator_family(kind: str):
    op = OperatorSpec.translation() if kind == "translation" else OperatorSpec.gauged(GAUGE_C, GAUGE_N)
    return build_operator_family(OperatorFamilySpec(_pair_spec(), BETAS, op, default_grid(), N_MAX))


def _max_ratio(report) -> float:
    return float(np.max(report.spread_ratios()))


def criterion_1() -> CriterionResult:
    fam = _stieltjes(LAMBDA)
    rep = verify_family(fam.members, N_MAX)
    ok = _max_ratio(rep) <= 1.0 and rep.min_pairwise_L1 >= 1e-3 and rep.confirmed
    return CriterionResult(1, "Stieltjes moment invariance", ok,
                           {"max_spread_over_tol": _max_ratio(rep), "min_L1": rep.min_pairwise_L1})


def criterion_2() -> CriterionResult:
    fam = _stieltjes(LAMBDA)
    M0 = fam.charfun
    theta = M0.grid.points
    beyond = np.abs(theta) > 2 * HALF_WIDTH + M0.grid.dx
    outside = float(np.max(np.abs(M0.values[beyond])))
    extent = support_extent(M0)
    err = abs(extent - 2 * HALF_WIDTH)
    ok = outside == 0.0 and err <= 2 * M0.grid.dx
    return CriterionResult(2, "Finite-extent autocorrelation", ok,
                           {"max_abs_M_outside": outside, "extent": extent, "extent_error": err})


def criterion_3() -> CriterionResult:
    fam = _stieltjes(BROKEN_LAMBDA)
    rep = verify_family(fam.members, N_MAX)
    ratios = rep.spread_ratios()
    n_star = int(np.argmax(ratios))
    qc = q_from_charfun(fam.generator, BROKEN_LAMBDA, 0.0, N_MAX)
    spread = rep.max_moment_spread[n_star]
    mismatch = abs(spread - 2 * abs(qc[n_star]))
    ok = (
        rep.failed_gate == "moment_spread"
        and ratios[n_star] > 1.0
        and mismatch <= rep.tolerances[n_star]
    )
    return CriterionResult(3, "Negative control (lambda < L)", ok,
                           {"gate_order": n_star, "spread_over_tol": ratios[n_star],
                            "charfun_mismatch": mismatch})


def criterion_4() -> CriterionResult:
    good = _stieltjes(LAMBDA)
    q = q_derivatives_at_zero(good.base_density, LAMBDA, 0.0, N_MAX)
    tol = q_tolerances(good.base_density, N_MAX)
    bad = _stieltjes(BROKEN_LAMBDA)
    q0 = q_derivatives_at_zero(bad.base_density, BROKEN_LAMBDA, 0.0, 0)[0]
    tol0 = q_tolerances(bad.base_density, 0)[0]
    m_at = bad.charfun.at(BROKEN_LAMBDA).real
    ok = bool(np.all(np.abs(q) <= tol)) and abs(q0) > 100 * tol0 and abs(abs(q0) - abs(m_at)) <= tol0
    return CriterionResult(4, "Moment-independence condition", ok,
                           {"max_q_over_tol": float(np.max(np.abs(q) / tol)),
                            "control_q0": q0, "Re_M0(1)": m_at})


def criterion_5() -> CriterionResult:
    grid = default_grid()
    f = make_bump(BumpSpec(0.0, HALF_WIDTH), grid)
    a = operator_charfun(OperatorSpec.translation(), f, grid)
    b = autocorrelation_charfun(f, grid)
    err = distance(a.base, b.base, "Linf")
    return CriterionResult(5, "Translation charfun identity", err <= 1e-12, {"Linf": err})


def _operator_criterion(number: int, title: str, kind: str) -> CriterionResult:
    fam = _operator_family(kind)
    rep = verify_family(fam.densities(), N_MAX, family_kind="operator")
    charfuns = [m.charfun for m in fam.members]
    min_linf = min(distance(a.base, b.base, "Linf") for a, b in itertools.combinations(charfuns, 2))
    two_path = max(
        float(np.max(np.abs(np.subtract(m.operator_moments.values, m.density_moments.values))
                     / np.array(rep.tolerances)))
        for m in fam.members
    )
    cross = float(np.max(np.abs(fam.cross_terms[:, [0, 1], [1, 0]])))
    ok = (
        _max_ratio(rep) <= 1.0
        and min_linf >= 1e-2
        and rep.min_pairwise_L1 >= 1e-3
        and rep.confirmed
        and two_path <= 1.0
    )
    if kind == "gauged":
        ok = ok and cross <= 1e-10
    return CriterionResult(number, title, ok,
                           {"max_spread_over_tol": _max_ratio(rep), "min_Linf_M": min_linf,
                            "min_L1_P": rep.min_pairwise_L1, "operator_vs_density": two_path,
                            "max_cross_term": cross})


def criterion_6() -> CriterionResult:
    return _operator_criterion(6, "Operator family, translation", "translation")


def criterion_7() -> CriterionResult:
    return _operator_criterion(7, "Operator family, gauged", "gauged")


def criterion_8() -> CriterionResult:
    grid = default_grid(ORACLE_POINTS)
    f = make_bump(BumpSpec(0.0, HALF_WIDTH), grid)
    worst_flow = 0.0
    for op in (OperatorSpec.translation(), OperatorSpec.gauged(GAUGE_C, GAUGE_N)):
        eig = Eigensystem.of(op, grid)
        for theta in (grid.dx, 0.5, 1.0):
            d = distance(evolve(op, f, theta), evolve_oracle(op, f, theta, eig), "Linf")
            worst_flow = max(worst_flow, d)
    op = OperatorSpec.gauged(GAUGE_C, GAUGE_N)
    big = default_grid()
    g = make_bump(BumpSpec(0.0, HALF_WIDTH), big)
    r = big.reciprocal()
    direct = eigenbasis_density(op, g, r)
    inverted = density_from_charfun(operator_charfun(op, g, big), r)
    third = distance(direct.base, inverted.base, "Linf")
    ok = worst_flow <= 1e-6 and third <= 1e-6
    return CriterionResult(8, "Flow cross-validation", ok,
                           {"flow_vs_oracle": worst_flow, "eigenbasis_vs_inverted": third})


def criterion_9() -> CriterionResult:
    grid = default_grid()
    f1, f2 = make_disjoint_pair(_pair_spec(), grid)
    f = pair_state(f1, f2, 0.3)
    g = make_bump(BumpSpec(0.0, HALF_WIDTH), grid)
    sa = unit = comp = 0.0
    for op in (OperatorSpec.translation(), OperatorSpec.gauged(GAUGE_C, GAUGE_N)):
        sa = max(sa, check_self_adjoint(op, f1, f) / (f1.norm() * f.norm()))
        for theta in (grid.dx, 0.25, 0.5):
            unit = max(unit, abs(evolve(op, f, theta).norm() - f.norm()))
        twice = evolve(op, evolve(op, f, 0.25), 0.5)
        comp = max(comp, distance(twice, evolve(op, f, 0.75), "Linf"))
    r = grid.reciprocal()
    F = fourier_transform(g, r)
    parseval = abs(F.norm() ** 2 - g.norm() ** 2)
    back = inverse_fourier_transform(F, grid)
    roundtrip = distance(back, g, "Linf")
    fam = _stieltjes(LAMBDA)
    tp = two_path_moment_check(fam.base_density, fam.charfun, 4)
    tp_ratio = float(np.max(tp.residuals / tp.tolerances))
    ok = sa <= 1e-9 and unit <= 1e-10 and comp <= 1e-9 and parseval <= 1e-9 and roundtrip <= 1e-9 and tp.passed
    return CriterionResult(9, "Structural suite", ok,
                           {"self_adjoint": sa, "unitarity": unit, "composition": comp,
                            "parseval": parseval, "roundtrip": roundtrip, "two_path_over_tol": tp_ratio})


def criterion_10() -> CriterionResult:
    fam = _operator_family("translation")
    r = fam.spec.rs
    F1 = fourier_transform(fam.f1, r).samples
    base = 2.0 * np.abs(F1) ** 2
    worst = 0.0
    for m in fam.members:
        # the family label beta matches the cosine form at phase -beta (mod 2 pi);
        # the label set is closed under negation, so the two forms give the same family
        alt = (-m.beta) % (2 * math.pi)
        closed = base * (1.0 + np.cos(r.points * GAP + alt))
        worst = max(worst, float(np.max(np.abs(m.density.values - closed))))
    labels = {round(b % (2 * math.pi), 12) for b in BETAS}
    closed_set = labels == {round((-b) % (2 * math.pi), 12) for b in BETAS}
    ok = worst <= 1e-7 and closed_set
    return CriterionResult(10, "Reduction to cosine form", ok, {"max_pointwise": worst})


CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
)


def run_criterion(fn: Callable[[], CriterionResult]) -> CriterionResult:
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("error", EdgeSupport)
        res = fn()
    res.seconds = time.perf_counter() - t0
    return res


def run_all() -> list[CriterionResult]:
    return [run_criterion(fn) for fn in CRITERIA]
