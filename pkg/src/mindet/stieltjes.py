"""Stieltjes families ``P_eps(x) = P0(x) * (1 + eps * cos(lam*x + phi))``.

``P0 = |F|^2`` for a bump ``f`` whose autocorrelation (the charfun of ``P0``)
vanishes beyond the bump's support width ``L``; any perturbation frequency
``lam > L`` then annihilates every moment of ``P0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .charfun import (
    MAX_DENSITY_ORDER,
    MomentVector,
    autocorrelation_charfun,
    moments_from_density,
    reconciled_density,
    support_extent,
)
from .errors import ConditionViolated, InvalidSpec, LambdaTooSmall, OrderTooHigh
from .generators import BumpSpec, make_bump
from .grid_core import (
    CharFn,
    DensityFunction,
    Grid,
    GridFunction,
    fourier_transform,
    inner_product,
    shift_samples,
    spectral_derivative,
)


@dataclass(frozen=True)
class StieltjesFamilySpec:
    generator: BumpSpec
    lam: float
    phi: float = 0.0
    epsilons: tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0)
    n_max: int = 8

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if not self.epsilons:
            raise InvalidSpec("epsilons must not be empty")
        bad = [e for e in self.epsilons if not abs(e) <= 1.0]
        if bad:
            raise InvalidSpec(f"every epsilon must satisfy |eps| <= 1, got {bad}")
        if not self.lam > 0:
            raise InvalidSpec(f"lambda must be positive, got {self.lam}")
        if not -math.pi <= self.phi <= math.pi:
            raise InvalidSpec(f"phi must lie in [-pi, pi], got {self.phi}")
        if not 0 <= self.n_max <= MAX_DENSITY_ORDER:
            raise InvalidSpec(f"n_max must lie in [0, {MAX_DENSITY_ORDER}], got {self.n_max}")
        cap = self.generator.max_moment_order()
        if cap is not None and self.n_max > cap:
            raise InvalidSpec(
                f"a cosine_power_bump of power {self.generator.power} supports moments "
                f"only up to order {cap}"
            )


@dataclass(frozen=True)
class FiniteExtentReport:
    extent: float
    margin: float
    passed: bool


@dataclass(frozen=True, eq=False)
class StieltjesFamily:
    spec: StieltjesFamilySpec
    generator: GridFunction
    charfun: CharFn
    extent: float
    base_density: DensityFunction
    members: list[tuple[float, DensityFunction]] = field(default_factory=list)

    @property
    def theta_grid(self) -> Grid:
        return self.charfun.grid

    @property
    def r_grid(self) -> Grid:
        return self.base_density.grid


def cosine_perturbation(r: np.ndarray, lam: float, phi: float) -> np.ndarray:
    return np.cos(lam * r + phi)


def verify_finite_extent_condition(M0: CharFn, lam: float) -> FiniteExtentReport:
    """Check ``lam > L`` with a ``2 * d_theta`` margin for discrete support estimation."""
    extent = support_extent(M0)
    margin = lam - extent
    return FiniteExtentReport(extent, margin, margin > 2.0 * M0.grid.dx)


def default_theta_grid(grid: Grid, generator: BumpSpec) -> Grid:
    """The x grid itself when it spans ``[-2W, 2W]`` for support width ``W``."""
    width = 2.0 * generator.half_width
    if grid.x_min <= -2.0 * width and grid.x_max >= 2.0 * width:
        return grid
    half = max(2.0 * width, grid.length / 2)
    n = 1 << math.ceil(math.log2(2.0 * half / grid.dx))
    return Grid(-(n // 2) * grid.dx, (n // 2) * grid.dx, n)


def build_stieltjes_family(
    spec: StieltjesFamilySpec,
    grid: Grid,
    theta_grid: Grid | None = None,
    r_grid: Grid | None = None,
    enforce_condition: bool = True,
) -> StieltjesFamily:
    """bump -> autocorrelation charfun -> ``P0 = |F|^2`` -> perturbed members.

    Members are not renormalized: the perturbation integrates to
    ``Re(exp(i*phi) * M0(lam))``, zero by construction when ``lam > L``.
    With ``enforce_condition=False`` the ``lam > L`` gate and the member
    density invariants are skipped so a broken family can still be
    verified (and fail).
    """
    f = make_bump(spec.generator, grid)
    theta_grid = theta_grid or default_theta_grid(grid, spec.generator)
    M0 = autocorrelation_charfun(f, theta_grid)
    cond = verify_finite_extent_condition(M0, spec.lam)
    if enforce_condition and not cond.passed:
        raise LambdaTooSmall(
            f"lambda={spec.lam} must exceed the charfun extent {cond.extent:.6g} "
            f"by more than 2*d_theta={2 * theta_grid.dx:.3g}"
        )
    r_grid = r_grid or theta_grid.reciprocal()
    F = fourier_transform(f, r_grid)
    P0 = reconciled_density(M0, DensityFunction.from_values(r_grid, np.abs(F.samples) ** 2, strict=False))
    h = cosine_perturbation(r_grid.points, spec.lam, spec.phi)
    members = []
    for eps in spec.epsilons:
        vals = P0.values if eps == 0.0 else P0.values * (1.0 + eps * h)
        members.append((eps, DensityFunction.from_values(r_grid, vals, strict=enforce_condition)))
    return StieltjesFamily(spec, f, M0, cond.extent, P0, members)


def q_derivatives_at_zero(P0: DensityFunction, lam: float, phi: float, n_max: int) -> np.ndarray:
    """``q_n = integral x^n P0(x) cos(lam*x + phi) dx`` for ``n = 0..n_max``.

    These are ``(d/d theta)^n Q`` at 0 up to the factor ``i^n``; all vanish
    exactly when the family's moments are independent of epsilon.
    """
    if n_max > MAX_DENSITY_ORDER:
        raise OrderTooHigh(f"q derivatives are capped at order {MAX_DENSITY_ORDER}")
    r = P0.grid.points
    w = P0.values * cosine_perturbation(r, lam, phi) * P0.grid.dx
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        out[n] = np.sum(w)
        w = w * r
    return out


def q_from_charfun(f: GridFunction, lam: float, phi: float, n_max: int) -> np.ndarray:
    """``Re(exp(i*phi) * (-i)^n * M0^(n)(lam))`` evaluated in the charfun domain.

    ``M0^(n)(theta) = (-1)^a integral conj(f^(a)(x)) f^(n-a)(x + theta) dx``
    with ``a = n // 2``: splitting the derivative keeps each spectral factor
    at order ``<= n_max/2``, where roundoff amplification stays small.
    ``lam`` must be a whole number of cells. Independent of the density
    samples, this cross-checks :func:`q_derivatives_at_zero`.
    """
    if n_max > MAX_DENSITY_ORDER:
        raise OrderTooHigh(f"q derivatives are capped at order {MAX_DENSITY_ORDER}")
    cells = f.grid.offset_cells(f.grid.x_min + lam)
    rot = complex(math.cos(phi), math.sin(phi))
    derivs = [spectral_derivative(f, k, window="support") for k in range(n_max - n_max // 2 + 1)]
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        a = n // 2
        d = (-1) ** a * inner_product(derivs[a], shift_samples(derivs[n - a], cells, strict=False))
        out[n] = (rot * (-1j) ** n * d).real
    return out


def q_tolerances(P0: DensityFunction, n_max: int) -> np.ndarray:
    return moments_from_density(P0, n_max).tolerances()


def build_general_family(
    P0: DensityFunction, h: np.ndarray, epsilons, n_max: int
) -> list[tuple[float, DensityFunction]]:
    """Perturb ``P0`` by an arbitrary real ``h`` with ``|h| <= 1``.

    Unlike the cosine recipe nothing is known about ``h`` in advance, so the
    moment-annihilation integrals ``integral x^n P0 h`` are evaluated and must
    all fall within ``tol_n`` before any member is built.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != P0.values.shape:
        raise InvalidSpec("h must be sampled on the density grid")
    if np.max(np.abs(h)) > 1.0:
        raise InvalidSpec("|h| must not exceed 1")
    bad = [e for e in epsilons if not abs(e) <= 1.0]
    if bad:
        raise InvalidSpec(f"every epsilon must satisfy |eps| <= 1, got {bad}")
    if n_max > MAX_DENSITY_ORDER:
        raise OrderTooHigh(f"q derivatives are capped at order {MAX_DENSITY_ORDER}")
    r = P0.grid.points
    w = P0.values * h * P0.grid.dx
    tol = q_tolerances(P0, n_max)
    for n in range(n_max + 1):
        q = float(np.sum(w))
        if abs(q) > tol[n]:
            raise ConditionViolated(f"integral x^{n} P0 h = {q:.3e} exceeds tol {tol[n]:.3e}")
        w = w * r
    return [
        (float(e), DensityFunction.from_values(P0.grid, P0.values * (1.0 + e * h)))
        for e in epsilons
    ]


def member_moments(family: StieltjesFamily) -> list[MomentVector]:
    return [moments_from_density(P, family.spec.n_max) for _, P in family.members]
