"""Characteristic functions, density inversion, and moments by two routes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, NoCompactSupport, NotADensity, OrderTooHigh
from .grid_core import (
    CharFn,
    DensityFunction,
    Grid,
    GridFunction,
    fourier_transform,
    inverse_fourier_transform,
    shifted_inner_products,
)

MAX_DENSITY_ORDER = 12
MAX_CHARFUN_ORDER = 4
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class MomentVector:
    """``E[X^n]`` for ``n = 0..n_max`` plus the scale used to set tolerances."""

    values: tuple[float, ...]
    sigma_ref: float

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise InvalidSpec("a moment vector needs at least E[X^0]")
        if not self.sigma_ref > 0:
            raise InvalidSpec(f"sigma_ref must be positive, got {self.sigma_ref}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values, sigma_ref: float | None = None) -> "MomentVector":
        vals = [float(v) for v in values]
        if sigma_ref is None:
            sigma_ref = standard_deviation(vals)
        return cls(tuple(vals), sigma_ref)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> float:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)

    def tolerances(self, n_max: int | None = None) -> np.ndarray:
        """``tol_n = 1e-8 * sigma**n + 1e-6 * |m_n|`` with this vector as reference."""
        n_max = self.n_max if n_max is None else n_max
        return np.array(
            [moment_tolerance(n, self.sigma_ref, self.values[n]) for n in range(n_max + 1)]
        )


def moment_tolerance(n: int, sigma: float, m_n: float) -> float:
    return 1e-8 * sigma**n + 1e-6 * abs(m_n)


def standard_deviation(values) -> float:
    if len(values) < 3:
        return 1.0
    var = values[2] - values[1] ** 2
    return math.sqrt(var) if var > 0 else 1.0


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------


def autocorrelation_charfun(f: GridFunction, theta_grid: Grid) -> CharFn:
    """``M(theta) = integral conj(f(x)) f(x + theta) dx`` by whole-cell shifts.

    ``theta_grid`` must share the x spacing. Hard zeros meet hard zeros, so
    ``M`` is exactly zero once the shifted supports stop overlapping.
    """
    return CharFn(GridFunction(theta_grid, shifted_inner_products(f, f, theta_grid)))


def density_from_charfun(
    M: CharFn, r_grid: Grid, imag_tol: float = 1e-9, strict: bool = True
) -> DensityFunction:
    """``P(r) = (1/2pi) integral M(theta) exp(-i theta r) d theta``.

    The imaginary residue (relative to ``max|P|``) must not exceed
    ``imag_tol``; it is then discarded. Invariant failures raise
    :class:`NotADensity`.
    """
    raw = fourier_transform(M, r_grid).samples / _SQRT_2PI
    scale = float(np.max(np.abs(raw.real))) or 1.0
    resid = float(np.max(np.abs(raw.imag))) / scale
    if resid > imag_tol:
        raise NotADensity(f"inverted density has imaginary residue {resid:.3e}")
    return DensityFunction.from_values(r_grid, raw.real, strict=strict)


def reconciled_density(
    M: CharFn, direct: DensityFunction, rel_tol: float = 1e-8, strict: bool = True
) -> DensityFunction:
    """Check ``direct`` against the inversion of ``M`` and return ``direct``.

    Inverting ``M`` leaves an absolute roundoff floor near ``1e-17 * max P``
    across the whole r grid, which ``r**8`` weighting turns into moment errors
    far above tolerance. A squared-modulus density ``|F|**2`` has a floor near
    ``1e-34`` and keeps its tails. The two must agree pointwise within
    ``rel_tol * max P``; otherwise :class:`NotADensity` is raised.
    """
    inverted = density_from_charfun(M, direct.grid, strict=False)
    scale = float(np.max(np.abs(direct.values))) or 1.0
    gap = float(np.max(np.abs(inverted.values - direct.values))) / scale
    if gap > rel_tol:
        raise NotADensity(f"density disagrees with its charfun inversion by {gap:.3e}")
    if strict:
        direct.check()
    return direct


def charfun_from_density(P: DensityFunction, theta_grid: Grid, strict: bool = True) -> CharFn:
    """``M(theta) = integral P(r) exp(i theta r) dr``."""
    vals = inverse_fourier_transform(P, theta_grid).samples * _SQRT_2PI
    return CharFn(GridFunction(theta_grid, vals), strict=strict)


def support_extent(M: CharFn, drop_tol: float = 0.0) -> float:
    """Smallest ``theta0`` with ``|M(theta)| <= drop_tol * max|M|`` for all ``|theta| > theta0``.

    The default ``drop_tol = 0`` reads support off the exact zeros that
    shift-based charfuns produce. Charfuns carrying transform roundoff need a
    positive ``drop_tol``.
    """
    mag = np.abs(M.values)
    thresh = drop_tol * float(mag.max())
    above = np.flatnonzero(mag > thresh)
    if above.size == 0:
        return 0.0
    if above[0] == 0 or above[-1] == mag.size - 1:
        raise NoCompactSupport(
            f"|M| exceeds {drop_tol:g} * max|M| at the edge of the theta grid"
        )
    return float(np.max(np.abs(M.grid.points[above])))


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def moments_from_density(P: DensityFunction, n_max: int) -> MomentVector:
    """Trapezoidal ``integral r^n P(r) dr`` for ``n = 0..n_max`` (``n_max <= 12``)."""
    if n_max > MAX_DENSITY_ORDER:
        raise OrderTooHigh(f"density moments are capped at order {MAX_DENSITY_ORDER}")
    r = P.grid.points
    w = P.values * P.grid.dx
    vals = []
    for _ in range(n_max + 1):
        vals.append(float(np.sum(w)))
        w = w * r
    return MomentVector.from_values(vals)


def _central_difference(values: np.ndarray, z: int, n: int, step: int, h: float) -> complex:
    v = lambda k: values[z + k * step]  # noqa: E731
    if n == 0:
        return v(0)
    if n == 1:
        return (v(1) - v(-1)) / (2 * h)
    if n == 2:
        return (v(1) - 2 * v(0) + v(-1)) / h**2
    if n == 3:
        return (v(2) - 2 * v(1) + 2 * v(-1) - v(-2)) / (2 * h**3)
    return (v(2) - 4 * v(1) + 6 * v(0) - 4 * v(-1) + v(-2)) / h**4


def charfun_derivative_at_zero(
    M: CharFn, n: int, base_step: int = 2, levels: int = 4
) -> complex:
    """``d^n M / d theta^n`` at 0 by central differences with Richardson extrapolation.

    Steps are ``base_step * 2**j`` cells for ``j < levels``; each level removes
    the next even power of the step from the error.
    """
    if n > MAX_CHARFUN_ORDER:
        raise OrderTooHigh(f"finite-difference moments are capped at order {MAX_CHARFUN_ORDER}")
    z = M.grid.zero_index
    reach = 2 * base_step * 2 ** (levels - 1)
    if z - reach < 0 or z + reach >= M.grid.n_points:
        raise InvalidSpec("theta grid too short around 0 for the difference stencil")
    dt = M.grid.dx
    table = [
        _central_difference(M.values, z, n, base_step * 2**j, base_step * 2**j * dt)
        for j in range(levels)
    ]
    for lvl in range(1, levels):
        fac = 4.0**lvl
        table = [(fac * table[j] - table[j + 1]) / (fac - 1.0) for j in range(len(table) - 1)]
    return complex(table[0])


def moments_from_charfun(M: CharFn, n_max: int, imag_tol: float = 1e-6) -> MomentVector:
    """``E[X^n] = (1/i)^n d^n M/d theta^n`` at 0 for ``n <= 4``.

    The imaginary residue must stay below ``imag_tol * max(1, |m_n|)``.
    """
    if n_max > MAX_CHARFUN_ORDER:
        raise OrderTooHigh(f"finite-difference moments are capped at order {MAX_CHARFUN_ORDER}")
    vals = []
    for n in range(n_max + 1):
        m = charfun_derivative_at_zero(M, n) * (-1j) ** n
        if abs(m.imag) > imag_tol * max(1.0, abs(m.real)):
            raise ArithmeticError(f"moment {n} has imaginary residue {m.imag:.3e}")
        vals.append(m.real)
    return MomentVector.from_values(vals)
