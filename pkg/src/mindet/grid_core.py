"""Uniform periodic grids and the numerical primitives built on them.

A :class:`Grid` samples ``[x_min, x_max)`` at ``n_points`` equally spaced
abscissae ``x_min + k * dx`` with ``dx = (x_max - x_min) / n_points``; the
right endpoint is identified with the left one, so quadrature, discrete
Fourier transforms and spectral derivatives all share periodic semantics.
Every function built by this package vanishes (with all derivatives) well
inside its grid, where that identification is exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal, Sequence

import numpy as np
from scipy import fft as sfft
from scipy.signal import czt

from .errors import (
    EdgeSupport,
    FlowLeavesGrid,
    GridIncompatible,
    GridMismatch,
    InvalidCharFn,
    InvalidSpec,
    NotADensity,
    ThetaOffGrid,
)

DEFAULT_POINTS = 4096
EDGE_TOL = 1e-10
_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    """Uniform sampling of ``[x_min, x_max)``; ``n_points`` is a power of two."""

    x_min: float
    x_max: float
    n_points: int = DEFAULT_POINTS

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise InvalidSpec("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise InvalidSpec(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        n = self.n_points
        if isinstance(n, bool) or int(n) != n or n < 8 or (int(n) & (int(n) - 1)):
            raise InvalidSpec(f"n_points must be a power of two >= 8, got {n}")
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "n_points", int(n))

    @classmethod
    def symmetric(cls, half_extent: float, n_points: int = DEFAULT_POINTS) -> "Grid":
        return cls(-half_extent, half_extent, n_points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def points(self) -> np.ndarray:
        pts = self.x_min + self.dx * np.arange(self.n_points)
        pts.setflags(write=False)
        return pts

    def offset_cells(self, value: float, tol: float = 1e-9) -> int:
        """Return ``k`` with ``value == x_min + k*dx``; may fall outside the grid."""
        k = (value - self.x_min) / self.dx
        kr = round(k)
        if abs(k - kr) > tol:
            raise ThetaOffGrid(f"{value!r} is not a multiple of dx={self.dx!r} from x_min")
        return int(kr)

    def index_of(self, value: float, tol: float = 1e-9) -> int:
        k = self.offset_cells(value, tol)
        if not 0 <= k < self.n_points:
            raise ThetaOffGrid(f"{value!r} lies outside [{self.x_min}, {self.x_max})")
        return k

    @property
    def zero_index(self) -> int:
        return self.index_of(0.0)

    def reciprocal(self) -> "Grid":
        """The DFT-conjugate grid: same size, spacing 2*pi/(n*dx), centred on zero."""
        dk = 2.0 * math.pi / (self.n_points * self.dx)
        half = self.n_points // 2
        return Grid(-half * dk, half * dk, self.n_points)

    def same_spacing(self, other: "Grid", rtol: float = 1e-12) -> bool:
        return abs(self.dx - other.dx) <= rtol * abs(self.dx)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on a :class:`Grid` (read-only array)."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=np.complex128)
        if s.shape != (self.grid.n_points,):
            raise InvalidSpec(
                f"expected {self.grid.n_points} samples, got shape {s.shape}"
            )
        if not np.all(np.isfinite(s)):
            raise InvalidSpec("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_callable(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, func(grid.points))

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n_points))

    def _other(self, other: "GridFunction") -> np.ndarray:
        if other.grid != self.grid:
            raise GridMismatch("operands live on different grids")
        return other.samples

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.samples + self._other(other))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.samples - self._other(other))

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.samples)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            return GridFunction(self.grid, self.samples * self._other(other))
        return GridFunction(self.grid, self.samples * other)

    __rmul__ = __mul__

    def conj(self) -> "GridFunction":
        return GridFunction(self.grid, self.samples.conj())

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.samples) ** 2)) * self.grid.dx)

    def support_indices(self) -> np.ndarray:
        return np.flatnonzero(self.samples)


@dataclass(frozen=True, eq=False)
class DensityFunction:
    """A real, nonnegative, unit-mass :class:`GridFunction`.

    With ``strict=False`` the nonnegativity and normalization invariants are
    recorded rather than enforced, so that deliberately broken families can
    still be carried to the verification report.
    """

    base: GridFunction
    neg_tol: float | None = None
    norm_tol: float = 1e-8
    strict: bool = True

    def __post_init__(self) -> None:
        if np.any(self.base.samples.imag != 0.0):
            raise NotADensity("density samples must be real")
        if self.strict:
            self.check()

    @classmethod
    def from_values(cls, grid: Grid, values, **kwargs) -> "DensityFunction":
        return cls(GridFunction(grid, np.asarray(values, dtype=float)), **kwargs)

    @property
    def grid(self) -> Grid:
        return self.base.grid

    @property
    def values(self) -> np.ndarray:
        return self.base.samples.real

    def integral(self) -> float:
        return float(np.sum(self.values)) * self.grid.dx

    def normalization_error(self) -> float:
        return abs(self.integral() - 1.0)

    def negativity(self) -> float:
        """Most negative sample relative to the largest one (0 when nonnegative)."""
        v = self.values
        peak = float(v.max())
        if peak <= 0.0:
            return -math.inf
        return min(0.0, float(v.min()) / peak)

    def check(self) -> None:
        v = self.values
        peak = float(v.max())
        neg_tol = 1e-12 * peak if self.neg_tol is None else self.neg_tol
        if peak <= 0.0 or v.min() < -neg_tol:
            raise NotADensity(
                f"negative samples: min {v.min():.3e} below -{neg_tol:.3e}"
            )
        err = self.normalization_error()
        if err > self.norm_tol:
            raise NotADensity(f"integral differs from 1 by {err:.3e}")


@dataclass(frozen=True, eq=False)
class CharFn:
    """Characteristic function samples over a theta grid that contains 0."""

    base: GridFunction
    norm_tol: float = 1e-8
    sym_tol: float = 1e-10
    hermitian: bool = True
    strict: bool = True

    def __post_init__(self) -> None:
        try:
            self.grid.zero_index
        except ThetaOffGrid as exc:
            raise InvalidCharFn("theta grid must contain theta=0") from exc
        if self.strict:
            self.check()

    @property
    def grid(self) -> Grid:
        return self.base.grid

    @property
    def values(self) -> np.ndarray:
        return self.base.samples

    def at(self, theta: float) -> complex:
        return complex(self.values[self.grid.index_of(theta)])

    def at_zero(self) -> complex:
        return complex(self.values[self.grid.zero_index])

    def hermitian_residual(self) -> float:
        z = self.grid.zero_index
        span = min(z, self.grid.n_points - 1 - z)
        if span == 0:
            return 0.0
        v = self.values
        left = v[z - span : z][::-1]
        right = v[z + 1 : z + span + 1]
        return float(np.max(np.abs(left - right.conj())))

    def check(self) -> None:
        m0 = self.at_zero()
        if abs(m0 - 1.0) > self.norm_tol:
            raise InvalidCharFn(f"M(0) = {m0} differs from 1")
        peak = float(np.max(np.abs(self.values)))
        if peak > 1.0 + self.norm_tol:
            raise InvalidCharFn(f"|M| reaches {peak}, above 1")
        if self.hermitian:
            res = self.hermitian_residual()
            if res > self.sym_tol:
                raise InvalidCharFn(f"Hermitian symmetry broken by {res:.3e}")


def _as_gridfunction(obj) -> GridFunction:
    if isinstance(obj, GridFunction):
        return obj
    base = getattr(obj, "base", None)
    if isinstance(base, GridFunction):
        return base
    raise TypeError(f"expected a grid function, got {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Quadrature and distances
# ---------------------------------------------------------------------------


def integrate(f) -> complex:
    """Trapezoidal rule over the grid period: ``dx * sum(samples)``."""
    g = _as_gridfunction(f)
    return complex(np.sum(g.samples) * g.grid.dx)


def inner_product(f, g) -> complex:
    """``integral(conj(f) * g)``; conjugate-linear in ``f``."""
    a, b = _as_gridfunction(f), _as_gridfunction(g)
    if a.grid != b.grid:
        raise GridMismatch("inner product of functions on different grids")
    return complex(np.vdot(a.samples, b.samples) * a.grid.dx)


def distance(p, q, metric: Literal["L1", "Linf"] = "L1") -> float:
    a, b = _as_gridfunction(p), _as_gridfunction(q)
    if a.grid != b.grid:
        raise GridMismatch("distance between functions on different grids")
    diff = np.abs(a.samples - b.samples)
    if metric == "L1":
        return float(np.sum(diff)) * a.grid.dx
    if metric == "Linf":
        return float(np.max(diff))
    raise ValueError(f"unknown metric {metric!r}")


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------


def _transform(samples: np.ndarray, src: Grid, tgt: Grid, sign: int) -> np.ndarray:
    # sum_j s_j exp(sign*i*k_m*x_j) dx / sqrt(2 pi) for every target abscissa k_m
    n, m = src.n_points, tgt.n_points
    if m < n:
        raise GridMismatch(f"target grid has {m} points, fewer than the source's {n}")
    prod = src.dx * tgt.dx
    j = np.arange(n)
    pre = samples * np.exp(sign * 1j * tgt.x_min * src.dx * j)
    period = 2.0 * math.pi / prod
    period_int = round(period)
    if abs(period - period_int) <= 1e-9 * period and period_int >= n:
        buf = np.zeros(period_int, dtype=np.complex128)
        buf[:n] = pre
        if sign < 0:
            spec = sfft.fft(buf)
        else:
            spec = sfft.ifft(buf) * period_int
        summed = spec[np.arange(m) % period_int]
    else:
        summed = czt(pre, m=m, w=np.exp(sign * 1j * prod), a=1.0)
    post = np.exp(sign * 1j * tgt.points * src.x_min)
    return summed * post * (src.dx / _SQRT_2PI)


def fourier_transform(f, target_grid: Grid) -> GridFunction:
    """Unitary transform ``F(k) = (2 pi)^(-1/2) * integral f(x) exp(-i k x) dx``.

    Uses an FFT when ``target_grid`` is DFT-reciprocal to the source (spacing
    product ``2*pi/L`` with integer ``L >= n``), a chirp-z transform otherwise.
    """
    g = _as_gridfunction(f)
    return GridFunction(target_grid, _transform(g.samples, g.grid, target_grid, -1))


def inverse_fourier_transform(F, target_grid: Grid) -> GridFunction:
    """``f(x) = (2 pi)^(-1/2) * integral F(k) exp(i k x) dk`` on ``target_grid``."""
    g = _as_gridfunction(F)
    return GridFunction(target_grid, _transform(g.samples, g.grid, target_grid, +1))


# ---------------------------------------------------------------------------
# Spectral differentiation
# ---------------------------------------------------------------------------


def support_components(samples: np.ndarray, edge_tol: float = EDGE_TOL) -> list[tuple[int, int]]:
    """Split the nonzero samples into independently differentiable runs.

    A run of two or more exact zeros always separates components. A single
    zero separates them only when the samples on both sides are negligible
    (``<= edge_tol * max|f|``), so an isolated zero inside a smooth profile
    (e.g. ``x * bump`` at ``x = 0``) does not. Returns inclusive
    ``(first, last)`` index pairs.
    """
    nz = np.flatnonzero(samples)
    if nz.size == 0:
        return []
    mag = np.abs(samples)
    small = edge_tol * float(mag.max())
    comps = []
    start = int(nz[0])
    for b in np.flatnonzero(np.diff(nz) > 1):
        left, right = int(nz[b]), int(nz[b + 1])
        if right - left > 2 or (mag[left] <= small and mag[right] <= small):
            comps.append((start, left))
            start = right
    comps.append((start, int(nz[-1])))
    return comps


def _periodic_derivative(seg: np.ndarray, dx: float, order: int) -> np.ndarray:
    k = 2.0 * math.pi * sfft.fftfreq(seg.size, dx)
    return sfft.ifft((1j * k) ** order * sfft.fft(seg))


def spectral_derivative(
    f, order: int, window: Literal["grid", "support"] = "grid", check_edges: bool = True
) -> GridFunction:
    """``order``-th derivative by multiplying DFT coefficients with ``(ik)^order``.

    ``window="grid"`` differentiates over the whole grid period.
    ``window="support"`` differentiates each support component over its own
    hull, treated as one period; samples outside the support stay exactly
    zero. For functions that vanish smoothly at the ends of their support the
    two agree to discretization accuracy, but the support window does not
    spread roundoff and aliasing error across the grid (which at high orders
    swamps anything living elsewhere on the grid).

    Issues :class:`EdgeSupport` when a window's end samples exceed
    ``1e-10 * max|f|`` (skipped with ``check_edges=False``, e.g. for inputs
    that are themselves derivatives and carry a truncation floor).
    """
    g = _as_gridfunction(f)
    if order < 0 or int(order) != order:
        raise ValueError(f"order must be a non-negative integer, got {order}")
    if order == 0:
        return g
    s = g.samples
    peak = float(np.max(np.abs(s))) if s.size else 0.0
    if peak == 0.0:
        return g
    limit = EDGE_TOL * peak
    if window == "grid":
        if check_edges and max(abs(s[0]), abs(s[-1])) > limit:
            warnings.warn(EdgeSupport("function is not negligible at the grid edge"), stacklevel=2)
        return GridFunction(g.grid, _periodic_derivative(s, g.grid.dx, order))
    if window != "support":
        raise ValueError(f"unknown window {window!r}")
    out = np.zeros_like(s)
    for i0, i1 in support_components(s):
        if check_edges and max(abs(s[i0]), abs(s[i1])) > limit:
            warnings.warn(EdgeSupport(f"support component [{i0}, {i1}] has a hard edge"), stacklevel=2)
        out[i0 : i1 + 1] = _periodic_derivative(s[i0 : i1 + 1], g.grid.dx, order)
    return GridFunction(g.grid, out)


# ---------------------------------------------------------------------------
# Integer shifts
# ---------------------------------------------------------------------------


def shift_samples(f, cells: int, strict: bool = True) -> GridFunction:
    """Samples of ``x -> f(x + cells*dx)``, zero-extended beyond the grid.

    With ``strict`` any nonzero sample that would leave the grid raises
    :class:`FlowLeavesGrid`; otherwise it is dropped.
    """
    g = _as_gridfunction(f)
    n = g.grid.n_points
    s = g.samples
    out = np.zeros_like(s)
    if strict:
        nz = np.flatnonzero(s)
        if nz.size and (nz[0] - cells < 0 or nz[-1] - cells >= n):
            raise FlowLeavesGrid(f"shift by {cells} cells moves support off the grid")
    if cells >= 0:
        if cells < n:
            out[: n - cells] = s[cells:]
    elif -cells < n:
        out[-cells:] = s[: n + cells]
    return GridFunction(g.grid, out)


PhaseFn = Callable[[np.ndarray, float], np.ndarray]


def shifted_inner_products(
    f, g, theta_grid: Grid, phase: PhaseFn | None = None
) -> np.ndarray:
    """``integral conj(f(x)) * g(x + theta) * phase(x, theta) dx`` for each theta.

    ``g`` is zero-extended outside its grid, so shifts that carry it partly
    or wholly off the grid are fine. ``theta_grid`` must share the spacing of
    the x grid and be offset from it by whole cells.
    """
    a, b = _as_gridfunction(f), _as_gridfunction(g)
    if a.grid != b.grid:
        raise GridMismatch("shifted inner product of functions on different grids")
    xg = a.grid
    if not theta_grid.same_spacing(xg):
        raise GridIncompatible(
            f"theta spacing {theta_grid.dx!r} differs from x spacing {xg.dx!r}"
        )
    s0 = round(theta_grid.x_min / xg.dx)
    if abs(theta_grid.x_min / xg.dx - s0) > 1e-9:
        raise ThetaOffGrid("theta grid is not aligned with whole x-grid cells")
    out = np.zeros(theta_grid.n_points, dtype=np.complex128)
    fz, gz = a.support_indices(), b.support_indices()
    if fz.size == 0 or gz.size == 0:
        return out
    fa, fb, ga, gb = int(fz[0]), int(fz[-1]), int(gz[0]), int(gz[-1])
    fs, gs, x = a.samples, b.samples, xg.points
    thetas = theta_grid.points
    for m in range(theta_grid.n_points):
        shift = s0 + m
        lo, hi = max(fa, ga - shift), min(fb, gb - shift)
        if lo > hi:
            continue
        vals = fs[lo : hi + 1].conj() * gs[lo + shift : hi + shift + 1]
        if phase is not None:
            vals = vals * phase(x[lo : hi + 1], float(thetas[m]))
        out[m] = vals.sum() * xg.dx
    return out


def as_samples(obj) -> np.ndarray:
    return _as_gridfunction(obj).samples


__all__: Sequence[str] = [
    "DEFAULT_POINTS",
    "CharFn",
    "DensityFunction",
    "Grid",
    "GridFunction",
    "as_samples",
    "distance",
    "fourier_transform",
    "integrate",
    "inner_product",
    "inverse_fourier_transform",
    "shift_samples",
    "shifted_inner_products",
    "spectral_derivative",
    "support_components",
]
