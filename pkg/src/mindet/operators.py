"""Self-adjoint operators, their unitary flows, and operator-built density families.

Two operators are supported:

* ``translation``: ``A = -i d/dx`` with flow ``f(x) -> f(x + theta)``;
* ``gauged``: ``A = -i d/dx + c(n+1) x^n``, whose flow (solved along
  characteristics of ``du/dtheta = iAu``) is
  ``f(x + theta) * exp(i c [(x + theta)^(n+1) - x^(n+1)])``.

For ``f = f1 + exp(i beta) f2`` with ``f1 f2 = 0`` the powers ``A^n`` keep
each support in place, so all moments are beta-independent, while the flow
moves supports and makes the densities depend on beta.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .charfun import (
    MAX_DENSITY_ORDER,
    MomentVector,
    moments_from_density,
    reconciled_density,
)
from .errors import (
    CrossTermLeak,
    CrossTermWarning,
    GridIncompatible,
    GridMismatch,
    GridTooLarge,
    InvalidSpec,
    NoCompactSupport,
    OrderTooHigh,
    SupportLeak,
    SupportsOverlap,
    ThetaOffGrid,
)
from .generators import DisjointPairSpec, make_disjoint_pair, unit_phase
from .grid_core import (
    CharFn,
    DensityFunction,
    Grid,
    GridFunction,
    fourier_transform,
    inner_product,
    shift_samples,
    shifted_inner_products,
    spectral_derivative,
)

ORACLE_MAX_POINTS = 2048
LEAK_TOL = 1e-10
CROSS_ASSERT_TOL = 1e-10
CROSS_FAIL_TOL = 1e-8
EDGE_CHARFUN_TOL = 1e-10

Window = Literal["grid", "support"]


@dataclass(frozen=True)
class OperatorSpec:
    kind: Literal["translation", "gauged"] = "translation"
    c: float = 0.0
    n: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("translation", "gauged"):
            raise InvalidSpec(f"unknown operator kind {self.kind!r}")
        if not math.isfinite(self.c):
            raise InvalidSpec("gauge coefficient c must be finite")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidSpec(f"gauge exponent n must be an integer >= 1, got {self.n}")

    @classmethod
    def translation(cls) -> "OperatorSpec":
        return cls("translation")

    @classmethod
    def gauged(cls, c: float, n: int) -> "OperatorSpec":
        return cls("gauged", c, n)

    @property
    def is_translation(self) -> bool:
        return self.kind == "translation" or self.c == 0.0

    def potential(self, x: np.ndarray) -> np.ndarray:
        """Multiplicative part ``c(n+1) x^n`` (zero for translation)."""
        if self.kind == "translation":
            return np.zeros_like(x)
        return self.c * (self.n + 1) * x**self.n

    def gauge_phase(self, x: np.ndarray, theta: float) -> np.ndarray:
        """Phase picked up along the flow: ``exp(i c [(x+theta)^(n+1) - x^(n+1)])``."""
        p = self.n + 1
        return np.exp(1j * self.c * ((x + theta) ** p - x**p))


# ---------------------------------------------------------------------------
# Operator action
# ---------------------------------------------------------------------------


def apply_operator(
    op: OperatorSpec, f: GridFunction, window: Window = "support", check_edges: bool = True
) -> GridFunction:
    """``A f``; raises :class:`SupportLeak` if more than ``1e-10`` of the output's
    L2 mass lands outside the input support.

    The default support window differentiates each support component on its
    own hull, which keeps the output support identical to the input's.
    ``window="grid"`` uses the whole-grid spectral derivative instead.
    """
    d = spectral_derivative(f, 1, window=window, check_edges=check_edges)
    out = d.samples * -1j
    if op.kind == "gauged" and op.c != 0.0:
        out = out + op.potential(f.grid.points) * f.samples
    outside = f.samples == 0
    total = float(np.sum(np.abs(out) ** 2))
    if total > 0.0:
        leak = math.sqrt(float(np.sum(np.abs(out[outside]) ** 2)) / total)
        if leak > LEAK_TOL:
            raise SupportLeak(f"relative L2 mass {leak:.3e} outside the input support")
    return GridFunction(f.grid, out)


def apply_power(op: OperatorSpec, f: GridFunction, n: int, window: Window = "support") -> GridFunction:
    if n > MAX_DENSITY_ORDER:
        raise OrderTooHigh(f"operator powers are capped at {MAX_DENSITY_ORDER}")
    if n < 0:
        raise ValueError("operator power must be non-negative")
    out = f
    for k in range(n):
        out = apply_operator(op, out, window, check_edges=k == 0)
    return out


def check_self_adjoint(op: OperatorSpec, f: GridFunction, g: GridFunction) -> float:
    """``|<Af, g> - <f, Ag>|``."""
    return abs(
        inner_product(apply_operator(op, f), g) - inner_product(f, apply_operator(op, g))
    )


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------


def _flow(op: OperatorSpec, f: GridFunction, theta: float, strict: bool) -> GridFunction:
    cells = round(theta / f.grid.dx)
    if abs(theta / f.grid.dx - cells) > 1e-9:
        raise ThetaOffGrid(f"theta={theta!r} is not a multiple of dx={f.grid.dx!r}")
    moved = shift_samples(f, cells, strict=strict)
    if op.is_translation:
        return moved
    return GridFunction(f.grid, moved.samples * op.gauge_phase(f.grid.points, theta))


def evolve(op: OperatorSpec, f: GridFunction, theta: float) -> GridFunction:
    """``exp(i theta A) f`` in closed form; ``theta`` must be a whole number of cells.

    Raises :class:`FlowLeavesGrid` if the moved support would leave the grid.
    """
    return _flow(op, f, theta, strict=True)


def operator_matrix(op: OperatorSpec, grid: Grid) -> np.ndarray:
    """Dense Hermitian discretization: spectral ``-i d/dx`` plus the diagonal potential."""
    n = grid.n_points
    if n > ORACLE_MAX_POINTS:
        raise GridTooLarge(f"dense oracle is capped at {ORACLE_MAX_POINTS} points, got {n}")
    k = 2.0 * math.pi * np.fft.fftfreq(n, grid.dx)
    dft = np.fft.fft(np.eye(n), axis=0, norm="ortho")
    mat = dft.conj().T @ (k[:, None] * dft)
    mat = mat + np.diag(op.potential(grid.points))
    return 0.5 * (mat + mat.conj().T)


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigenvalues ``r`` and orthonormal eigenvectors (columns) of a discretized operator."""

    values: np.ndarray
    vectors: np.ndarray

    @classmethod
    def of(cls, op: OperatorSpec, grid: Grid) -> "Eigensystem":
        vals, vecs = np.linalg.eigh(operator_matrix(op, grid))
        return cls(vals, vecs)

    def orthonormality_error(self) -> float:
        u = self.vectors
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))

    def flow(self, samples: np.ndarray, theta: float) -> np.ndarray:
        coeffs = self.vectors.conj().T @ samples
        return self.vectors @ (np.exp(1j * theta * self.values) * coeffs)


def evolve_oracle(
    op: OperatorSpec, f: GridFunction, theta: float, eig: Eigensystem | None = None
) -> GridFunction:
    """``U diag(exp(i theta r)) U^H f`` from a dense eigendecomposition of ``A``.

    Independent of :func:`evolve`; intended for grids of at most 2048 points.
    Pass a precomputed ``eig`` to reuse one decomposition across thetas.
    """
    eig = eig or Eigensystem.of(op, f.grid)
    return GridFunction(f.grid, eig.flow(f.samples, theta))


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------


def _phase_fn(op: OperatorSpec):
    return None if op.is_translation else op.gauge_phase


def _check_theta_grid(x_grid: Grid, theta_grid: Grid) -> None:
    if not theta_grid.same_spacing(x_grid):
        raise GridIncompatible(
            f"theta spacing {theta_grid.dx!r} must equal x spacing {x_grid.dx!r}"
        )


def flow_overlaps(op: OperatorSpec, f: GridFunction, g: GridFunction, theta_grid: Grid) -> np.ndarray:
    """``<f, exp(i theta A) g>`` for every theta on ``theta_grid``.

    Equivalent to ``inner_product(f, evolve(op, g, theta))`` but tolerates
    flows that carry ``g`` off the grid (only the overlap with ``f`` matters).
    """
    _check_theta_grid(f.grid, theta_grid)
    return shifted_inner_products(f, g, theta_grid, phase=_phase_fn(op))


def operator_charfun(op: OperatorSpec, f: GridFunction, theta_grid: Grid) -> CharFn:
    """``M_A(theta) = <f, exp(i theta A) f>``."""
    return CharFn(GridFunction(theta_grid, flow_overlaps(op, f, f, theta_grid)))


@dataclass(frozen=True, eq=False)
class CrossComponents:
    """``M_lm(theta) = <f_l, exp(i theta A) f_m>`` for a disjoint pair."""

    m11: GridFunction
    m22: GridFunction
    m12: GridFunction
    m21: GridFunction

    def assemble(self, beta: float) -> GridFunction:
        ph = unit_phase(beta)
        return self.m11 + self.m22 + ph * self.m12 + ph.conjugate() * self.m21


def _check_disjoint(f1: GridFunction, f2: GridFunction) -> None:
    if f1.grid != f2.grid:
        raise GridMismatch("pair members live on different grids")
    if np.any((f1.samples != 0) & (f2.samples != 0)):
        raise SupportsOverlap("f1 and f2 share support points")


def cross_components(
    op: OperatorSpec, f1: GridFunction, f2: GridFunction, theta_grid: Grid
) -> CrossComponents:
    _check_disjoint(f1, f2)
    mk = lambda a, b: GridFunction(theta_grid, flow_overlaps(op, a, b, theta_grid))  # noqa: E731
    return CrossComponents(mk(f1, f1), mk(f2, f2), mk(f1, f2), mk(f2, f1))


def cross_charfun_components(
    op: OperatorSpec, f1: GridFunction, f2: GridFunction, beta: float, theta_grid: Grid
) -> tuple[GridFunction, GridFunction, GridFunction, GridFunction, CharFn]:
    """``(M11, M22, M12, M21, M_A)`` with ``M_A = M11 + M22 + e^{ib} M12 + e^{-ib} M21``."""
    comps = cross_components(op, f1, f2, theta_grid)
    return comps.m11, comps.m22, comps.m12, comps.m21, CharFn(comps.assemble(beta))


def gauge_transformed(op: OperatorSpec, f: GridFunction) -> GridFunction:
    """``f(x) * exp(i c x^(n+1))``: the state written in the operator's eigenbasis phase."""
    if op.is_translation:
        return f
    x = f.grid.points
    return GridFunction(f.grid, f.samples * np.exp(1j * op.c * x ** (op.n + 1)))


def eigenbasis_density(op: OperatorSpec, f: GridFunction, r_grid: Grid) -> DensityFunction:
    """``|F(r)|^2`` with ``F`` the transform of ``f * exp(i c x^(n+1))``.

    The eigenfunctions of ``A`` are ``exp(i(r x - c x^(n+1))) / sqrt(2 pi)``,
    so this is the density of ``A`` in state ``f`` computed without any flow.
    """
    F = fourier_transform(gauge_transformed(op, f), r_grid)
    return DensityFunction.from_values(r_grid, np.abs(F.samples) ** 2)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def operator_cross_terms(
    op: OperatorSpec, f1: GridFunction, f2: GridFunction, n_max: int
) -> np.ndarray:
    """Array ``t[n, l, m] = <f_l, A^n f_m>`` for ``n = 0..n_max``, ``l, m in {0, 1}``."""
    if n_max > MAX_DENSITY_ORDER:
        raise OrderTooHigh(f"operator moments are capped at order {MAX_DENSITY_ORDER}")
    _check_disjoint(f1, f2)
    fs = (f1, f2)
    out = np.zeros((n_max + 1, 2, 2), dtype=np.complex128)
    powers = list(fs)
    for n in range(n_max + 1):
        if n:
            powers = [apply_operator(op, p, check_edges=n == 1) for p in powers]
        for l in range(2):
            for m in range(2):
                out[n, l, m] = inner_product(fs[l], powers[m])
    return out


def operator_moments(
    op: OperatorSpec, f1: GridFunction, f2: GridFunction, beta: float, n_max: int,
    terms: np.ndarray | None = None,
) -> MomentVector:
    """``E[R^n] = <f, A^n f>`` for ``f = f1 + e^{i beta} f2``, from the diagonal terms.

    Cross terms ``<f_l, A^n f_m>`` (``l != m``) above 1e-8 raise
    :class:`CrossTermLeak`; above 1e-10 they warn.
    """
    t = operator_cross_terms(op, f1, f2, n_max) if terms is None else terms
    cross = np.maximum(np.abs(t[:, 0, 1]), np.abs(t[:, 1, 0]))
    worst = int(np.argmax(cross))
    if cross[worst] > CROSS_FAIL_TOL:
        raise CrossTermLeak(f"cross term at order {worst} is {cross[worst]:.3e}")
    if cross[worst] > CROSS_ASSERT_TOL:
        warnings.warn(
            CrossTermWarning(f"cross term at order {worst} is {cross[worst]:.3e}"), stacklevel=2
        )
    diag = t[:, 0, 0] + t[:, 1, 1]
    return MomentVector.from_values(diag.real)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorFamilySpec:
    pair: DisjointPairSpec
    betas: tuple[float, ...]
    operator: OperatorSpec
    x_grid: Grid
    n_max: int = 8
    theta_grid: Grid | None = None
    r_grid: Grid | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if not self.betas:
            raise InvalidSpec("betas must not be empty")
        bad = [b for b in self.betas if not -math.pi <= b <= 2 * math.pi]
        if bad:
            raise InvalidSpec(f"betas must lie in [-pi, 2pi], got {bad}")
        if not 0 <= self.n_max <= MAX_DENSITY_ORDER:
            raise InvalidSpec(f"n_max must lie in [0, {MAX_DENSITY_ORDER}], got {self.n_max}")
        theta = self.theta_grid or self.x_grid
        reach = self.pair.hull[1] - self.pair.hull[0]
        if theta.x_min > -reach or theta.x_max < reach:
            raise InvalidSpec(
                f"theta grid [{theta.x_min}, {theta.x_max}) must span +-{reach} "
                "(inter-support distance plus both widths)"
            )

    @property
    def thetas(self) -> Grid:
        return self.theta_grid or self.x_grid

    @property
    def rs(self) -> Grid:
        return self.r_grid or self.thetas.reciprocal()


@dataclass(frozen=True, eq=False)
class OperatorMember:
    beta: float
    charfun: CharFn
    density: DensityFunction
    operator_moments: MomentVector
    density_moments: MomentVector


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    spec: OperatorFamilySpec
    f1: GridFunction
    f2: GridFunction
    components: CrossComponents
    cross_terms: np.ndarray
    members: list[OperatorMember] = field(default_factory=list)

    def densities(self) -> list[tuple[float, DensityFunction]]:
        return [(m.beta, m.density) for m in self.members]


def build_operator_family(spec: OperatorFamilySpec) -> OperatorFamily:
    """Assemble ``M_A`` per beta, obtain ``P_A``, and compute moments both ways.

    ``P_A`` is taken from the eigenbasis transform after checking it against
    the inversion of ``M_A`` (see :func:`reconciled_density`). Raises :class:`NoCompactSupport` when ``|M_A|`` at the theta-grid edge
    exceeds 1e-10, since the inversion would then be truncated.
    """
    f1, f2 = make_disjoint_pair(spec.pair, spec.x_grid)
    comps = cross_components(spec.operator, f1, f2, spec.thetas)
    terms = operator_cross_terms(spec.operator, f1, f2, spec.n_max)
    members = []
    for beta in spec.betas:
        M = CharFn(comps.assemble(beta))
        edge = max(abs(M.values[0]), abs(M.values[-1]))
        if edge > EDGE_CHARFUN_TOL:
            raise NoCompactSupport(
                f"|M_A| = {edge:.3e} at the theta-grid edge; widen the theta grid"
            )
        direct = eigenbasis_density(spec.operator, pair_state(f1, f2, beta), spec.rs)
        P = reconciled_density(M, direct)
        members.append(
            OperatorMember(
                beta,
                M,
                P,
                operator_moments(spec.operator, f1, f2, beta, spec.n_max, terms=terms),
                moments_from_density(P, spec.n_max),
            )
        )
    return OperatorFamily(spec, f1, f2, comps, terms, members)


def pair_state(f1: GridFunction, f2: GridFunction, beta: float) -> GridFunction:
    return f1 + unit_phase(beta) * f2
