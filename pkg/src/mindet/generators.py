"""Smooth, compactly supported, L2-normalized generator functions."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InvalidSpec, SupportOverflow, SupportsOverlap
from .grid_core import Grid, GridFunction

BumpKind = Literal["standard_bump", "cosine_power_bump"]


@dataclass(frozen=True)
class BumpSpec:
    """A bump centred at ``center`` with support ``[center - half_width, center + half_width]``.

    ``standard_bump`` is ``exp(-1/(1-u^2))`` (all derivatives finite);
    ``cosine_power_bump`` is ``cos(pi*u/2)**power`` and has only
    ``power - 1`` continuous derivatives.
    """

    center: float = 0.0
    half_width: float = 1.0
    kind: BumpKind = "standard_bump"
    power: int = 4
    amplitude_phase: complex = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.center) and math.isfinite(self.half_width)):
            raise InvalidSpec("bump center and half_width must be finite")
        if self.half_width <= 0:
            raise InvalidSpec(f"half_width must be positive, got {self.half_width}")
        if self.kind not in ("standard_bump", "cosine_power_bump"):
            raise InvalidSpec(f"unknown bump kind {self.kind!r}")
        if self.kind == "cosine_power_bump" and (int(self.power) != self.power or self.power < 4):
            raise InvalidSpec(f"cosine_power_bump needs an integer power >= 4, got {self.power}")
        if abs(abs(complex(self.amplitude_phase)) - 1.0) > 1e-12:
            raise InvalidSpec("amplitude_phase must have unit modulus")

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.half_width, self.center + self.half_width

    def max_moment_order(self) -> int | None:
        """Highest moment order the profile's smoothness supports (None = unlimited)."""
        if self.kind == "cosine_power_bump":
            return self.power - 2
        return None


def bump_profile(u: np.ndarray, kind: BumpKind = "standard_bump", power: int = 4) -> np.ndarray:
    """Unnormalized profile on the unit support; exact zeros for ``|u| >= 1``."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    if kind == "standard_bump":
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    else:
        out[inside] = np.cos(0.5 * math.pi * u[inside]) ** power
    return out


def _check_fits(spec: BumpSpec, grid: Grid, padding: float) -> None:
    lo, hi = spec.support
    mid = 0.5 * (grid.x_min + grid.x_max)
    half = 0.5 * grid.length / padding
    if lo < mid - half or hi > mid + half or lo <= grid.x_min or hi >= grid.x_max - grid.dx:
        raise SupportOverflow(
            f"support [{lo}, {hi}] exceeds the central 1/{padding:g} of "
            f"[{grid.x_min}, {grid.x_max})"
        )


def make_bump(spec: BumpSpec, grid: Grid, padding: float = 4.0, norm: float = 1.0) -> GridFunction:
    """Sample the bump on ``grid`` and scale it so ``integral |f|^2 == norm``.

    The support must lie within the central ``1/padding`` of the grid.
    """
    _check_fits(spec, grid, padding)
    u = (grid.points - spec.center) / spec.half_width
    prof = bump_profile(u, spec.kind, spec.power)
    mass = float(np.sum(prof**2)) * grid.dx
    if mass <= 0.0:
        raise SupportOverflow("support is narrower than one grid cell")
    scale = math.sqrt(norm / mass)
    return GridFunction(grid, prof * scale * complex(spec.amplitude_phase))


@dataclass(frozen=True)
class DisjointPairSpec:
    left: BumpSpec
    right: BumpSpec
    norm_split: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.norm_split < 1.0:
            raise InvalidSpec(f"norm_split must lie in (0, 1), got {self.norm_split}")
        if self.left.support[1] >= self.right.support[0]:
            raise InvalidSpec(
                f"left support {self.left.support} must end before right support "
                f"{self.right.support} begins"
            )

    @classmethod
    def shifted_copy(cls, bump: BumpSpec, shift: float, norm_split: float = 0.5) -> "DisjointPairSpec":
        """Pair ``(f, f(x - shift))``: the right bump is the left one moved by ``shift``."""
        right = BumpSpec(
            bump.center + shift, bump.half_width, bump.kind, bump.power, bump.amplitude_phase
        )
        return cls(bump, right, norm_split)

    @property
    def hull(self) -> tuple[float, float]:
        return self.left.support[0], self.right.support[1]


def make_disjoint_pair(
    spec: DisjointPairSpec, grid: Grid, padding: float = 2.0
) -> tuple[GridFunction, GridFunction]:
    """Build ``(f1, f2)`` with ``||f1||^2 = norm_split`` and disjoint discrete supports.

    ``padding`` applies to the hull of the pair as a whole.
    """
    hull = BumpSpec(0.5 * sum(spec.hull), 0.5 * (spec.hull[1] - spec.hull[0]))
    _check_fits(hull, grid, padding)
    f1 = make_bump(spec.left, grid, padding=1.0, norm=spec.norm_split)
    f2 = make_bump(spec.right, grid, padding=1.0, norm=1.0 - spec.norm_split)
    s1, s2 = f1.support_indices(), f2.support_indices()
    if s1.size and s2.size and s1[-1] + 1 >= s2[0]:
        raise SupportsOverlap(
            f"discretized supports meet: left ends at cell {s1[-1]}, right starts at {s2[0]}"
        )
    return f1, f2


def unit_phase(beta: float) -> complex:
    return cmath.exp(1j * beta)
