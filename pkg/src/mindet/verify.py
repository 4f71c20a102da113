"""Family-level verification: equal moments, distinct densities, valid members."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

import numpy as np

from .charfun import (
    MAX_CHARFUN_ORDER,
    MomentVector,
    moments_from_charfun,
    moments_from_density,
)
from .errors import EmptyFamily, GridMismatch
from .grid_core import CharFn, DensityFunction, distance

SCHEMA_VERSION = 1
CONFIRMED = "M_INDETERMINATE_CONFIRMED"
GATES = ("moment_spread", "distinctness", "negativity", "normalization", "condition_check")
DEFAULT_DISTINCTNESS = 1e-3
NEGATIVITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-8

FamilyKind = Literal["stieltjes", "operator"]


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "value", float(self.value))


@dataclass
class VerificationReport:
    """Outcome of :func:`verify_family`; serializes to a versioned JSON object.

    ``min_pairwise_L1`` is ``inf`` for a single member and is written as
    ``null`` in JSON. ``verdict`` is ``M_INDETERMINATE_CONFIRMED`` or
    ``FAILED(<gate>)`` naming the first failing gate in :data:`GATES`.
    """

    family_kind: str
    n_max: int
    params: list[float]
    moment_table: list[list[float]]
    max_moment_spread: list[float]
    tolerances: list[float]
    min_pairwise_L1: float
    normalization_errors: list[float]
    negativity_worst: list[float]
    condition_checks: list[ConditionCheck] = field(default_factory=list)
    distinctness_threshold: float = DEFAULT_DISTINCTNESS
    verdict: str = CONFIRMED
    failed_value: float | None = None
    density_grid: list[float] | None = None
    experiment: str = ""

    @property
    def confirmed(self) -> bool:
        return self.verdict == CONFIRMED

    @property
    def failed_gate(self) -> str | None:
        if self.confirmed:
            return None
        return self.verdict[len("FAILED(") : -1]

    def spread_ratios(self) -> np.ndarray:
        return np.asarray(self.max_moment_spread) / np.asarray(self.tolerances)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["condition_checks"] = [asdict(c) for c in self.condition_checks]
        if math.isinf(self.min_pairwise_L1):
            d["min_pairwise_L1"] = None
        return {"schema": SCHEMA_VERSION, **d}

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        d = dict(d)
        schema = d.pop("schema", None)
        if schema != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {schema!r}")
        d["condition_checks"] = [ConditionCheck(**c) for c in d.get("condition_checks", [])]
        if d.get("min_pairwise_L1") is None:
            d["min_pairwise_L1"] = math.inf
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))


def _reference_moments(table: np.ndarray) -> MomentVector:
    return MomentVector.from_values(table.mean(axis=0))


def verify_family(
    members: Sequence[tuple[float, DensityFunction]],
    n_max: int,
    distinctness_threshold: float = DEFAULT_DISTINCTNESS,
    condition_checks: Sequence[ConditionCheck] = (),
    family_kind: FamilyKind = "stieltjes",
) -> VerificationReport:
    """Check that all members share moments up to ``n_max`` yet differ as densities.

    Tolerances ``tol_n`` use the member-averaged moment vector as reference.
    Gates are tried in :data:`GATES` order and the first failure sets the
    verdict, together with its offending value (largest ``spread/tol``, the
    smallest L1 distance, the worst relative negativity or normalization
    error, or the failing condition's value).
    """
    if not members:
        raise EmptyFamily("a family needs at least one member")
    grid = members[0][1].grid
    if any(P.grid != grid for _, P in members):
        raise GridMismatch("all members must share one grid")
    params = [float(p) for p, _ in members]
    dens = [P for _, P in members]
    table = np.array([moments_from_density(P, n_max).values for P in dens])
    spread = table.max(axis=0) - table.min(axis=0)
    tol = _reference_moments(table).tolerances()
    l1 = [distance(p.base, q.base, "L1") for p, q in itertools.combinations(dens, 2)]
    min_l1 = min(l1) if l1 else math.inf
    norm_err = [P.normalization_error() for P in dens]
    neg = [P.negativity() for P in dens]
    checks = list(condition_checks)

    report = VerificationReport(
        family_kind=family_kind,
        n_max=n_max,
        params=params,
        moment_table=table.tolist(),
        max_moment_spread=spread.tolist(),
        tolerances=tol.tolist(),
        min_pairwise_L1=float(min_l1),
        normalization_errors=norm_err,
        negativity_worst=neg,
        condition_checks=checks,
        distinctness_threshold=distinctness_threshold,
        density_grid=[grid.x_min, grid.x_max, grid.n_points],
    )
    ratio = spread / tol
    failures = {
        "moment_spread": (bool(np.any(ratio > 1.0)), float(ratio.max())),
        "distinctness": (min_l1 < distinctness_threshold, float(min_l1)),
        "negativity": (min(neg) < -NEGATIVITY_TOL, float(min(neg))),
        "normalization": (max(norm_err) > NORMALIZATION_TOL, float(max(norm_err))),
        "condition_check": (
            not all(c.passed for c in checks),
            next((float(c.value) for c in checks if not c.passed), 0.0),
        ),
    }
    for gate in GATES:
        failed, value = failures[gate]
        if failed:
            report.verdict = f"FAILED({gate})"
            report.failed_value = value
            break
    return report


@dataclass(frozen=True)
class TwoPathResult:
    residuals: np.ndarray
    tolerances: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.residuals <= self.tolerances))


def two_path_moment_check(P: DensityFunction, M: CharFn, n_max: int) -> TwoPathResult:
    """``|m_n(density) - m_n(charfun)|`` for ``n <= min(n_max, 4)``.

    Tolerances come from the density-side moment vector.
    """
    n = min(n_max, MAX_CHARFUN_ORDER)
    a = moments_from_density(P, n)
    b = moments_from_charfun(M, n)
    res = np.abs(np.array(a.values) - np.array(b.values))
    return TwoPathResult(res, a.tolerances())
