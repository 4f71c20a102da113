"""Run configured experiments and move their artifacts to and from CSV/JSON."""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .charfun import charfun_from_density, moments_from_density
from .config import ExperimentConfig
from .errors import ConfigInvalid
from .grid_core import CharFn, DensityFunction, Grid, distance
from .operators import OperatorFamilySpec, build_operator_family
from .stieltjes import (
    build_stieltjes_family,
    q_derivatives_at_zero,
    q_tolerances,
    verify_finite_extent_condition,
)
from .verify import ConditionCheck, VerificationReport, two_path_moment_check, verify_family

PARAM_NAME = {"stieltjes": "eps", "operator": "beta"}


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    densities: list[tuple[float, DensityFunction]]
    charfuns: list[tuple[float, CharFn]]
    report: VerificationReport

    @property
    def exit_code(self) -> int:
        if "report" not in self.config.emit:
            return 0
        return 0 if self.report.confirmed else 2


def _stieltjes_checks(fam) -> list[ConditionCheck]:
    spec = fam.spec
    cond = verify_finite_extent_condition(fam.charfun, spec.lam)
    q = q_derivatives_at_zero(fam.base_density, spec.lam, spec.phi, spec.n_max)
    q_ratio = float(np.max(np.abs(q) / q_tolerances(fam.base_density, spec.n_max)))
    tp = two_path_moment_check(fam.base_density, fam.charfun, spec.n_max)
    tp_ratio = float(np.max(tp.residuals / tp.tolerances))
    return [
        ConditionCheck("lambda_exceeds_extent", cond.passed, cond.margin),
        ConditionCheck("q_derivatives_vanish", q_ratio <= 1.0, q_ratio),
        ConditionCheck("two_path_moments", tp.passed, tp_ratio),
    ]


def _operator_checks(fam) -> list[ConditionCheck]:
    cross = float(np.max(np.abs(fam.cross_terms[:, [0, 1], [1, 0]])))
    ratio = max(
        float(np.max(np.abs(np.subtract(m.operator_moments.values, m.density_moments.values))
                     / m.density_moments.tolerances()))
        for m in fam.members
    )
    curves = [m.charfun for m in fam.members]
    pairs = list(itertools.combinations(curves, 2))
    min_linf = min((distance(a.base, b.base, "Linf") for a, b in pairs), default=float("inf"))
    checks = [
        ConditionCheck("cross_terms_vanish", cross <= 1e-10, cross),
        ConditionCheck("operator_vs_density_moments", ratio <= 1.0, ratio),
    ]
    if pairs:
        checks.append(ConditionCheck("charfun_distinctness", min_linf >= 1e-2, min_linf))
    return checks


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Build the configured family and verify it.

    Stieltjes families are built without the ``lambda > L`` gate so that a
    broken configuration still yields a report; the gate becomes the
    ``lambda_exceeds_extent`` condition check instead.
    """
    if isinstance(cfg.spec, OperatorFamilySpec):
        fam = build_operator_family(cfg.spec)
        densities = fam.densities()
        charfuns = [(m.beta, m.charfun) for m in fam.members]
        checks = _operator_checks(fam)
    else:
        fam = build_stieltjes_family(cfg.spec, cfg.grid, enforce_condition=False)
        densities = fam.members
        charfuns = [(e, charfun_from_density(P, fam.theta_grid, strict=False)) for e, P in densities]
        checks = _stieltjes_checks(fam)
    report = verify_family(densities, cfg.n_max, cfg.distinctness_threshold, checks, cfg.kind)
    report.experiment = cfg.name
    return ExperimentResult(cfg, densities, charfuns, report)


def _header(axis: str, kind: str, params) -> list[str]:
    return [axis] + [f"{PARAM_NAME[kind]}={p!r}" for p in params]


def _write_rows(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) for v in row])


def write_artifacts(res: ExperimentResult) -> Path:
    """Write the requested CSV/JSON files; floats use ``repr`` (round-trip exact)."""
    out = Path(res.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    kind = res.config.kind
    params = [p for p, _ in res.densities]
    emit = res.config.emit
    if "densities" in emit:
        grid = res.densities[0][1].grid
        _write_rows(out / "density.csv", _header("r", kind, params),
                    [grid.points] + [P.values for _, P in res.densities])
    if "charfuns" in emit:
        grid = res.charfuns[0][1].grid
        header = ["theta"]
        cols = [grid.points]
        for p, M in res.charfuns:
            header += [f"{PARAM_NAME[kind]}={p!r}:re", f"{PARAM_NAME[kind]}={p!r}:im"]
            cols += [M.values.real, M.values.imag]
        _write_rows(out / "charfun.csv", header, cols)
    if "moments" in emit:
        table = np.array(res.report.moment_table)
        _write_rows(out / "moments.csv", _header("n", kind, params),
                    [np.arange(table.shape[1], dtype=float)] + list(table))
    if "report" in emit:
        (out / "report.json").write_text(res.report.to_json() + "\n")
    return out


def read_densities(path: Path, grid: Grid) -> list[tuple[float, DensityFunction]]:
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    if body.shape[0] != grid.n_points:
        raise ConfigInvalid(str(path), f"expected {grid.n_points} rows, found {body.shape[0]}")
    params = [float(h.split("=", 1)[1]) for h in header[1:]]
    return [
        (p, DensityFunction.from_values(grid, body[:, j + 1], strict=False))
        for j, p in enumerate(params)
    ]


def reverify(directory: str) -> tuple[VerificationReport, VerificationReport]:
    """Re-run verification on emitted ``density.csv`` with settings from ``report.json``.

    Condition checks cannot be recomputed from densities alone and are
    carried over from the original report. Returns ``(original, fresh)``.
    """
    d = Path(directory)
    original = VerificationReport.from_json((d / "report.json").read_text())
    if original.density_grid is None:
        raise ConfigInvalid("density_grid", "report.json does not record the density grid")
    x_min, x_max, n = original.density_grid
    members = read_densities(d / "density.csv", Grid(float(x_min), float(x_max), int(n)))
    fresh = verify_family(
        members,
        original.n_max,
        original.distinctness_threshold,
        original.condition_checks,
        original.family_kind,
    )
    fresh.experiment = original.experiment
    return original, fresh


def moment_table_gap(a: VerificationReport, b: VerificationReport) -> float:
    """Largest elementwise relative difference between two moment tables."""
    x, y = np.array(a.moment_table), np.array(b.moment_table)
    if x.shape != y.shape:
        return float("inf")
    scale = np.maximum(np.abs(x), 1.0)
    return float(np.max(np.abs(x - y) / scale))


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2)
