"""Experiment configs: JSON schema, validation, and conversion to family specs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .errors import ConfigInvalid, MindetError
from .generators import BumpSpec, DisjointPairSpec
from .grid_core import Grid
from .operators import OperatorFamilySpec, OperatorSpec
from .stieltjes import StieltjesFamilySpec

EMIT_CHOICES = ("densities", "charfuns", "moments", "report")

_NUM = {"type": "number"}
_BUMP_KIND = {"enum": ["standard_bump", "cosine_power_bump"]}

_GRID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["x_min", "x_max", "n_points"],
    "properties": {"x_min": _NUM, "x_max": _NUM, "n_points": {"type": "integer", "minimum": 8}},
}

_GENERATOR = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": _BUMP_KIND,
        "center": _NUM,
        "half_width": {"type": "number", "exclusiveMinimum": 0},
        "power": {"type": "integer", "minimum": 4},
    },
}

_PAIR = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": _BUMP_KIND,
        "half_width": {"type": "number", "exclusiveMinimum": 0},
        "gap": {"type": "number", "exclusiveMinimum": 0},
        "power": {"type": "integer", "minimum": 4},
        "norm_split": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    },
}

_STIELTJES_FAMILY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["lambda"],
    "properties": {
        "lambda": {"type": "number", "exclusiveMinimum": 0},
        "phi": {"type": "number", "minimum": -math.pi, "maximum": math.pi},
        "epsilons": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "minimum": -1, "maximum": 1},
        },
    },
}

_OPERATOR = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["translation", "gauged"]},
        "c": _NUM,
        "n": {"type": "integer", "minimum": 0},
    },
}

_OPERATOR_FAMILY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["betas", "operator"],
    "properties": {
        "betas": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "minimum": -math.pi, "maximum": 2 * math.pi},
        },
        "operator": _OPERATOR,
    },
}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "kind", "grid", "family"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "kind": {"enum": ["stieltjes", "operator"]},
        "grid": _GRID,
        "generator": _GENERATOR,
        "pair": _PAIR,
        "family": {"type": "object"},
        "n_max": {"type": "integer", "minimum": 0, "maximum": 12},
        "distinctness_threshold": {"type": "number", "exclusiveMinimum": 0},
        "output_dir": {"type": "string", "minLength": 1},
        "emit": {
            "type": "array",
            "uniqueItems": True,
            "items": {"enum": list(EMIT_CHOICES)},
        },
    },
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "stieltjes"}}},
            "then": {
                "required": ["generator"],
                "not": {"required": ["pair"]},
                "properties": {"family": _STIELTJES_FAMILY},
            },
        },
        {
            "if": {"properties": {"kind": {"const": "operator"}}},
            "then": {
                "required": ["pair"],
                "not": {"required": ["generator"]},
                "properties": {"family": _OPERATOR_FAMILY},
            },
        },
    ],
}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    grid: Grid
    spec: StieltjesFamilySpec | OperatorFamilySpec
    n_max: int
    output_dir: str
    emit: tuple[str, ...]
    distinctness_threshold: float


def _field_of(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        parts += extra[:1]
    elif err.validator == "required":
        parts.append(err.message.split("'")[1])
    elif err.validator == "not":
        parts.append("pair" if "pair" in err.instance else "generator")
    return ".".join(parts) or "<root>"


def _guard(field: str, build):
    try:
        return build()
    except ConfigInvalid:
        raise
    except (MindetError, ValueError) as exc:
        raise ConfigInvalid(field, str(exc)) from exc


def parse_config(raw: dict, output_dir: str | None = None) -> ExperimentConfig:
    """Validate ``raw`` against :data:`SCHEMA` and build the family spec.

    Schema failures and spec invariant failures both surface as
    :class:`ConfigInvalid` naming the offending field.
    """
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if err is not None:
        raise ConfigInvalid(_field_of(err), err.message)
    g = raw["grid"]
    grid = _guard("grid", lambda: Grid(float(g["x_min"]), float(g["x_max"]), int(g["n_points"])))
    n_max = int(raw.get("n_max", 8))
    fam = raw["family"]
    if raw["kind"] == "stieltjes":
        gen = raw["generator"]
        bump = _guard("generator", lambda: BumpSpec(
            float(gen.get("center", 0.0)),
            float(gen.get("half_width", 1.0)),
            gen.get("kind", "standard_bump"),
            int(gen.get("power", 4)),
        ))
        spec = _guard("family", lambda: StieltjesFamilySpec(
            bump,
            float(fam["lambda"]),
            float(fam.get("phi", 0.0)),
            tuple(fam.get("epsilons", (-1.0, -0.5, 0.0, 0.5, 1.0))),
            n_max,
        ))
    else:
        pr = raw["pair"]
        hw = float(pr.get("half_width", 0.5))
        gap = float(pr.get("gap", 3.0))
        left = _guard("pair", lambda: BumpSpec(-0.5 * gap, hw, pr.get("kind", "standard_bump"),
                                               int(pr.get("power", 4))))
        pair = _guard("pair", lambda: DisjointPairSpec.shifted_copy(
            left, gap, float(pr.get("norm_split", 0.5))))
        o = fam["operator"]
        if o["kind"] == "translation":
            op = OperatorSpec.translation()
        else:
            op = _guard("family.operator", lambda: OperatorSpec.gauged(float(o.get("c", 0.3)),
                                                                      int(o.get("n", 2))))
        spec = _guard("family", lambda: OperatorFamilySpec(pair, tuple(fam["betas"]), op, grid, n_max))
    return ExperimentConfig(
        name=raw["name"],
        kind=raw["kind"],
        grid=grid,
        spec=spec,
        n_max=n_max,
        output_dir=output_dir or raw.get("output_dir", f"out/{raw['name']}"),
        emit=tuple(raw.get("emit", EMIT_CHOICES)),
        distinctness_threshold=float(raw.get("distinctness_threshold", 1e-3)),
    )


def bundled_configs() -> list[str]:
    root = resources.files("mindet") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def read_config_text(path: str) -> str:
    """Text of ``path``, falling back to a bundled config of that name (``.json`` optional).

    Raises :class:`FileNotFoundError` when neither exists.
    """
    p = Path(path)
    if p.is_file():
        return p.read_text()
    name = p.name if p.suffix == ".json" else f"{p.name}.json"
    if p.name == str(path) and name in bundled_configs():
        return (resources.files("mindet") / "configs" / name).read_text()
    raise FileNotFoundError(f"config file not found: {path}")


def load_config(path: str, output_dir: str | None = None) -> ExperimentConfig:
    text = read_config_text(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("<root>", f"not valid JSON: {exc}") from exc
    return parse_config(raw, output_dir)
