"""File schemas and deterministic report serialization.

All numeric output is written with 12 significant digits and infinities as
the quoted sentinels "+inf"/"-inf", so identical inputs produce
byte-identical reports.
"""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Any, Sequence

import numpy as np

from .cones import ConeSpec
from .distributions import Distribution, ScenarioSpace
from .families import TestFamily, build_family
from .model_risk import ModelSet
from .risk import DecreasingTestFn, LambdaFn


class InputError(ValueError):
    """Raised when an input file fails to parse or validate."""


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise InputError(f"{path}: missing field {key!r}")
    return obj[key]


# -- distributions --------------------------------------------------------------


def distribution_from_dict(obj: dict, path: str = "<dist>") -> Distribution:
    kind = _require(obj, "kind", path)
    try:
        if kind == "atoms":
            return Distribution.from_atoms([(x, w) for x, w in _require(obj, "atoms", path)])
        if kind == "piecewise_cdf":
            nodes = [(x, v, k) for x, v, k in _require(obj, "nodes", path)]
            return Distribution.from_nodes(nodes, float(obj.get("left_tail_value", 0.0)))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}: unknown distribution kind {kind!r}")


def distribution_to_dict(d: Distribution) -> dict:
    if d.is_atomic:
        return {"kind": "atoms", "atoms": [[x, w] for x, w in d.atoms()]}
    kinds = ["jump" if j else "linear" for j in d.jumps]
    return {
        "kind": "piecewise_cdf",
        "nodes": [[float(x), float(v), k] for x, v, k in zip(d.xs, d.vs, kinds)],
        "left_tail_value": d.left_tail,
    }


def load_distribution(path: str) -> Distribution:
    return distribution_from_dict(_load_json(path), path)


# -- scenario spaces -------------------------------------------------------------


def scenario_from_dict(obj: dict, path: str = "<scenario>") -> ScenarioSpace:
    try:
        return ScenarioSpace(
            states=tuple(_require(obj, "states", path)),
            measures={k: tuple(v) for k, v in _require(obj, "measures", path).items()},
            variables={k: tuple(v) for k, v in _require(obj, "variables", path).items()},
        )
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def scenario_to_dict(s: ScenarioSpace) -> dict:
    return {
        "states": list(s.states),
        "measures": {k: list(v) for k, v in s.measures.items()},
        "variables": {k: list(v) for k, v in s.variables.items()},
    }


def load_scenario(path: str) -> ScenarioSpace:
    return scenario_from_dict(_load_json(path), path)


# -- probability/loss curves -----------------------------------------------------


def lambda_fn_from_dict(obj: dict, path: str = "<lambda>") -> LambdaFn:
    try:
        points = [(x, v, k) for x, v, k in obj.get("breakpoints", [])]
        return LambdaFn.from_breakpoints(points, float(obj.get("left_value", 0.0)))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def lambda_fn_to_dict(lam: LambdaFn) -> dict:
    kinds = ["step" if s else "linear" for s in lam.steps]
    return {
        "breakpoints": [[float(x), float(v), k] for x, v, k in zip(lam.xs, lam.vs, kinds)],
        "left_value": lam.left_value,
    }


def load_lambda_fn(path: str) -> LambdaFn:
    return lambda_fn_from_dict(_load_json(path), path)


# -- families --------------------------------------------------------------------


def family_from_dict(obj: dict, path: str = "<family>") -> TestFamily:
    try:
        return build_family(_require(obj, "kind", path), obj.get("params"))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_family(path: str) -> TestFamily:
    return family_from_dict(_load_json(path), path)


# -- model sets ------------------------------------------------------------------


def model_set_from_dict(obj: dict, path: str = "<modelset>") -> ModelSet:
    scenario = _require(obj, "scenario", path)
    if isinstance(scenario, str):
        base = os.path.dirname(os.path.abspath(path)) if os.path.exists(path) else "."
        scenario = _load_json(os.path.join(base, scenario))
    scn = scenario_from_dict(scenario, path)
    risk = {
        m: {v: _parse_number(x) for v, x in row.items()}
        for m, row in _require(obj, "model_risk", path).items()
    }
    names = tuple(obj.get("measure_names", sorted(risk)))
    try:
        return ModelSet(scn, names, risk)
    except (ValueError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_model_set(path: str) -> ModelSet:
    return model_set_from_dict(_load_json(path), path)


# -- cones -----------------------------------------------------------------------


def cone_from_dict(obj: dict, path: str = "<cone>") -> ConeSpec:
    scenario = _require(obj, "scenario", path)
    if isinstance(scenario, str):
        base = os.path.dirname(os.path.abspath(path)) if os.path.exists(path) else "."
        scenario = _load_json(os.path.join(base, scenario))
    try:
        return ConeSpec(
            scenario_from_dict(scenario, path),
            generators=tuple(tuple(g) for g in obj.get("generators", [])),
            linear=tuple(tuple(g) for g in obj.get("linear", [])),
        )
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_cone(path: str) -> ConeSpec:
    return cone_from_dict(_load_json(path), path)


# -- claims baskets ---------------------------------------------------------------


def claims_from_dict(obj: dict, path: str = "<claims>") -> list[DecreasingTestFn]:
    try:
        return [DecreasingTestFn.ramp(float(b), float(w)) for b, w in _require(obj, "ramps", path)]
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_claims(path: str) -> list[DecreasingTestFn]:
    return claims_from_dict(_load_json(path), path)


# -- value and report serialization -----------------------------------------------


def _parse_number(x: Any) -> float:
    if x == "+inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    return float(x)


def encode_value(x: float) -> Any:
    """Extended real -> JSON scalar with quoted infinity sentinels."""
    if isinstance(x, float) and math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x


def _canonical(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            raise ValueError("reports must not contain NaN")
        if math.isinf(obj):
            return "+inf" if obj > 0 else "-inf"
        return float(f"{obj:.12g}")
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(obj: Any) -> str:
    return json.dumps(_canonical(obj), sort_keys=True, indent=2) + "\n"


def write_report(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_report(obj))


def format_number(x: float) -> str:
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def write_curve(path: str, header: Sequence[str], rows: Sequence[Sequence[float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(x) for x in row])
