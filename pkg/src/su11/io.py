"""JSON input schemas and CSV output."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema
import numpy as np

from . import coefficients
from .core import Su11Hamiltonian, SolvableScenario
from .guided_wave import CoupledModeProblem
from .open_dynamics import validate_density

_NUMBER = {"type": "number"}
_PAIR = {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2}

COEFFICIENT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "family": {"enum": ["constant"]},
                "params": {"type": "array", "items": _NUMBER, "minItems": 1, "maxItems": 1},
            },
            "required": ["family", "params"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "family": {"enum": ["sinusoid"]},
                "params": {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 4},
            },
            "required": ["family", "params"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "family": {"enum": ["polynomial"]},
                "params": {"type": "array", "items": _NUMBER, "minItems": 1},
            },
            "required": ["family", "params"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "family": {"enum": ["table"]},
                "t": {"type": "array", "items": _NUMBER, "minItems": 2},
                "v": {"type": "array", "items": _NUMBER, "minItems": 2},
            },
            "required": ["family", "t", "v"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "family": {"enum": ["sum"]},
                "terms": {"type": "array", "items": {"$ref": "#/$defs/coefficient"}, "minItems": 1},
            },
            "required": ["family", "terms"],
            "additionalProperties": False,
        },
    ],
}


def _schema(properties: dict, required: Sequence[str]) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": list(required),
        "additionalProperties": False,
        "$defs": {"coefficient": COEFFICIENT_SCHEMA},
    }


_COEF_REF = {"$ref": "#/$defs/coefficient"}

SCENARIO_SCHEMA = _schema(
    {"nu": {"type": "number", "minimum": 0}, "omega_abs": _COEF_REF, "phase_rate": _COEF_REF, "phi0": _NUMBER},
    ["nu", "omega_abs", "phase_rate"],
)
HAMILTONIAN_SCHEMA = _schema(
    {"big_omega": _COEF_REF, "omega_abs": _COEF_REF, "phi_omega": _COEF_REF},
    ["big_omega", "omega_abs", "phi_omega"],
)
PROBLEM_SCHEMA = _schema(
    {"delta": _NUMBER, "k_abs": _COEF_REF, "phi_k": _COEF_REF, "A0": _PAIR, "B0": _PAIR},
    ["delta", "k_abs", "phi_k"],
)
DENSITY_SCHEMA = {"type": "array", "items": _PAIR, "minItems": 4, "maxItems": 4}


class InputError(ValueError):
    """Input that fails schema validation or a semantic check."""


def _validate(obj, schema, what: str):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"invalid {what} at {where}: {exc.message}") from None


def _load(source) -> object:
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return json.load(fh)
    return source


def scenario_from_json(source) -> SolvableScenario:
    obj = _load(source)
    _validate(obj, SCENARIO_SCHEMA, "scenario")
    try:
        return SolvableScenario(
            float(obj["nu"]),
            coefficients.from_json(obj["omega_abs"]),
            coefficients.from_json(obj["phase_rate"]),
            float(obj.get("phi0", 0.0)),
        )
    except ValueError as exc:
        raise InputError(f"invalid scenario: {exc}") from None


def hamiltonian_from_json(source) -> Su11Hamiltonian:
    obj = _load(source)
    _validate(obj, HAMILTONIAN_SCHEMA, "hamiltonian")
    try:
        return Su11Hamiltonian(*(coefficients.from_json(obj[k]) for k in ("big_omega", "omega_abs", "phi_omega")))
    except ValueError as exc:
        raise InputError(f"invalid hamiltonian: {exc}") from None


def model_from_json(source) -> SolvableScenario | Su11Hamiltonian:
    """A scenario if the document has ``nu``, otherwise a general Hamiltonian."""
    obj = _load(source)
    if isinstance(obj, dict) and "nu" in obj:
        return scenario_from_json(obj)
    return hamiltonian_from_json(obj)


def problem_from_json(source) -> CoupledModeProblem:
    obj = _load(source)
    _validate(obj, PROBLEM_SCHEMA, "coupled-mode problem")
    a0 = obj.get("A0", [1.0, 0.0])
    b0 = obj.get("B0", [0.0, 0.0])
    try:
        return CoupledModeProblem(
            float(obj["delta"]),
            coefficients.from_json(obj["k_abs"]),
            coefficients.from_json(obj["phi_k"]),
            complex(*a0),
            complex(*b0),
        )
    except ValueError as exc:
        raise InputError(f"invalid coupled-mode problem: {exc}") from None


def density_from_json(source, tol: float = 1e-12) -> np.ndarray:
    """Row-major ``[[re, im], x4]`` -> validated 2x2 density matrix."""
    obj = _load(source)
    _validate(obj, DENSITY_SCHEMA, "density matrix")
    rho = np.array([complex(re, im) for re, im in obj]).reshape(2, 2)
    try:
        return validate_density(rho, tol)
    except ValueError as exc:
        raise InputError(f"invalid density matrix: {exc}") from None


def density_to_json(rho) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(rho, dtype=complex).ravel()]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Comma-separated, one header line, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
