"""JSON documents: measure specs, extension contexts and evaluation grids."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from .errors import DimensionMismatch, SpecError, WTError
from .herglotz_eval import EvalGrid
from .report import matrix_to_json
from .spectral_measure import (
    NAMED_DENSITIES,
    SIGMA,
    LatticeTail,
    MatrixMeasure,
    TailBound,
    lattice_measure,
    named_density,
    sigma_from_tau,
    DEFAULT_TAILS,
)

COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": COMPLEX}}
INTERVAL = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

MEASURE_SCHEMA = {
    "type": "object",
    "required": ["dim"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 1, "maximum": 8},
        "kind": {"enum": ["sigma", "tau"]},
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lambda", "weight"],
                "additionalProperties": False,
                "properties": {"lambda": {"type": "number"}, "weight": MATRIX},
            },
        },
        "density": {
            "type": "object",
            "required": ["expr"],
            "additionalProperties": False,
            "properties": {
                "expr": {"enum": sorted(NAMED_DENSITIES)},
                "params": {"type": "object"},
                "smooth_windows": {"type": "array", "items": INTERVAL},
            },
        },
        "tail": {
            "type": "object",
            "required": ["C", "p"],
            "additionalProperties": False,
            "properties": {"C": {"type": "number", "minimum": 0}, "p": {"type": "number"},
                           "cutoff": {"type": "number", "minimum": 0}},
        },
        "lattice": {
            "type": "object",
            "required": ["step", "k_max"],
            "additionalProperties": False,
            "properties": {"step": {"type": "number", "exclusiveMinimum": 0},
                           "k_max": {"type": "integer", "minimum": 0},
                           "origin": {"type": "number"}, "tail": {"type": "boolean"}},
        },
        "lattice_tail": {
            "type": "object",
            "required": ["step", "k_min", "k_max", "tau_weight"],
            "additionalProperties": False,
            "properties": {"origin": {"type": "number"}, "step": {"type": "number", "exclusiveMinimum": 0},
                           "k_min": {"type": "integer"}, "k_max": {"type": "integer"},
                           "tau_weight": MATRIX},
        },
    },
}

CONTEXT_SCHEMA = {
    "type": "object",
    "required": ["measure", "b"],
    "additionalProperties": False,
    "properties": {
        "measure": MEASURE_SCHEMA,
        "b": {"type": "number"},
        "D": MATRIX,
        "phi_basis": MATRIX,
        "psi_basis": MATRIX,
        "V0": MATRIX,
    },
}

GRID_SCHEMA = {
    "oneOf": [
        {"type": "array", "minItems": 1, "items": COMPLEX},
        {"type": "object", "required": ["points"], "additionalProperties": False,
         "properties": {"points": {"type": "array", "minItems": 1, "items": COMPLEX},
                        "delta": {"type": "number", "exclusiveMinimum": 0}}},
    ]
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else ""


def validate(doc, schema, base: str = "") -> None:
    v = jsonschema.Draft202012Validator(schema)
    errs = sorted(v.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errs:
        e = errs[0]
        raise SpecError(e.message, base + _pointer(e.absolute_path))


def load_json(path) -> object:
    p = Path(path)
    if not p.is_file():
        raise SpecError(f"no such file: {p}", "")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {p}: {exc}", "") from exc


def matrix_from_json(a, dim: int | None = None, pointer: str = "") -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise SpecError("matrix must be square with [re, im] entries", pointer)
    m = arr[..., 0] + 1j * arr[..., 1]
    if dim is not None and m.shape[0] != dim:
        raise SpecError(f"matrix has size {m.shape[0]}, expected {dim}", pointer)
    return m


def measure_from_spec(doc, base: str = "", validate_measure: bool = True) -> MatrixMeasure:
    validate(doc, MEASURE_SCHEMA, base)
    dim = doc["dim"]
    kind = doc.get("kind", SIGMA)
    try:
        if "lattice" in doc:
            extra = set(doc) - {"dim", "kind", "lattice"}
            if extra or kind != SIGMA:
                raise SpecError("a lattice generator excludes other components and needs kind sigma",
                                base + "/lattice")
            g = doc["lattice"]
            return lattice_measure(g["step"], g["k_max"], dim, g.get("origin", 0.0), g.get("tail", True))
        locs, ws = [], []
        for k, a in enumerate(doc.get("atoms", [])):
            locs.append(a["lambda"])
            ws.append(matrix_from_json(a["weight"], dim, f"{base}/atoms/{k}/weight"))
        density = None
        tail = None
        if "density" in doc:
            d = doc["density"]
            try:
                density = named_density(d["expr"], dim, d.get("params"), d.get("smooth_windows"))
            except (TypeError, ValueError) as exc:
                raise SpecError(str(exc), base + "/density/params") from exc
            tail = DEFAULT_TAILS[d["expr"]](d.get("params") or {})
        if "tail" in doc:
            t = doc["tail"]
            tail = TailBound(t["C"], t["p"], t.get("cutoff", 0.0))
        lattice = None
        if "lattice_tail" in doc:
            t = doc["lattice_tail"]
            lattice = LatticeTail(t.get("origin", 0.0), t["step"], t["k_min"], t["k_max"],
                                  matrix_from_json(t["tau_weight"], dim, base + "/lattice_tail/tau_weight"))
        m = MatrixMeasure(dim=dim, kind=kind, locations=np.array(locs, dtype=float),
                          base_weights=np.array(ws).reshape(-1, dim, dim), density=density,
                          lattice=lattice, tail=tail)
        return m.validated() if validate_measure else m
    except SpecError:
        raise
    except (DimensionMismatch, KeyError) as exc:
        raise SpecError(str(exc), base) from exc
    except WTError as exc:
        exc.pointer = base
        raise


def measure_to_spec(measure: MatrixMeasure) -> dict:
    """Serialize atoms, a named density and a lattice tail (power must be zero with a density)."""
    doc = {"dim": measure.dim, "kind": measure.kind}
    if measure.locations.size:
        doc["atoms"] = [{"lambda": float(l), "weight": matrix_to_json(w)}
                        for l, w in zip(measure.locations, measure.weights)]
    if measure.density is not None:
        d = measure.density
        if measure.power != 0 or d.name not in NAMED_DENSITIES:
            raise ValueError("only unconverted named densities can be serialized")
        params = {k: v for k, v in d.params.items()}
        doc["density"] = {"expr": d.name, "params": params,
                          "smooth_windows": [list(w) for w in d.windows]}
        if d.name == "constant_on_interval":
            doc["density"].pop("smooth_windows")
    if measure.tail is not None:
        t = measure.tail_in()
        doc["tail"] = {"C": t.C, "p": t.p, "cutoff": t.cutoff}
    if measure.lattice is not None:
        t = measure.lattice
        doc["lattice_tail"] = {"origin": t.origin, "step": t.step, "k_min": t.k_min, "k_max": t.k_max,
                               "tau_weight": matrix_to_json(t.weight)}
    return doc


def context_from_spec(doc):
    from .extension_calculus import ExtensionContext

    validate(doc, CONTEXT_SCHEMA)
    measure = measure_from_spec(doc["measure"], "/measure")
    if measure.kind != SIGMA:
        measure = sigma_from_tau(measure)
    m = measure.dim
    D = matrix_from_json(doc["D"], m, "/D") if "D" in doc else np.eye(m)
    X = matrix_from_json(doc["phi_basis"], m, "/phi_basis") if "phi_basis" in doc else None
    Y = matrix_from_json(doc["psi_basis"], m, "/psi_basis") if "psi_basis" in doc else None
    V0 = matrix_from_json(doc["V0"], m, "/V0") if "V0" in doc else None
    try:
        ctx = ExtensionContext(measure, float(doc["b"]), D, X, Y)
    except (ValueError, WTError) as exc:
        raise SpecError(str(exc), "") from exc
    return ctx, V0


def grid_from_spec(doc) -> EvalGrid:
    validate(doc, GRID_SCHEMA)
    if isinstance(doc, dict):
        pts, delta = doc["points"], doc.get("delta", 1e-3)
    else:
        pts, delta = doc, 1e-3
    try:
        return EvalGrid.from_pairs(pts, delta)
    except ValueError as exc:
        raise SpecError(str(exc), "/points" if isinstance(doc, dict) else "") from exc
