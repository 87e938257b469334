"""JSON encoding for rationals, complex numbers, density matrices and reports."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .density import DensityMatrix, InvalidStateError


def parse_rational(x) -> Fraction:
    """``Fraction`` from an int, a ``"p/q"`` string or an exactly representable float."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational")


def to_jsonable(x: Any) -> Any:
    """Rationals become ``"p/q"``, complex numbers ``[re, im]``; floats keep shortest repr."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, DensityMatrix):
        return matrix_to_json(x)
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()] if x.dtype != object else [to_jsonable(v) for v in x]
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: to_jsonable(getattr(x, f.name)) for f in dataclasses.fields(x) if not callable(getattr(x, f.name))}
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    raise TypeError(f"no JSON encoding for {type(x).__name__}")


def dumps(x: Any) -> str:
    return json.dumps(to_jsonable(x), sort_keys=True, indent=2)


def _entry(v):
    if isinstance(v, list):
        if len(v) != 2:
            raise InvalidStateError(f"complex entries are [re, im] pairs, got {v!r}")
        re, im = (parse_rational(u) for u in v)
        return complex(re, im) if im else re
    return parse_rational(v)


def matrix_from_json(obj, scenario: str = "real-9d") -> DensityMatrix:
    """Density matrix from 16 row-major values or a 4x4 nested list.

    Entries may be numbers, ``"p/q"`` strings or ``[re, im]`` pairs; an
    all-rational literal stays exact.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, dict):
        scenario = obj.get("scenario", scenario)
        obj = obj["entries"]
    nested = len(obj) == 4 and all(isinstance(r, list) and len(r) == 4 for r in obj)
    flat = [v for row in obj for v in row] if nested else list(obj)
    if len(flat) != 16:
        raise InvalidStateError(f"expected 16 entries, got {len(flat)}")
    vals = [_entry(v) for v in flat]
    if any(isinstance(v, complex) for v in vals):
        arr = np.array([complex(v) for v in vals]).reshape(4, 4)
    else:
        arr = np.empty((4, 4), dtype=object)
        for i, v in enumerate(vals):
            arr[i // 4, i % 4] = v
    return DensityMatrix(arr, scenario)


def matrix_to_json(rho: DensityMatrix) -> dict:
    flat = rho.entries.ravel()
    return {"scenario": rho.scenario, "entries": [to_jsonable(v) for v in flat]}


def config_hash(config: dict) -> str:
    canonical = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def report_envelope(command: str, config: dict, payload: Any) -> dict:
    return {"command": command, "version": __version__, "config": to_jsonable(config),
            "config_hash": config_hash(config), "result": to_jsonable(payload)}


def check_report_version(report: dict) -> None:
    if report.get("version") != __version__:
        raise ValueError(f"report was written by version {report.get('version')!r}, this is {__version__}")
    if report.get("config_hash") != config_hash(report.get("config", {})):
        raise ValueError("report config hash does not match its config")
