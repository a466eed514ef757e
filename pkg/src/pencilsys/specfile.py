"""JSON system definitions for the command line.

A file looks like::

    {
      "F": [[1, 0], [0, 0]],
      "G": [[-1, 0], [0, 1]],
      "B": [[1, 0], [0, 1]],
      "input": {"kind": "constant", "value": [0, 1]},
      "Y0": [3, -1],
      "t0": 0.0,
      "grid": {"t_end": 2.0, "points": 101},
      "options": {"rank_tol": 1e-10, "T": 0.1, "order_n": 0.5, "steps": 20}
    }

``input`` may also be a list of signal objects, which are summed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import signals
from .linalg import Tolerance


class ParseError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.field = path


@dataclass
class SystemSpec:
    F: np.ndarray
    G: np.ndarray
    B: np.ndarray
    input: signals.InputSignal
    Y0: np.ndarray
    t0: float = 0.0
    grid: dict = field(default_factory=lambda: {"t_end": 1.0, "points": 101})
    options: dict = field(default_factory=dict)
    raw: bytes = b""

    @property
    def m(self) -> int:
        return self.F.shape[0]

    def tolerance(self, **overrides) -> Tolerance:
        kw = {k: self.options[k] for k in ("rank_tol", "residual_tol", "cluster_tol") if k in self.options}
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return Tolerance(**kw)


_OPTION_TYPES = {
    "rank_tol": float, "residual_tol": float, "cluster_tol": float, "exact": bool,
    "T": float, "order_n": float, "steps": int,
}


def _matrix(obj, path, rows=None, cols=None) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError(path, "expected a non-empty list of rows")
    width = len(obj[0])
    for i, row in enumerate(obj):
        if len(row) != width:
            raise ParseError(f"{path}[{i}]", f"row has {len(row)} entries, expected {width}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{path}[{i}][{j}]", f"expected a number, got {v!r}")
    A = np.array(obj, dtype=float)
    if rows is not None and A.shape[0] != rows:
        raise ParseError(path, f"expected {rows} rows, got {A.shape[0]}")
    if cols is not None and A.shape[1] != cols:
        raise ParseError(path, f"expected {cols} columns, got {A.shape[1]}")
    return A


def _vector(obj, path, size=None) -> np.ndarray:
    if not isinstance(obj, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in obj):
        raise ParseError(path, "expected a list of numbers")
    v = np.array(obj, dtype=float)
    if size is not None and v.size != size:
        raise ParseError(path, f"expected {size} entries, got {v.size}")
    return v


def _number(obj, path) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ParseError(path, f"expected a number, got {obj!r}")
    return float(obj)


def _signal(obj, path, r) -> signals.InputSignal:
    if isinstance(obj, list):
        if not obj:
            raise ParseError(path, "empty signal list")
        parts = [_signal(o, f"{path}[{i}]", r) for i, o in enumerate(obj)]
        if not all(isinstance(p, signals.ExosystemSignal) for p in parts):
            raise ParseError(path, "only smooth signals (not zoh) can be summed")
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        return total
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(path, "expected an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "zero":
        return signals.constant(np.zeros(r))
    if kind == "constant":
        return signals.constant(_vector(obj.get("value"), f"{path}.value", r))
    if kind == "polynomial":
        return signals.polynomial(_matrix(obj.get("coeffs"), f"{path}.coeffs", rows=r))
    if kind == "exponential":
        rates = _vector(obj.get("rates"), f"{path}.rates")
        amps = _matrix(obj.get("amplitudes"), f"{path}.amplitudes", rows=r, cols=rates.size)
        return signals.exponential_sum(amps, rates)
    if kind == "sinusoid":
        a = _vector(obj.get("sin", [0.0] * r), f"{path}.sin", r)
        b = _vector(obj.get("cos", [0.0] * r), f"{path}.cos", r)
        off = _vector(obj.get("offset", [0.0] * r), f"{path}.offset", r)
        return signals.sinusoid(a, b, _number(obj.get("omega"), f"{path}.omega"), off)
    if kind == "zoh":
        values = _matrix(obj.get("values"), f"{path}.values", cols=r)
        T = _number(obj.get("T"), f"{path}.T")
        if T <= 0:
            raise ParseError(f"{path}.T", "sampling period must be positive")
        return signals.ZOHSignal(values, T, _number(obj.get("t_start", 0.0), f"{path}.t_start"))
    raise ParseError(f"{path}.kind", f"unknown signal kind {kind!r}")


def parse_spec(data: dict, raw: bytes = b"") -> SystemSpec:
    if not isinstance(data, dict):
        raise ParseError("", "top level must be an object")
    for key in ("F", "G"):
        if key not in data:
            raise ParseError(key, "missing")
    F = _matrix(data["F"], "F")
    m = F.shape[0]
    if F.shape[1] != m:
        raise ParseError("F", f"must be square, got {F.shape[0]}x{F.shape[1]}")
    G = _matrix(data["G"], "G", rows=m, cols=m)
    B = _matrix(data["B"], "B", rows=m) if "B" in data else np.eye(m)
    r = B.shape[1]
    V = _signal(data.get("input", {"kind": "zero"}), "input", r)
    Y0 = _vector(data.get("Y0", [0.0] * m), "Y0", m)
    t0 = _number(data.get("t0", 0.0), "t0")
    grid = {"t_end": t0 + 1.0, "points": 101}
    if "grid" in data:
        g = data["grid"]
        if not isinstance(g, dict):
            raise ParseError("grid", "expected an object")
        if "t_end" in g:
            grid["t_end"] = _number(g["t_end"], "grid.t_end")
        if "points" in g:
            if not isinstance(g["points"], int) or g["points"] < 1:
                raise ParseError("grid.points", "expected a positive integer")
            grid["points"] = g["points"]
    options = {}
    for key, value in data.get("options", {}).items():
        if key not in _OPTION_TYPES:
            raise ParseError(f"options.{key}", "unknown option")
        typ = _OPTION_TYPES[key]
        if typ is bool:
            if not isinstance(value, bool):
                raise ParseError(f"options.{key}", "expected true/false")
        elif typ is int:
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ParseError(f"options.{key}", "expected a nonnegative integer")
        else:
            value = _number(value, f"options.{key}")
        options[key] = value
    unknown = set(data) - {"F", "G", "B", "input", "Y0", "t0", "grid", "options", "description"}
    if unknown:
        raise ParseError(sorted(unknown)[0], "unknown field")
    return SystemSpec(F, G, B, V, Y0, t0, grid, options, raw)


def load_spec(path) -> SystemSpec:
    raw = Path(path).read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError("", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_spec(data, raw)
