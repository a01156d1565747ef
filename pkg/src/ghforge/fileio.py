"""Reading spaces and triples from JSON/CSV, and writing reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .metric import TOL, FiniteMetricSpace, MetricError, new_space


class InputError(ValueError):
    pass


def _read_text(path) -> str:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"input file not found: {p}")
    return p.read_text()


def _parse_csv(text: str, path) -> list[list[float]]:
    rows = [r for r in csv.reader(text.splitlines()) if any(c.strip() for c in r)]
    try:
        return [[float(c) for c in r] for r in rows]
    except ValueError as e:
        raise InputError(f"{path}: cannot parse CSV number ({e})") from None


def load_space(path, mode: str = "metric", tol: float = TOL) -> FiniteMetricSpace:
    """A space from ``{"labels": [...], "distances": [[...]]}`` JSON or an n x n CSV."""
    text = _read_text(path)
    labels = None
    if str(path).endswith(".csv"):
        matrix = _parse_csv(text, path)
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: invalid JSON ({e})") from None
        if isinstance(obj, dict):
            if "distances" not in obj:
                raise InputError(f"{path}: missing 'distances'")
            matrix = obj["distances"]
            labels = obj.get("labels")
        else:
            matrix = obj
    try:
        return new_space(matrix, mode=mode, labels=labels, tol=tol)
    except MetricError as e:
        raise MetricError(f"{path}: {e}", e.entry) from None
    except (TypeError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def load_triple(path) -> tuple[float, float, float]:
    """A raw triple: JSON ``[a, b, c]`` or ``{"triple": [a, b, c]}``, or one CSV line."""
    text = _read_text(path)
    if str(path).endswith(".csv"):
        rows = _parse_csv(text, path)
        values = [v for r in rows for v in r]
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: invalid JSON ({e})") from None
        values = obj.get("triple") if isinstance(obj, dict) else obj
    if not isinstance(values, list) or len(values) != 3:
        raise InputError(f"{path}: expected exactly three numbers")
    try:
        t = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise InputError(f"{path}: triple entries must be numbers") from None
    if not all(math.isfinite(v) for v in t):
        raise InputError(f"{path}: triple entries must be finite")
    return t


def save_space(space: FiniteMetricSpace, path) -> None:
    obj = {"distances": space.d.tolist()}
    if space.labels is not None:
        obj = {"labels": list(space.labels), **obj}
    Path(path).write_text(json.dumps(obj) + "\n")


def round_sig(obj, digits: int = 12):
    """Recursively round floats to ``digits`` significant digits for stable output."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.{digits}g}")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round_sig(obj.tolist(), digits)
    if isinstance(obj, dict):
        return {str(k): round_sig(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_sig(v, digits) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(round_sig(obj), sort_keys=True)
