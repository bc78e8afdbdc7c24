"""JSON readers and writers for spaces, measures and functions."""

from __future__ import annotations

import json
import sys
from functools import lru_cache
from pathlib import Path

from .errors import InvalidInput
from .func import DiscreteFunction
from .measure import SignedMeasure
from .metric import FiniteMetricSpace, from_matrix, from_points


@lru_cache(maxsize=None)
def _stdin_text() -> str:
    return sys.stdin.read()


def read_json(path) -> object:
    """Parse a JSON file; ``-`` reads standard input (once, then cached)."""
    try:
        text = _stdin_text() if str(path) == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}", path=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})", path=str(path)) from None


def _section(doc, key: str) -> dict:
    if not isinstance(doc, dict):
        raise InvalidInput(f"expected a JSON object for the {key}")
    inner = doc.get(key)
    return inner if isinstance(inner, dict) else doc


def space_from_json(doc) -> FiniteMetricSpace:
    """Accept ``{"dist": ...}``, ``{"points": ..., "metric": "euclidean"}``, or either under ``"space"``."""
    doc = _section(doc, "space")
    labels = doc.get("labels")
    if "dist" in doc:
        return from_matrix(doc["dist"], labels)
    if "points" in doc:
        metric = doc.get("metric", "euclidean")
        if metric != "euclidean":
            raise InvalidInput(f"unsupported metric {metric!r}")
        return from_points(doc["points"], labels)
    raise InvalidInput('space JSON needs a "dist" or "points" key')


def measure_from_json(doc, space: FiniteMetricSpace) -> SignedMeasure:
    doc = _section(doc, "measure")
    if "weights" not in doc:
        raise InvalidInput('measure JSON needs a "weights" key')
    return SignedMeasure(space, doc["weights"])


def function_from_json(doc, space: FiniteMetricSpace) -> DiscreteFunction:
    if not isinstance(doc, dict) or "values" not in doc:
        raise InvalidInput('function JSON needs a "values" key')
    return DiscreteFunction(space, doc["values"])


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=False, allow_nan=False)
