"""Real functions on the points of a finite metric space and their norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .measure import SignedMeasure, _frozen, check_same_space
from .metric import FiniteMetricSpace


@dataclass(frozen=True, eq=False)
class DiscreteFunction:
    space: FiniteMetricSpace
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.space.n, "values"))

    def __repr__(self):
        return f"DiscreteFunction({self.values.tolist()})"

    def vanishes_at(self, base: int, tol: float = 0.0) -> bool:
        return abs(self.values[base]) <= tol

    def to_json(self) -> dict:
        return {"values": self.values.tolist()}


def lip_seminorm(f: DiscreteFunction) -> float:
    """Largest ``|f(x) - f(y)| / d(x, y)`` over distinct pairs; 0 on one point."""
    if f.space.n < 2:
        return 0.0
    return float(_accel.lip_ratio(f.values, f.space.dist))


def sup_norm(f: DiscreteFunction) -> float:
    return float(np.abs(f.values).max())


def sum_norm(f: DiscreteFunction) -> float:
    return lip_seminorm(f) + sup_norm(f)


def max_norm(f: DiscreteFunction) -> float:
    return max(lip_seminorm(f), sup_norm(f))


def integrate(f: DiscreteFunction, mu: SignedMeasure) -> float:
    check_same_space(f.space, mu.space)
    return float(np.dot(f.values, mu.weights))
