"""Signed measures with finite support, stored densely over a space's points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, InvalidInput, SpaceMismatch
from .metric import FiniteMetricSpace


def _frozen(values, n: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    if arr.shape[0] != n:
        raise InvalidInput(f"{what} has length {arr.shape[0]}, space has {n} points")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{what} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    space: FiniteMetricSpace
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights, self.space.n, "weights"))

    def __repr__(self):
        return f"SignedMeasure({self.weights.tolist()})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, c):
        return scale(self, c)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"weights": self.weights.tolist()}


def check_same_space(a: FiniteMetricSpace, b: FiniteMetricSpace) -> None:
    if not a.same_as(b):
        raise SpaceMismatch(f"operands live on different spaces ({a!r} vs {b!r})")


def charge(mu: SignedMeasure) -> float:
    return float(mu.weights.sum())


def tv_norm(mu: SignedMeasure) -> float:
    return float(np.abs(mu.weights).sum())


def jordan(mu: SignedMeasure) -> tuple[SignedMeasure, SignedMeasure]:
    """Positive and negative parts, ``mu = plus - minus``."""
    w = mu.weights
    return (
        SignedMeasure(mu.space, np.maximum(w, 0.0)),
        SignedMeasure(mu.space, np.maximum(-w, 0.0)),
    )


def zero(space: FiniteMetricSpace) -> SignedMeasure:
    return SignedMeasure(space, np.zeros(space.n))


def dirac(space: FiniteMetricSpace, i: int) -> SignedMeasure:
    if not 0 <= i < space.n:
        raise IndexOutOfRange(i, space.n)
    w = np.zeros(space.n)
    w[i] = 1.0
    return SignedMeasure(space, w)


def scale(mu: SignedMeasure, c: float) -> SignedMeasure:
    return SignedMeasure(mu.space, mu.weights * float(c))


def add(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    check_same_space(mu.space, nu.space)
    return SignedMeasure(mu.space, mu.weights + nu.weights)


def sub(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    check_same_space(mu.space, nu.space)
    return SignedMeasure(mu.space, mu.weights - nu.weights)
