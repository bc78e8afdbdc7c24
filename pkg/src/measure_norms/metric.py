"""Finite metric spaces: validation and constructors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _accel
from .errors import AxiomViolation, DuplicatePoint, InvalidInput
from .rng import SplitMix64

SYMMETRY_TOL = 1e-12
TRIANGLE_TOL = 1e-9


def metric_violations(dist: np.ndarray) -> list[tuple[str, tuple[int, ...]]]:
    """Every axiom failure of a square matrix, grouped by kind."""
    n = dist.shape[0]
    out: list[tuple[str, tuple[int, ...]]] = []
    for i in np.flatnonzero(np.abs(np.diag(dist)) > SYMMETRY_TOL):
        out.append(("diagonal", (i,)))
    iu, ju = np.triu_indices(n, 1)
    for i, j in zip(iu, ju):
        if abs(dist[i, j] - dist[j, i]) > SYMMETRY_TOL:
            out.append(("symmetry", (i, j)))
    off = ~np.eye(n, dtype=bool)
    for i, j in np.argwhere(off & (dist <= 0.0)):
        out.append(("positivity", (i, j)))
    if n >= 3:
        # excess[i, j, k] = d(i,k) - d(i,j) - d(j,k)
        excess = dist[:, None, :] - dist[:, :, None] - dist[None, :, :]
        for i, j, k in np.argwhere(excess > TRIANGLE_TOL):
            out.append(("triangle", (i, j, k)))
    return out


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """``n`` points with a validated distance matrix.

    Construction validates all metric axioms; instances are immutable.
    """

    dist: np.ndarray
    labels: Optional[tuple[str, ...]] = field(default=None)

    def __post_init__(self):
        d = np.array(self.dist, dtype=float, copy=True)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
            raise InvalidInput(f"distance matrix must be square and non-empty, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise InvalidInput("distance matrix has non-finite entries")
        bad = metric_violations(d)
        if bad:
            raise AxiomViolation(bad)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != d.shape[0]:
                raise InvalidInput(f"{len(labels)} labels for {d.shape[0]} points")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def same_as(self, other: "FiniteMetricSpace") -> bool:
        return self is other or (self.n == other.n and np.array_equal(self.dist, other.dist))

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.same_as(other) and self.labels == other.labels

    __hash__ = object.__hash__

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, diameter={self.diameter:.6g})"

    def to_json(self) -> dict:
        out = {"dist": self.dist.tolist()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out


def from_matrix(entries, labels: Optional[Sequence[str]] = None) -> FiniteMetricSpace:
    return FiniteMetricSpace(np.asarray(entries, dtype=float), labels)


def from_points(coords, labels: Optional[Sequence[str]] = None) -> FiniteMetricSpace:
    """Euclidean distances between coordinate tuples (scalars count as 1-d)."""
    pts = np.asarray(coords, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise InvalidInput("points must form a non-empty list of equal-length tuples")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    n = pts.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if np.array_equal(pts[i], pts[j]):
                raise DuplicatePoint(i, j)
    return FiniteMetricSpace(dist, labels)


def shortest_path_closure(dist) -> np.ndarray:
    return _accel.closure(np.ascontiguousarray(dist, dtype=float))


def random_space(seed: int, n: int, mode: str = "euclidean-square") -> FiniteMetricSpace:
    """Deterministic random space.

    ``euclidean-square`` samples points uniformly in the unit square;
    ``shortest-path-closure`` samples symmetric weights in [0.1, 1) and
    closes them under shortest paths.
    """
    if n < 1:
        raise InvalidInput(f"n must be >= 1, got {n}")
    return random_space_from(SplitMix64(seed), n, mode)


def random_space_from(rng: SplitMix64, n: int, mode: str) -> FiniteMetricSpace:
    mode = _MODES.get(mode, mode)
    if mode == "euclidean-square":
        pts = np.array(rng.uniforms(2 * n)).reshape(n, 2)
        return from_points(pts)
    if mode == "shortest-path-closure":
        w = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                w[i, j] = w[j, i] = rng.uniform(0.1, 1.0)
        return FiniteMetricSpace(shortest_path_closure(w))
    raise InvalidInput(f"unknown space mode {mode!r}")


_MODES = {"euclidean": "euclidean-square", "closure": "shortest-path-closure"}
