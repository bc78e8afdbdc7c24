"""Grid discretizations of densities on [0, 1] and their MK refinement distances.

A density at resolution ``n`` becomes point masses on the grid
``i / (n - 1)`` (the single point 0.5 when ``n = 1``), one mass per equal
cell ``[k/n, (k+1)/n]``. Successive refinements are compared inside the union
of both grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInput, UnknownDensity
from .measure import SignedMeasure
from .metric import FiniteMetricSpace, from_points
from .norms import mk_norm_dual, mk_norm_primal

MERGE_TOL = 1e-12


def _triangle(x):
    return np.where(x <= 0.5, 4.0 * x, 4.0 * (1.0 - x))


def _triangle_cdf(x):
    return np.where(x <= 0.5, 2.0 * x**2, 1.0 - 2.0 * (1.0 - x) ** 2)


# name -> (density, antiderivative, total mass on [0, 1])
DENSITIES: dict[str, tuple[Callable, Callable, float]] = {
    "uniform": (np.ones_like, lambda x: np.asarray(x, dtype=float), 1.0),
    "triangle": (_triangle, _triangle_cdf, 1.0),
    "signed-cosine": (
        lambda x: np.cos(2.0 * np.pi * x),
        lambda x: np.sin(2.0 * np.pi * x) / (2.0 * np.pi),
        0.0,
    ),
}


def _lookup(density: str):
    try:
        return DENSITIES[density]
    except KeyError:
        raise UnknownDensity(f"unknown density {density!r}; expected one of {sorted(DENSITIES)}") from None


def grid_points(n: int) -> np.ndarray:
    if n < 1:
        raise InvalidInput(f"resolution must be >= 1, got {n}")
    if n == 1:
        return np.array([0.5])
    return np.arange(n) / (n - 1)


def cell_masses(density: str, n: int, rule: str = "exact") -> np.ndarray:
    """Mass of each of the ``n`` equal cells.

    ``exact`` integrates the density in closed form, so the total is the same
    at every resolution; ``midpoint`` samples the density at cell centres.
    """
    rho, cdf, _ = _lookup(density)
    if n < 1:
        raise InvalidInput(f"resolution must be >= 1, got {n}")
    edges = np.arange(n + 1) / n
    if rule == "exact":
        return np.diff(cdf(edges))
    if rule == "midpoint":
        return rho(0.5 * (edges[:-1] + edges[1:])) / n
    raise InvalidInput(f"unknown quadrature rule {rule!r}")


def discretize(density: str, n: int, rule: str = "exact") -> tuple[FiniteMetricSpace, SignedMeasure]:
    pts = grid_points(n)
    space = from_points(pts)
    return space, SignedMeasure(space, cell_masses(density, n, rule))


@dataclass(frozen=True)
class GridMeasureFamily:
    density: str
    rule: str = "exact"

    def __post_init__(self):
        _lookup(self.density)

    @property
    def total_charge(self) -> float:
        return DENSITIES[self.density][2]

    def at(self, n: int) -> tuple[FiniteMetricSpace, SignedMeasure]:
        return discretize(self.density, n, self.rule)


def merge_grids(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sorted union of two point sets and the position of each input point in it."""
    allpts = np.concatenate([a, b])
    order = np.argsort(allpts, kind="stable")
    union = []
    where = np.empty(allpts.size, dtype=np.int64)
    for idx in order:
        x = allpts[idx]
        if not union or x - union[-1] > MERGE_TOL:
            union.append(x)
        where[idx] = len(union) - 1
    return np.array(union), where[: a.size], where[a.size :]


def refinement_distance(density: str, n: int, rule: str = "exact", method: str = "dual") -> float:
    """MK norm between the resolution-``n`` and resolution-``2n`` discretizations."""
    if n < 1:
        raise InvalidInput(f"resolution must be >= 1, got {n}")
    coarse_pts, fine_pts = grid_points(n), grid_points(2 * n)
    union, ia, ib = merge_grids(coarse_pts, fine_pts)
    w = np.zeros(union.size)
    np.add.at(w, ia, cell_masses(density, n, rule))
    np.add.at(w, ib, -cell_masses(density, 2 * n, rule))
    diff = SignedMeasure(from_points(union), w)
    solver = mk_norm_dual if method == "dual" else mk_norm_primal
    return solver(diff).value


def transport_bound(n: int) -> float:
    """Upper bound on the uniform refinement distance at resolution ``n``."""
    return 1.0 / (2 * n)


def density_series(density: str, max_resolution: int, rule: str = "exact") -> list[dict]:
    """Distances at ``n = 1, 2, 4, ...`` up to ``max_resolution``."""
    if max_resolution < 1:
        raise InvalidInput(f"max resolution must be >= 1, got {max_resolution}")
    out = []
    for k in range(int(math.log2(max_resolution)) + 1):
        n = 2**k
        out.append({"n": n, "distance": refinement_distance(density, n, rule)})
    return out
