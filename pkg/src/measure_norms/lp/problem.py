"""LP and flow problem descriptions plus the solution record."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import InvalidSpec

RELATIONS = ("<=", "=", ">=")
_REL_ALIASES = {"<=": "<=", "≤": "<=", "le": "<=", "=": "=", "==": "=", "eq": "=",
                ">=": ">=", "≥": ">=", "ge": ">="}


@dataclass(frozen=True, eq=False)
class LpProblem:
    """``sense`` c·x subject to ``A x (rel) rhs`` row-wise and ``lower <= x <= upper``.

    Bounds default to ``0 <= x < inf``; use ``-np.inf`` for free variables.
    """

    c: np.ndarray
    A: np.ndarray
    relations: tuple
    rhs: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    sense: str = "min"

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = c.shape[0]
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2 or A.shape[1] != n:
            raise InvalidSpec(f"constraint matrix shape {A.shape} does not match {n} variables")
        m = A.shape[0]
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        if rhs.shape[0] != m:
            raise InvalidSpec(f"{rhs.shape[0]} right-hand sides for {m} rows")
        try:
            rel = tuple(_REL_ALIASES[r] for r in self.relations)
        except KeyError as exc:
            raise InvalidSpec(f"unknown relation {exc.args[0]!r}") from None
        if len(rel) != m:
            raise InvalidSpec(f"{len(rel)} relations for {m} rows")
        lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).reshape(-1)
        if lower.shape[0] != n or upper.shape[0] != n:
            raise InvalidSpec("bounds must have one entry per variable")
        if self.sense not in ("min", "max"):
            raise InvalidSpec(f"sense must be 'min' or 'max', got {self.sense!r}")
        for name, arr in (("objective", c), ("matrix", A), ("rhs", rhs)):
            if not np.all(np.isfinite(arr)):
                raise InvalidSpec(f"{name} has non-finite entries")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower > upper):
            raise InvalidSpec("bounds must satisfy lower <= upper")
        if np.any(lower == np.inf) or np.any(upper == -np.inf):
            raise InvalidSpec("bounds exclude every finite value")
        for name, arr in (("c", c), ("A", A), ("rhs", rhs), ("lower", lower), ("upper", upper)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "relations", rel)

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_rows(cls, c, rows, lower=None, upper=None, sense="min"):
        """Build from ``(coefficients, relation, rhs)`` triples."""
        c = np.asarray(c, dtype=float)
        rows = list(rows)
        A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), c.shape[0])
        return cls(c, A, tuple(r[1] for r in rows), [r[2] for r in rows], lower, upper, sense)


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Solver outcome.

    ``duals`` holds one value per constraint row, the sensitivity of the
    optimal objective to that row's right-hand side.
    """

    status: str
    x: Optional[np.ndarray]
    duals: Optional[np.ndarray]
    objective: float
    stats: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True, eq=False)
class FlowProblem:
    """Uncapacitated min-cost flow: ``supplies`` sum to zero, arcs carry cost >= 0."""

    supplies: np.ndarray
    tails: np.ndarray
    heads: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.supplies, dtype=float).reshape(-1)
        t = np.asarray(self.tails, dtype=np.int64).reshape(-1)
        h = np.asarray(self.heads, dtype=np.int64).reshape(-1)
        w = np.asarray(self.costs, dtype=float).reshape(-1)
        n = s.shape[0]
        if not (t.shape == h.shape == w.shape):
            raise InvalidSpec("arc arrays must have equal length")
        if not np.all(np.isfinite(s)) or not np.all(np.isfinite(w)):
            raise InvalidSpec("supplies and costs must be finite")
        if abs(s.sum()) > 1e-9:
            raise InvalidSpec(f"supplies sum to {s.sum():.3g}, not 0")
        if np.any(w < 0):
            raise InvalidSpec("arc costs must be nonnegative")
        if t.size and (t.min() < 0 or h.min() < 0 or t.max() >= n or h.max() >= n):
            raise InvalidSpec("arc endpoint out of range")
        for name, arr in (("supplies", s), ("tails", t), ("heads", h), ("costs", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_arcs(cls, supplies, arcs):
        """``arcs`` is a sequence of ``(tail, head, cost)``."""
        arcs = list(arcs)
        if not arcs:
            return cls(supplies, [], [], [])
        t, h, w = zip(*arcs)
        return cls(supplies, t, h, w)

    @classmethod
    def complete(cls, supplies, dist):
        """All ordered pairs ``i != j`` with cost ``dist[i, j]``."""
        dist = np.asarray(dist, dtype=float)
        n = dist.shape[0]
        t, h = np.nonzero(~np.eye(n, dtype=bool))
        return cls(supplies, t, h, dist[t, h])

    @property
    def n_nodes(self) -> int:
        return self.supplies.shape[0]

    def as_lp(self) -> LpProblem:
        """Node-arc incidence LP: out-flow minus in-flow equals supply."""
        n, k = self.n_nodes, self.tails.shape[0]
        A = np.zeros((n, k))
        A[self.tails, np.arange(k)] += 1.0
        A[self.heads, np.arange(k)] -= 1.0
        return LpProblem(self.costs, A, ("=",) * n, self.supplies)
