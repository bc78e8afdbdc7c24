"""Norms of signed measures as linear programs, with witnesses.

Dual programs optimise ``sum_i f_i mu_i`` over a function ball; primal
programs search over a zero-charge measure ``nu`` whose KR norm is written in
divergence form (arc flows ``plan[i, j]`` with net out-flow ``nu``), and a
split ``mu - nu = p - q`` with ``p, q >= 0``. The divergence form is exact
because distances satisfy the triangle inequality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInput, IndexOutOfRange, NotZeroCharge, NumericalFailure, PrimalDualGap
from .func import DiscreteFunction
from .lp import FlowProblem, LpProblem, solve_flow, solve_lp
from .measure import SignedMeasure, charge, jordan, tv_norm
from .metric import FiniteMetricSpace

log = logging.getLogger(__name__)

KINDS = ("tv", "kr", "mk", "hanin")
METHODS = ("primal", "dual", "both")
CHARGE_TOL = 1e-9
GAP_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class PrimalWitness:
    nu: SignedMeasure
    plan: np.ndarray
    p: SignedMeasure
    q: SignedMeasure

    def to_json(self) -> dict:
        return {
            "nu": self.nu.weights.tolist(),
            "plan": self.plan.tolist(),
            "p": self.p.weights.tolist(),
            "q": self.q.weights.tolist(),
        }


@dataclass(frozen=True, eq=False)
class NormCertificate:
    kind: str
    method: str
    value: float
    witness_f: Optional[DiscreteFunction] = None
    witness_primal: Optional[PrimalWitness] = None
    lp_stats: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "method": self.method, "value": self.value}
        if self.witness_f is not None:
            out["witness_f"] = self.witness_f.to_json()
        if self.witness_primal is not None:
            out["witness_primal"] = self.witness_primal.to_json()
        return out


def _require_zero_charge(nu: SignedMeasure) -> None:
    ch = charge(nu)
    if abs(ch) > CHARGE_TOL:
        raise NotZeroCharge(ch)


def _pairs(space: FiniteMetricSpace):
    n = space.n
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    return i, j, space.dist[i, j]


def _lipschitz_rows(space: FiniteMetricSpace, n_vars: int):
    """Rows ``f_i - f_j`` for every ordered pair ``i != j`` (f occupies columns 0..n-1)."""
    i, j, d = _pairs(space)
    rows = np.zeros((i.size, n_vars))
    r = np.arange(i.size)
    rows[r, i] = 1.0
    rows[r, j] = -1.0
    return rows, d


def _solved(sol, what):
    if not sol.optimal:
        raise NumericalFailure(f"{what}: LP reported {sol.status}", status=sol.status)
    return sol


def _value(v: float) -> float:
    # norms are nonnegative; clear roundoff below zero
    return max(float(v), 0.0)


# ------------------------------------------------------------------- KR ---


def kr_norm_primal(nu: SignedMeasure, backend: str = "flow") -> NormCertificate:
    """Cheapest transport of the positive part of ``nu`` onto its negative part."""
    _require_zero_charge(nu)
    space = nu.space
    n = space.n
    plus, minus = jordan(nu)
    supply = nu.weights.copy()
    if n:
        # absorb the tolerated charge residue so supplies balance exactly
        k = int(np.argmax(minus.weights)) if minus.weights.any() else int(np.argmax(plus.weights))
        supply[k] -= supply.sum()
    src = np.flatnonzero(supply > 0)
    dst = np.flatnonzero(supply < 0)
    tails = np.repeat(src, dst.size)
    heads = np.tile(dst, src.size)
    fp = FlowProblem(supply, tails, heads, space.dist[tails, heads])
    plan = np.zeros((n, n))
    stats = []
    if backend == "flow":
        res = solve_flow(fp)
        flows, value = res.flows, res.cost
        stats.append({"solver": "flow", **res.stats})
    elif backend == "lp":
        sol = _solved(solve_lp(fp.as_lp()), "kr primal")
        flows, value = np.maximum(sol.x, 0.0), sol.objective
        stats.append(sol.stats)
    else:
        raise InvalidInput(f"unknown KR backend {backend!r}")
    np.add.at(plan, (tails, heads), flows)
    zero = SignedMeasure(space, np.zeros(n))
    wit = PrimalWitness(nu, plan, zero, zero)
    return NormCertificate("kr", "primal", _value(value), witness_primal=wit, lp_stats=stats)


def kr_norm_dual(nu: SignedMeasure, base: int = 0, route: str = "auto") -> NormCertificate:
    """Best 1-Lipschitz ``f`` with ``f(base) = 0``."""
    _require_zero_charge(nu)
    space = nu.space
    n = space.n
    if not 0 <= base < n:
        raise IndexOutOfRange(base, n)
    rows, d = _lipschitz_rows(space, n)
    lower = np.full(n, -np.inf)
    upper = np.full(n, np.inf)
    lower[base] = upper[base] = 0.0
    lp = LpProblem(nu.weights, rows, ("<=",) * len(d), d, lower, upper, sense="max")
    sol = _solved(solve_lp(lp, route=route), "kr dual")
    f = sol.x[:n].copy()
    f -= f[base]
    return NormCertificate(
        "kr", "dual", _value(sol.objective), witness_f=DiscreteFunction(space, f), lp_stats=[sol.stats]
    )


# ------------------------------------------------------------ dual forms ---


def mk_dual_lp(mu: SignedMeasure) -> LpProblem:
    """Variables ``(f_0..f_{n-1}, L, S)``; ``lip(f) <= L``, ``|f| <= S``, ``L + S <= 1``."""
    n = mu.space.n
    nv = n + 2
    lip, d = _lipschitz_rows(mu.space, nv)
    lip[:, n] = -d
    sup_hi = np.zeros((n, nv))
    sup_hi[np.arange(n), np.arange(n)] = 1.0
    sup_hi[:, n + 1] = -1.0
    sup_lo = -sup_hi
    sup_lo[:, n + 1] = -1.0
    budget = np.zeros((1, nv))
    budget[0, n:] = 1.0
    A = np.vstack([lip, sup_hi, sup_lo, budget])
    rhs = np.concatenate([np.zeros(len(d) + 2 * n), [1.0]])
    lower = np.concatenate([np.full(n, -np.inf), [0.0, 0.0]])
    c = np.concatenate([mu.weights, [0.0, 0.0]])
    return LpProblem(c, A, ("<=",) * A.shape[0], rhs, lower, None, sense="max")


def hanin_dual_lp(mu: SignedMeasure) -> LpProblem:
    """Variables ``f`` with ``-1 <= f <= 1`` and ``f_i - f_j <= d_ij``."""
    n = mu.space.n
    rows, d = _lipschitz_rows(mu.space, n)
    return LpProblem(mu.weights, rows, ("<=",) * len(d), d, np.full(n, -1.0), np.full(n, 1.0), "max")


def mk_norm_dual(mu: SignedMeasure, route: str = "auto") -> NormCertificate:
    sol = _solved(solve_lp(mk_dual_lp(mu), route=route), "mk dual")
    f = DiscreteFunction(mu.space, sol.x[: mu.space.n])
    return NormCertificate("mk", "dual", _value(sol.objective), witness_f=f, lp_stats=[sol.stats])


def hanin_norm_dual(mu: SignedMeasure, route: str = "auto") -> NormCertificate:
    sol = _solved(solve_lp(hanin_dual_lp(mu), route=route), "hanin dual")
    f = DiscreteFunction(mu.space, np.clip(sol.x, -1.0, 1.0))
    return NormCertificate("hanin", "dual", _value(sol.objective), witness_f=f, lp_stats=[sol.stats])


# ---------------------------------------------------------- primal forms ---


class _PrimalLayout:
    """Column layout ``[z?] nu(n) plan(n(n-1)) p(n) q(n)`` and the shared rows."""

    def __init__(self, mu: SignedMeasure, with_z: bool):
        space = mu.space
        n = space.n
        self.n = n
        self.pi, self.pj, self.pd = _pairs(space)
        n_arcs = self.pi.size
        o = 1 if with_z else 0
        self.z = 0 if with_z else None
        self.nu = np.arange(o, o + n)
        self.arc = np.arange(o + n, o + n + n_arcs)
        self.p = np.arange(o + n + n_arcs, o + 2 * n + n_arcs)
        self.q = np.arange(o + 2 * n + n_arcs, o + 3 * n + n_arcs)
        nv = o + 3 * n + n_arcs
        self.n_vars = nv

        charge_row = np.zeros((1, nv))
        charge_row[0, self.nu] = 1.0
        div = np.zeros((n, nv))
        div[self.pi, self.arc] += 1.0
        div[self.pj, self.arc] -= 1.0
        div[np.arange(n), self.nu] = -1.0
        split = np.zeros((n, nv))
        split[np.arange(n), self.nu] = 1.0
        split[np.arange(n), self.p] = 1.0
        split[np.arange(n), self.q] = -1.0
        self.A = np.vstack([charge_row, div, split])
        self.rhs = np.concatenate([[0.0], np.zeros(n), mu.weights])
        self.lower = np.zeros(nv)
        self.lower[self.nu] = -np.inf

    def witness(self, mu: SignedMeasure, x: np.ndarray) -> PrimalWitness:
        n, space = self.n, mu.space
        plan = np.zeros((n, n))
        plan[self.pi, self.pj] = np.maximum(x[self.arc], 0.0)
        return PrimalWitness(
            SignedMeasure(space, x[self.nu]),
            plan,
            SignedMeasure(space, np.maximum(x[self.p], 0.0)),
            SignedMeasure(space, np.maximum(x[self.q], 0.0)),
        )


def mk_primal_lp(mu: SignedMeasure):
    lay = _PrimalLayout(mu, with_z=True)
    transport = np.zeros((1, lay.n_vars))
    transport[0, lay.z] = 1.0
    transport[0, lay.arc] = -lay.pd
    variation = np.zeros((1, lay.n_vars))
    variation[0, lay.z] = 1.0
    variation[0, lay.p] = -1.0
    variation[0, lay.q] = -1.0
    A = np.vstack([lay.A, transport, variation])
    rel = ("=",) * lay.A.shape[0] + (">=", ">=")
    c = np.zeros(lay.n_vars)
    c[lay.z] = 1.0
    return LpProblem(c, A, rel, np.concatenate([lay.rhs, [0.0, 0.0]]), lay.lower, None), lay


def hanin_primal_lp(mu: SignedMeasure):
    lay = _PrimalLayout(mu, with_z=False)
    c = np.zeros(lay.n_vars)
    c[lay.arc] = lay.pd
    c[lay.p] = 1.0
    c[lay.q] = 1.0
    return LpProblem(c, lay.A, ("=",) * lay.A.shape[0], lay.rhs, lay.lower, None), lay


def mk_norm_primal(mu: SignedMeasure, route: str = "auto") -> NormCertificate:
    """Smallest ``max(KR(nu), TV(mu - nu))`` over zero-charge ``nu``."""
    lp, lay = mk_primal_lp(mu)
    sol = _solved(solve_lp(lp, route=route), "mk primal")
    return NormCertificate(
        "mk", "primal", _value(sol.objective), witness_primal=lay.witness(mu, sol.x), lp_stats=[sol.stats]
    )


def hanin_norm_primal(mu: SignedMeasure, route: str = "auto") -> NormCertificate:
    """Smallest ``KR(nu) + TV(mu - nu)`` over zero-charge ``nu``."""
    lp, lay = hanin_primal_lp(mu)
    sol = _solved(solve_lp(lp, route=route), "hanin primal")
    return NormCertificate(
        "hanin", "primal", _value(sol.objective), witness_primal=lay.witness(mu, sol.x), lp_stats=[sol.stats]
    )


# -------------------------------------------------------------------- TV ---


def tv_certificate(mu: SignedMeasure, method: str = "primal") -> NormCertificate:
    space = mu.space
    value = tv_norm(mu)
    if method == "dual":
        return NormCertificate("tv", "dual", value, witness_f=DiscreteFunction(space, np.sign(mu.weights)))
    plus, minus = jordan(mu)
    zero = SignedMeasure(space, np.zeros(space.n))
    wit = PrimalWitness(zero, np.zeros((space.n, space.n)), plus, minus)
    return NormCertificate("tv", method, value, witness_primal=wit)


# -------------------------------------------------------------- dispatch ---

_PRIMAL = {"kr": kr_norm_primal, "mk": mk_norm_primal, "hanin": hanin_norm_primal}
_DUAL = {"mk": mk_norm_dual, "hanin": hanin_norm_dual}


def norm(mu: SignedMeasure, kind: str, method: str = "primal", base: int = 0, tol: float = GAP_TOL) -> NormCertificate:
    """Compute ``kind`` by ``method``; ``both`` cross-checks and reports the primal value.

    Raises :class:`PrimalDualGap` when the two values differ by more than
    ``tol * (1 + value)``.
    """
    if kind not in KINDS:
        raise InvalidInput(f"unknown norm kind {kind!r}; expected one of {KINDS}")
    if method not in METHODS:
        raise InvalidInput(f"unknown method {method!r}; expected one of {METHODS}")
    if kind == "tv":
        if method != "both":
            return tv_certificate(mu, method)
        pri, dua = tv_certificate(mu, "primal"), tv_certificate(mu, "dual")
    else:
        def dual(m):
            return kr_norm_dual(m, base) if kind == "kr" else _DUAL[kind](m)

        if method == "primal":
            return _PRIMAL[kind](mu)
        if method == "dual":
            return dual(mu)
        pri, dua = _PRIMAL[kind](mu), dual(mu)
    if abs(pri.value - dua.value) > tol * (1.0 + abs(pri.value)):
        raise PrimalDualGap(pri.value, dua.value)
    log.info("%s norm: primal %.12g dual %.12g", kind, pri.value, dua.value)
    return NormCertificate(
        kind, "both", pri.value, dua.witness_f, pri.witness_primal, pri.lp_stats + dua.lp_stats
    )
