"""Two-phase dense tableau simplex with primal and dual certificates.

Every LP is first rewritten as ``min c·x, G x >= h, E x = e, x >= 0``. That
canonical problem is solved either directly or through its dual, whichever
gives the smaller tableau; the other side's certificate is read off the
final basis. Pivoting is Dantzig's rule until a pivot budget is spent, then
Bland's rule. Ties go to the lowest index, so solves are reproducible.
"""

from __future__ import annotations

import logging

import numpy as np

from .. import _accel
from ..errors import NumericalFailure
from .problem import LpProblem, LpSolution

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
FEAS_TOL = 1e-8
REFACTOR_EVERY = 200
MAX_REFRESH = 50


class _Canonical:
    """``x_orig = M @ x + offset`` with ``x >= 0``; rows split into G (>=) and E (=)."""

    def __init__(self, p: LpProblem):
        n = p.n_vars
        cols, signs, bound_rows = [], [], []
        offset = np.zeros(n)
        for j in range(n):
            lo, hi = p.lower[j], p.upper[j]
            if lo == hi:
                offset[j] = lo
            elif np.isfinite(lo):
                offset[j] = lo
                cols.append(j)
                signs.append(1.0)
                if np.isfinite(hi):
                    bound_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append(j)
                signs.append(-1.0)
            else:
                cols.extend((j, j))
                signs.extend((1.0, -1.0))
        k = len(cols)
        M = np.zeros((n, k))
        M[cols, np.arange(k)] = signs
        self.M, self.offset, self.k = M, offset, k

        sign = 1.0 if p.sense == "min" else -1.0
        self.sense_sign = sign
        self.c = sign * (p.c @ M)
        self.const = sign * float(p.c @ offset)

        AM = p.A @ M
        rhs = p.rhs - p.A @ offset
        rel = np.array(p.relations, dtype=object)
        ge = np.flatnonzero(rel == ">=")
        le = np.flatnonzero(rel == "<=")
        eq = np.flatnonzero(rel == "=")
        G_parts = [AM[ge], -AM[le]]
        h_parts = [rhs[ge], -rhs[le]]
        if bound_rows:
            B = np.zeros((len(bound_rows), k))
            for r, (col, width) in enumerate(bound_rows):
                B[r, col] = -1.0
            G_parts.append(B)
            h_parts.append(-np.array([w for _, w in bound_rows]))
        self.G = np.vstack(G_parts) if G_parts else np.zeros((0, k))
        self.h = np.concatenate(h_parts) if h_parts else np.zeros(0)
        self.E, self.e = AM[eq], rhs[eq]
        # original row index -> (block, position, sign)
        self.row_map = [None] * p.n_rows
        for pos, i in enumerate(ge):
            self.row_map[i] = ("G", pos, 1.0)
        for pos, i in enumerate(le):
            self.row_map[i] = ("G", len(ge) + pos, -1.0)
        for pos, i in enumerate(eq):
            self.row_map[i] = ("E", pos, 1.0)

    def original_duals(self, yG, yE):
        out = np.empty(len(self.row_map))
        for i, (block, pos, s) in enumerate(self.row_map):
            out[i] = s * (yG[pos] if block == "G" else yE[pos])
        return self.sense_sign * out


def _refactor(T, basis, A, b, cost):
    """Rebuild tableau ``T`` from the original data for the current basis."""
    m = A.shape[0]
    if m == 0:
        T[0, :-1] = cost
        T[0, -1] = 0.0
        return True
    B = A[:, basis]
    try:
        T[:m, :-1] = np.linalg.solve(B, A)
        xb = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        return False
    xb[(xb < 0) & (xb > -FEAS_TOL)] = 0.0
    T[:m, -1] = xb
    T[m, :-1] = cost - A.T @ y
    T[m, basis] = 0.0
    T[m, -1] = -float(cost[basis] @ xb)
    T[:m, basis] = np.eye(m)
    return True


def _iterate(T, basis, A, b, cost, n_enter, pivots, max_iter, bland_after, what):
    """Pivot to optimality, refactoring every ``REFACTOR_EVERY`` pivots and at the end."""
    loop = _accel.simplex_loop
    rounds = 0
    while True:
        budget = min(max_iter, pivots + REFACTOR_EVERY)
        status, pivots = loop(T, basis, n_enter, budget, bland_after, COST_TOL, PIVOT_TOL, pivots)
        if not _refactor(T, basis, A, b, cost):
            raise NumericalFailure(f"{what}: singular basis", pivots=int(pivots))
        if status == _accel.STATUS_ITERATION_LIMIT:
            if pivots >= max_iter:
                raise NumericalFailure(f"{what} hit the pivot limit", pivots=int(pivots))
            continue
        m = T.shape[0] - 1
        rc = T[m, :n_enter]
        if status == _accel.STATUS_OPTIMAL and (rc.size == 0 or rc.min() >= -COST_TOL):
            return status, pivots
        if status == _accel.STATUS_UNBOUNDED:
            # re-check the unbounded ray on the refreshed tableau
            q = None
            cand = np.flatnonzero(rc < -COST_TOL)
            for j in cand:
                if not np.any(T[:m, j] > PIVOT_TOL):
                    q = j
                    break
            if q is not None:
                return status, pivots
        rounds += 1
        if rounds > MAX_REFRESH:
            raise NumericalFailure(f"{what}: tableau does not settle after refactoring", pivots=int(pivots))


def _solve_standard(A, b, c, max_iter=None, bland_after=None):
    """``min c·x, A x = b, x >= 0``.

    Returns ``(status, x, y, stats)`` where ``y`` is the dual (``A.T y <= c``).
    Status is ``optimal``, ``infeasible`` or ``unbounded``.
    """
    m, n = A.shape
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    if max_iter is None:
        max_iter = 100 * (m + n) + 10_000
    if bland_after is None:
        bland_after = 5 * (m + n) + 200

    basis = np.full(m, -1, dtype=np.int64)
    if m:
        nnz = np.count_nonzero(A, axis=0)
        for j in np.flatnonzero(nnz == 1):
            i = int(np.flatnonzero(A[:, j])[0])
            if A[i, j] == 1.0 and basis[i] < 0:
                basis[i] = j
    need = np.flatnonzero(basis < 0)
    n_art = need.size

    T = np.zeros((m + 1, n + n_art + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    T[need, n + np.arange(n_art)] = 1.0
    basis[need] = n + np.arange(n_art)
    stats = {"rows": m, "cols": n, "artificials": int(n_art), "pivots": 0, "phase1_pivots": 0,
             "backend": _accel.BACKEND}
    pivots = 0

    keep = np.arange(m)
    if n_art:
        A1 = T[:m, :-1].copy()
        cost1 = np.zeros(n + n_art)
        cost1[n:] = 1.0
        T[m, :] = -T[need].sum(axis=0)
        T[m, n : n + n_art] = 0.0
        status, pivots = _iterate(T, basis, A1, b, cost1, n + n_art, 0, max_iter, bland_after, "phase 1")
        stats["phase1_pivots"] = int(pivots)
        infeas = -T[m, -1]
        if infeas > FEAS_TOL * (1.0 + (b.max() if m else 0.0)):
            stats["pivots"] = int(pivots)
            return "infeasible", None, None, stats
        # tableau positions to drop, and the original rows they make redundant
        drop, redundant = [], []
        pivot = _accel.pivot
        for r in range(m):
            if basis[r] < n:
                continue
            row = np.abs(T[r, :n])
            j = int(np.argmax(row)) if n else -1
            if j >= 0 and row[j] > PIVOT_TOL:
                pivot(T, r, j)
                basis[r] = j
                pivots += 1
            else:
                drop.append(r)
                # artificial column n + a has its unit entry in original row need[a]
                redundant.append(int(need[basis[r] - n]))
        keep = np.setdiff1d(np.arange(m), redundant)
        T = np.ascontiguousarray(np.delete(np.delete(T, drop, axis=0), np.s_[n : n + n_art], axis=1))
        basis = np.ascontiguousarray(np.delete(basis, drop))
        stats["redundant_rows"] = len(drop)
    else:
        T = np.ascontiguousarray(np.delete(T, np.s_[n : n + n_art], axis=1))

    mk = keep.size
    Ak, bk = A[keep], b[keep]
    T[mk, :] = 0.0
    T[mk, :n] = c
    for r in range(mk):
        cb = c[basis[r]]
        if cb != 0.0:
            T[mk, :] -= cb * T[r, :]
    status, pivots = _iterate(T, basis, Ak, bk, c, n, pivots, max_iter, bland_after, "phase 2")
    stats["pivots"] = int(pivots)
    if status == _accel.STATUS_UNBOUNDED:
        return "unbounded", None, None, stats

    x = np.zeros(n)
    y = np.zeros(m)
    x[basis] = T[:mk, -1]
    if mk:
        y[keep] = np.linalg.solve(Ak[:, basis].T, c[basis])
    x[(x < 0) & (x > -FEAS_TOL)] = 0.0
    y[flip] *= -1.0
    return "optimal", x, y, stats


def _check(A, b, c, x, y, what):
    """Residuals of a standard-form certificate; raise if any exceeds tolerance."""
    scale_b = 1.0 + (np.abs(b).max() if b.size else 0.0)
    scale_c = 1.0 + (np.abs(c).max() if c.size else 0.0)
    primal = max(np.abs(A @ x - b).max() if b.size else 0.0, max(0.0, -x.min()) if x.size else 0.0)
    dual = max(0.0, (A.T @ y - c).max()) if c.size else 0.0
    pobj, dobj = float(c @ x), float(b @ y)
    gap = abs(pobj - dobj)
    res = {"primal": float(primal), "dual": float(dual), "gap": gap}
    if primal > FEAS_TOL * scale_b or dual > FEAS_TOL * scale_c or gap > FEAS_TOL * (1.0 + abs(pobj)):
        raise NumericalFailure(f"{what} certificate residuals out of tolerance", **res)
    return res


def _primal_route(can: _Canonical, **kw):
    mG, mE, k = can.G.shape[0], can.E.shape[0], can.k
    A = np.zeros((mG + mE, k + mG))
    A[:mG, :k] = can.G
    A[:mG, k:] = -np.eye(mG)
    A[mG:, :k] = can.E
    b = np.concatenate([can.h, can.e])
    c = np.concatenate([can.c, np.zeros(mG)])
    status, z, y, stats = _solve_standard(A, b, c, **kw)
    stats["route"] = "primal"
    if status != "optimal":
        return status, None, None, stats
    stats["residuals"] = _check(A, b, c, z, y, "primal-route")
    return status, z[:k], (y[:mG], y[mG:]), stats


def _dual_route(can: _Canonical, **kw):
    # max h·y + e·w  s.t.  G.T y + E.T w <= c,  y >= 0,  w free
    mG, mE, k = can.G.shape[0], can.E.shape[0], can.k
    A = np.hstack([can.G.T, can.E.T, -can.E.T, np.eye(k)])
    b = can.c
    c = -np.concatenate([can.h, can.e, -can.e, np.zeros(k)])
    status, z, u, stats = _solve_standard(A, b, c, **kw)
    stats["route"] = "dual"
    if status == "unbounded":
        return "infeasible", None, None, stats
    if status == "infeasible":
        return None, None, None, stats
    stats["residuals"] = _check(A, b, c, z, u, "dual-route")
    yG = z[:mG]
    yE = z[mG : mG + mE] - z[mG + mE : mG + 2 * mE]
    return status, -u, (yG, yE), stats


def solve_lp(p: LpProblem, route: str = "auto", max_iter=None, bland_after=None) -> LpSolution:
    """Solve ``p`` and return primal values, row duals and objective.

    ``route`` forces the tableau onto the primal (``"primal"``) or dual
    (``"dual"``) canonical problem; ``"auto"`` picks the one with fewer rows.
    Raises :class:`NumericalFailure` when the certificates fail their residual
    checks or the pivot budget runs out.
    """
    can = _Canonical(p)
    kw = {"max_iter": max_iter, "bland_after": bland_after}
    m_rows = can.G.shape[0] + can.E.shape[0]
    if route == "auto":
        route = "dual" if m_rows > can.k else "primal"
    if route == "dual":
        status, x, ys, stats = _dual_route(can, **kw)
        if status is None:
            # dual infeasible: the primal is unbounded or infeasible
            status, x, ys, stats = _primal_route(can, **kw)
    elif route == "primal":
        status, x, ys, stats = _primal_route(can, **kw)
    else:
        raise ValueError(f"unknown route {route!r}")
    log.debug("lp %s: %s", stats.get("route"), {k: v for k, v in stats.items() if k != "residuals"})
    stats["canonical"] = {"vars": can.k, "rows": m_rows}

    if status != "optimal":
        if status == "unbounded":
            obj = np.inf if p.sense == "max" else -np.inf
        else:
            obj = np.nan
        return LpSolution(status, None, None, obj, stats)
    x_orig = can.M @ x + can.offset
    duals = can.original_duals(*ys)
    return LpSolution("optimal", x_orig, duals, float(p.c @ x_orig), stats)
