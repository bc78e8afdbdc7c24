"""Hot inner loops, each in a numba and a pure-numpy flavour.

The numba kernels are used when numba imports and ``MEASURE_NORMS_NUMBA`` is
not set to ``0``. Both flavours implement the same pivoting and tie-breaking
rules (ratio ties go to the largest pivot under Dantzig pricing and to the
lowest basis index under Bland's rule), so the selected backend does not
change which vertex a solve ends on.
"""

from __future__ import annotations

import heapq
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_ITERATION_LIMIT = 2

# ratio-test values closer than this (relative) count as tied
RATIO_TIE = 1e-12


def _env_wants_numba() -> bool:
    return os.environ.get("MEASURE_NORMS_NUMBA", "1").strip().lower() not in (
        "0",
        "false",
        "off",
        "no",
    )


USE_NUMBA = numba is not None and _env_wants_numba()
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- simplex ---


def simplex_loop_numpy(T, basis, n_enter, max_iter, bland_after, tol_rc, tol_piv, pivots):
    """Run primal simplex pivots on a tableau in place.

    ``T`` holds the constraint rows followed by the reduced-cost row; its last
    column is the right-hand side. Only columns ``< n_enter`` may enter.
    Returns ``(status, pivots)`` with ``pivots`` counted cumulatively.
    """
    m = T.shape[0] - 1
    while True:
        if pivots >= max_iter:
            return STATUS_ITERATION_LIMIT, pivots
        rc = T[m, :n_enter]
        if pivots < bland_after:
            q = int(np.argmin(rc))
            if rc[q] >= -tol_rc:
                return STATUS_OPTIMAL, pivots
        else:
            cand = np.flatnonzero(rc < -tol_rc)
            if cand.size == 0:
                return STATUS_OPTIMAL, pivots
            q = int(cand[0])
        col = T[:m, q]
        rows = np.flatnonzero(col > tol_piv)
        if rows.size == 0:
            return STATUS_UNBOUNDED, pivots
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + RATIO_TIE * (1.0 + abs(best))]
        if pivots < bland_after:
            # largest pivot among ties, then lowest basis index
            piv = col[tied]
            tied = tied[piv == piv.max()]
        r = int(tied[np.argmin(basis[tied])])
        _pivot_numpy(T, r, q)
        basis[r] = q
        pivots += 1


def _pivot_numpy(T, r, q):
    T[r, :] /= T[r, q]
    f = T[:, q].copy()
    f[r] = 0.0
    T -= np.outer(f, T[r, :])
    T[:, q] = 0.0
    T[r, q] = 1.0


def pivot_numpy(T, r, q):
    _pivot_numpy(T, r, q)


if numba is not None:

    @numba.njit(cache=True)
    def _pivot_numba(T, r, q):
        rows, cols = T.shape
        piv = T[r, q]
        for k in range(cols):
            T[r, k] /= piv
        for i in range(rows):
            if i == r:
                continue
            f = T[i, q]
            if f != 0.0:
                for k in range(cols):
                    T[i, k] -= f * T[r, k]
            T[i, q] = 0.0
        T[r, q] = 1.0

    @numba.njit(cache=True)
    def simplex_loop_numba(T, basis, n_enter, max_iter, bland_after, tol_rc, tol_piv, pivots):
        m = T.shape[0] - 1
        rhs = T.shape[1] - 1
        while True:
            if pivots >= max_iter:
                return STATUS_ITERATION_LIMIT, pivots
            q = -1
            if pivots < bland_after:
                best_rc = np.inf
                for j in range(n_enter):
                    if T[m, j] < best_rc:
                        best_rc = T[m, j]
                        q = j
                if q < 0 or best_rc >= -tol_rc:
                    return STATUS_OPTIMAL, pivots
            else:
                for j in range(n_enter):
                    if T[m, j] < -tol_rc:
                        q = j
                        break
                if q < 0:
                    return STATUS_OPTIMAL, pivots
            best = np.inf
            for i in range(m):
                a = T[i, q]
                if a > tol_piv:
                    ratio = T[i, rhs] / a
                    if ratio < best:
                        best = ratio
            if best == np.inf:
                return STATUS_UNBOUNDED, pivots
            cut = best + RATIO_TIE * (1.0 + abs(best))
            r = -1
            largest = pivots < bland_after
            for i in range(m):
                a = T[i, q]
                if a > tol_piv and T[i, rhs] / a <= cut:
                    if r < 0:
                        r = i
                    elif largest and a != T[r, q]:
                        if a > T[r, q]:
                            r = i
                    elif basis[i] < basis[r]:
                        r = i
            _pivot_numba(T, r, q)
            basis[r] = q
            pivots += 1

    def pivot_numba(T, r, q):
        _pivot_numba(T, r, q)

else:  # pragma: no cover
    simplex_loop_numba = None
    pivot_numba = None


# ------------------------------------------------------- pairwise kernels ---


def lip_ratio_numpy(values, dist):
    n = values.shape[0]
    if n < 2:
        return 0.0
    diff = np.abs(values[:, None] - values[None, :])
    off = ~np.eye(n, dtype=bool)
    return float((diff[off] / dist[off]).max())


def closure_numpy(dist):
    """Floyd-Warshall all-pairs shortest paths, vectorized over one pivot."""
    D = np.array(dist, dtype=float, copy=True)
    for k in range(D.shape[0]):
        np.minimum(D, D[:, k : k + 1] + D[k : k + 1, :], out=D)
    return D


if numba is not None:

    @numba.njit(cache=True)
    def lip_ratio_numba(values, dist):
        n = values.shape[0]
        best = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    ratio = abs(values[i] - values[j]) / dist[i, j]
                    if ratio > best:
                        best = ratio
        return best

    @numba.njit(cache=True)
    def closure_numba(dist):
        D = dist.copy()
        n = D.shape[0]
        for k in range(n):
            for i in range(n):
                dik = D[i, k]
                for j in range(n):
                    via = dik + D[k, j]
                    if via < D[i, j]:
                        D[i, j] = via
        return D

else:  # pragma: no cover
    lip_ratio_numba = None
    closure_numba = None


# --------------------------------------------------------------- dijkstra ---


def dijkstra_numpy(n, indptr, heads, rcost, open_arc, source):
    """Shortest reduced-cost distances from ``source`` over open residual arcs.

    Arcs are stored CSR-style by tail; ``open_arc`` masks usable arcs.
    Returns ``(dist, pred_arc)`` with ``inf`` / ``-1`` for unreachable nodes.
    """
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        lo, hi = indptr[u], indptr[u + 1]
        arcs = np.arange(lo, hi)[open_arc[lo:hi]]
        if arcs.size == 0:
            continue
        cand = d + rcost[arcs]
        v = heads[arcs]
        better = cand < dist[v]
        for a, vv, c in zip(arcs[better], v[better], cand[better]):
            if c < dist[vv]:
                dist[vv] = c
                pred[vv] = a
                heapq.heappush(heap, (c, int(vv)))
    return dist, pred


if numba is not None:

    @numba.njit(cache=True)
    def dijkstra_numba(n, indptr, heads, rcost, open_arc, source):
        dist = np.full(n, np.inf)
        pred = np.full(n, -1, dtype=np.int64)
        done = np.zeros(n, dtype=np.bool_)
        dist[source] = 0.0
        for _ in range(n):
            u = -1
            best = np.inf
            for v in range(n):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u < 0:
                break
            done[u] = True
            for a in range(indptr[u], indptr[u + 1]):
                if open_arc[a]:
                    v = heads[a]
                    c = best + rcost[a]
                    if c < dist[v]:
                        dist[v] = c
                        pred[v] = a
        return dist, pred

else:  # pragma: no cover
    dijkstra_numba = None


if USE_NUMBA:
    simplex_loop = simplex_loop_numba
    pivot = pivot_numba
    lip_ratio = lip_ratio_numba
    closure = closure_numba
    dijkstra = dijkstra_numba
else:
    simplex_loop = simplex_loop_numpy
    pivot = pivot_numpy
    lip_ratio = lip_ratio_numpy
    closure = closure_numpy
    dijkstra = dijkstra_numpy
