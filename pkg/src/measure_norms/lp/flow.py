"""Successive shortest paths with node potentials for uncapacitated flows."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _accel
from ..errors import Infeasible
from .problem import FlowProblem


@dataclass(frozen=True, eq=False)
class FlowResult:
    cost: float
    flows: np.ndarray
    stats: dict = field(default_factory=dict)


def solve_flow(p: FlowProblem) -> FlowResult:
    n, k = p.n_nodes, p.tails.shape[0]
    excess = np.array(p.supplies, dtype=float)
    eps = 1e-12 * (1.0 + (np.abs(excess).max() if n else 0.0))
    flows = np.zeros(k)
    if k == 0 or not np.any(np.abs(excess) > eps):
        if np.any(np.abs(excess) > eps):
            raise Infeasible("supplies cannot be routed without arcs")
        return FlowResult(0.0, flows, {"augmentations": 0})

    # residual arc r < k is forward arc r, r >= k is the reverse of r - k
    r_tail = np.concatenate([p.tails, p.heads])
    r_head = np.concatenate([p.heads, p.tails])
    r_cost = np.concatenate([p.costs, -p.costs])
    order = np.argsort(r_tail, kind="stable")
    tail_s, head_s, cost_s = r_tail[order], r_head[order], r_cost[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(tail_s, minlength=n), out=indptr[1:])
    is_fwd = order < k
    base_arc = np.where(is_fwd, order, order - k)

    pot = np.zeros(n)
    dijkstra = _accel.dijkstra
    n_aug = 0
    while True:
        sources = np.flatnonzero(excess > eps)
        if sources.size == 0:
            break
        s = int(sources[0])
        rcost = np.maximum(cost_s + pot[tail_s] - pot[head_s], 0.0)
        open_arc = is_fwd | (flows[base_arc] > eps)
        dist, pred = dijkstra(n, indptr, head_s, rcost, open_arc, s)
        sinks = np.flatnonzero((excess < -eps) & np.isfinite(dist))
        if sinks.size == 0:
            raise Infeasible(f"no deficit node reachable from node {s}", node=s)
        t = int(sinks[np.argmin(dist[sinks])])

        path = []
        v = t
        while v != s:
            a = int(pred[v])
            path.append(a)
            v = int(tail_s[a])
        delta = min(excess[s], -excess[t])
        for a in path:
            if not is_fwd[a]:
                delta = min(delta, flows[base_arc[a]])
        for a in path:
            if is_fwd[a]:
                flows[base_arc[a]] += delta
            else:
                flows[base_arc[a]] -= delta
        excess[s] -= delta
        excess[t] += delta
        pot += np.minimum(dist, dist[t])
        n_aug += 1

    np.maximum(flows, 0.0, out=flows)
    cost = float(flows @ p.costs)
    return FlowResult(cost, flows, {"augmentations": n_aug})


def divergence(p: FlowProblem, flows: np.ndarray) -> np.ndarray:
    """Net out-flow at each node."""
    out = np.zeros(p.n_nodes)
    np.add.at(out, p.tails, flows)
    np.add.at(out, p.heads, -flows)
    return out
