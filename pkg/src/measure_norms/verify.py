"""Randomized property harness for the norm identities and inequalities.

Each trial draws one instance from a SplitMix64 stream forked off the run
seed by trial index, evaluates every property, and records a slack per check
(``tolerance - violation``; negative means the check failed). Aggregation is
by trial index, so parallel runs report exactly what a sequential run does.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import func as F
from . import measure as M
from .lp import FlowProblem, divergence, solve_flow, solve_lp
from .metric import FiniteMetricSpace, random_space_from
from .norms import (
    hanin_norm_dual,
    hanin_norm_primal,
    kr_norm_dual,
    kr_norm_primal,
    mk_norm_dual,
    mk_norm_primal,
)
from .rng import SplitMix64

log = logging.getLogger(__name__)

MODES = ("euclidean-square", "shortest-path-closure")
WEIGHT_RANGE = (-2.0, 2.0)
MAX_DUMPS = 20

# name -> description; report order follows this table
PROPERTIES = {
    "mk_primal_dual_equality": "|mk primal - mk dual| <= 1e-6 (1 + value)",
    "hanin_primal_dual_equality": "|hanin primal - hanin dual| <= 1e-6 (1 + value)",
    "norm_equivalence": "mk <= hanin <= 2 mk, slack 1e-6",
    "witness_achievement": "mu != 0: |sum_norm(f*) - 1| <= 1e-6 and |int f* dmu - mk| <= 1e-7",
    "dual_witness_feasibility": "mk f* in sum ball, hanin f* in max ball (1e-7), integrals match (1e-7)",
    "primal_witness_validity": "nu zero charge (1e-9), plan divergence = nu (1e-8), mu - nu = p - q",
    "tv_domination": "mk, hanin <= tv + 1e-6",
    "zero_charge_bounds": "mk(nu) <= min(kr, tv) + 1e-6, hanin(nu) <= kr + 1e-6",
    "kr_primal_dual_equality": "|kr flow - kr dual| <= 1e-7",
    "kr_base_point_independence": "kr dual agrees across base points within 1e-7 (n <= 6)",
    "kr_dipole_distance": "kr(delta_x - delta_y) = d(x, y) within 1e-9",
    "flow_lp_agreement": "successive shortest paths cost = simplex cost within 1e-7",
    "homogeneity": "N(c mu) = |c| N(mu), relative 1e-7, for mk and hanin",
    "triangle_inequality": "N(mu + eta) <= N(mu) + N(eta) + 1e-6 for mk and hanin",
    "definiteness": "N(mu) <= 1e-9 implies tv(mu) <= 1e-6; N(0) = 0",
    "tv_norm_axioms": "tv homogeneity and triangle inequality within 1e-12",
    "charge_linearity": "charge(a mu + b eta) = a charge(mu) + b charge(eta) within 1e-12",
    "jordan_roundtrip": "plus - minus = mu exactly, tv = charge(plus) + charge(minus)",
    "function_norm_sandwich": "max_norm <= sum_norm <= 2 max_norm; lip(f + c) = lip(f)",
    "integral_bound": "|int f dmu| <= sup(f) tv(mu)",
}


@dataclass
class Instance:
    trial: int
    space: FiniteMetricSpace
    mu: M.SignedMeasure
    eta: M.SignedMeasure
    scale: float
    f_values: np.ndarray
    pair: tuple
    shift: float

    def dump(self) -> dict:
        return {
            "trial": self.trial,
            "space": {"dist": self.space.dist.tolist()},
            "measure": {"weights": self.mu.weights.tolist()},
            "second_measure": {"weights": self.eta.weights.tolist()},
            "scale": self.scale,
        }


def make_instance(seed: int, trial: int, max_n: int) -> Instance:
    rng = SplitMix64(seed).fork(trial)
    n = rng.integers(2, max_n)
    space = random_space_from(rng, n, MODES[trial % 2])
    mu = M.SignedMeasure(space, rng.uniforms(n, *WEIGHT_RANGE))
    eta = M.SignedMeasure(space, rng.uniforms(n, *WEIGHT_RANGE))
    scale = rng.uniform(-3.0, 3.0)
    f_values = np.array(rng.uniforms(n, -1.0, 1.0))
    x = rng.integers(0, n - 1)
    y = (x + 1 + rng.integers(0, n - 2)) % n
    shift = rng.uniform(-5.0, 5.0)
    return Instance(trial, space, mu, eta, scale, f_values, (x, y), shift)


class _Recorder:
    def __init__(self):
        self.checks: list[tuple[str, float, dict]] = []

    def check(self, name: str, violation: float, tol: float, **values):
        self.checks.append((name, float(tol - violation), values))


def _norms(mu, sabotage):
    mkp, mkd = mk_norm_primal(mu), mk_norm_dual(mu)
    hp, hd = hanin_norm_primal(mu), hanin_norm_dual(mu)
    s = 1.0 if sabotage is None else float(sabotage)
    return mkp, mkd, hp, hd, s


def _value_pair(mu, sabotage):
    s = 1.0 if sabotage is None else float(sabotage)
    return mk_norm_dual(mu).value, s * hanin_norm_dual(mu).value


def run_trial(seed: int, trial: int, max_n: int, sabotage: Optional[float] = None):
    """All property checks for one instance: ``(instance dump, [(name, slack, values)])``."""
    inst = make_instance(seed, trial, max_n)
    rec = _Recorder()
    mu, eta, space = inst.mu, inst.eta, inst.space
    n = space.n
    tv = M.tv_norm(mu)

    mkp, mkd, hp, hd, s = _norms(mu, sabotage)
    mk, h = mkp.value, s * hp.value
    rec.check("mk_primal_dual_equality", abs(mkp.value - mkd.value), 1e-6 * (1 + mk),
              primal=mkp.value, dual=mkd.value)
    rec.check("hanin_primal_dual_equality", abs(s * hp.value - s * hd.value), 1e-6 * (1 + h),
              primal=s * hp.value, dual=s * hd.value)
    rec.check("norm_equivalence", mk - h, 1e-6, mk=mk, hanin=h)
    rec.check("norm_equivalence", h - 2 * mk, 1e-6, mk=mk, hanin=h)

    f_mk, f_h = mkd.witness_f, hd.witness_f
    if tv > 1e-9:
        rec.check("witness_achievement", abs(F.sum_norm(f_mk) - 1.0), 1e-6, sum_norm=F.sum_norm(f_mk))
        rec.check("witness_achievement", abs(F.integrate(f_mk, mu) - mkd.value), 1e-7,
                  integral=F.integrate(f_mk, mu), value=mkd.value)
    rec.check("dual_witness_feasibility", F.sum_norm(f_mk) - 1.0, 1e-7, sum_norm=F.sum_norm(f_mk))
    rec.check("dual_witness_feasibility", F.max_norm(f_h) - 1.0, 1e-7, max_norm=F.max_norm(f_h))
    rec.check("dual_witness_feasibility", abs(F.integrate(f_h, mu) - hd.value), 1e-7)
    for cert in (mkp, hp):
        w = cert.witness_primal
        rec.check("primal_witness_validity", abs(M.charge(w.nu)), 1e-9)
        div = w.plan.sum(axis=1) - w.plan.sum(axis=0)
        rec.check("primal_witness_validity", np.abs(div - w.nu.weights).max(), 1e-8)
        split = mu.weights - w.nu.weights - (w.p.weights - w.q.weights)
        rec.check("primal_witness_validity", np.abs(split).max(), 1e-8)
        kr_part = float((w.plan * space.dist).sum())
        tv_part = M.tv_norm(w.p) + M.tv_norm(w.q)
        combined = max(kr_part, tv_part) if cert.kind == "mk" else kr_part + tv_part
        rec.check("primal_witness_validity", abs(combined - cert.value), 1e-8 * (1 + cert.value))

    rec.check("tv_domination", mk - tv, 1e-6, mk=mk, tv=tv)
    rec.check("tv_domination", h - tv, 1e-6, hanin=h, tv=tv)

    nu = M.SignedMeasure(space, mu.weights - M.charge(mu) / n)
    krp = kr_norm_primal(nu)
    krd = kr_norm_dual(nu, 0)
    lp_check = kr_norm_primal(nu, backend="lp")
    mk_nu = mk_norm_dual(nu).value
    h_nu = s * hanin_norm_dual(nu).value
    rec.check("zero_charge_bounds", mk_nu - min(krp.value, M.tv_norm(nu)), 1e-6, mk=mk_nu, kr=krp.value)
    rec.check("zero_charge_bounds", h_nu - krp.value, 1e-6, hanin=h_nu, kr=krp.value)
    rec.check("kr_primal_dual_equality", abs(krp.value - krd.value), 1e-7, primal=krp.value, dual=krd.value)
    rec.check("kr_primal_dual_equality", abs(krp.value - lp_check.value), 1e-7, flow=krp.value, lp=lp_check.value)
    if n <= 6:
        vals = [krd.value] + [kr_norm_dual(nu, b).value for b in range(1, n)]
        rec.check("kr_base_point_independence", max(vals) - min(vals), 1e-7, values=vals)
    x, y = inst.pair
    dip = M.sub(M.dirac(space, x), M.dirac(space, y))
    rec.check("kr_dipole_distance", abs(kr_norm_primal(dip).value - space.dist[x, y]), 1e-9)

    fp = FlowProblem.complete(nu.weights - nu.weights.sum() / n, space.dist)
    flow = solve_flow(fp)
    lp = solve_lp(fp.as_lp())
    rec.check("flow_lp_agreement", abs(flow.cost - lp.objective), 1e-7, flow=flow.cost, lp=lp.objective)
    rec.check("flow_lp_agreement", np.abs(divergence(fp, flow.flows) - fp.supplies).max(), 1e-9)

    c = inst.scale
    cmu = M.scale(mu, c)
    mk_c, h_c = _value_pair(cmu, sabotage)
    for name, base_v, scaled_v in (("mk", mk, mk_c), ("hanin", h, h_c)):
        target = abs(c) * base_v
        rec.check("homogeneity", abs(scaled_v - target), 1e-7 * max(1.0, target), norm=name)
    mk_e, h_e = _value_pair(eta, sabotage)
    mk_s, h_s = _value_pair(M.add(mu, eta), sabotage)
    rec.check("triangle_inequality", mk_s - mk - mk_e, 1e-6, norm="mk")
    rec.check("triangle_inequality", h_s - h - h_e, 1e-6, norm="hanin")

    for v in (mk, h):
        rec.check("definiteness", tv - 1e-6 if v <= 1e-9 else 0.0, 0.0)
    zero = M.zero(space)
    zmk, zh = _value_pair(zero, sabotage)
    rec.check("definiteness", max(abs(zmk), abs(zh)), 1e-12)

    rec.check("tv_norm_axioms", abs(M.tv_norm(cmu) - abs(c) * tv), 1e-12 * (1 + abs(c) * tv))
    rec.check("tv_norm_axioms", M.tv_norm(M.add(mu, eta)) - tv - M.tv_norm(eta), 1e-12)
    a, b = c, inst.shift
    lin = M.charge(M.add(M.scale(mu, a), M.scale(eta, b))) - a * M.charge(mu) - b * M.charge(eta)
    rec.check("charge_linearity", abs(lin), 1e-12 * (1 + abs(a) + abs(b)) * (1 + tv + M.tv_norm(eta)))
    plus, minus = M.jordan(mu)
    rec.check("jordan_roundtrip", float(np.abs(M.sub(plus, minus).weights - mu.weights).max()), 0.0)
    rec.check("jordan_roundtrip", abs(M.charge(plus) + M.charge(minus) - tv), 1e-12 * (1 + tv))

    f = F.DiscreteFunction(space, inst.f_values)
    for g in (f, f_mk, f_h):
        mx, sm = F.max_norm(g), F.sum_norm(g)
        rec.check("function_norm_sandwich", mx - sm, 1e-15)
        rec.check("function_norm_sandwich", sm - 2 * mx, 1e-15)
    g = F.DiscreteFunction(space, inst.f_values + inst.shift)
    rec.check("function_norm_sandwich", abs(F.lip_seminorm(g) - F.lip_seminorm(f)), 1e-9)
    rec.check("integral_bound", abs(F.integrate(f, mu)) - F.sup_norm(f) * tv, 1e-12 * (1 + tv))

    return inst.dump(), rec.checks


def _trial_star(args):
    return run_trial(*args)


def run_verification(seed: int, trials: int, max_n: int, sabotage: Optional[float] = None, jobs: int = 1) -> dict:
    """Run ``trials`` instances and aggregate a JSON-ready report."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if max_n < 2:
        raise ValueError("max-n must be >= 2")
    args = [(seed, t, max_n, sabotage) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial_star, args, chunksize=max(1, trials // (4 * jobs))))
    else:
        results = [_trial_star(a) for a in args]

    agg = {name: {"checks": 0, "failures": 0, "worst_slack": None} for name in PROPERTIES}
    dumps = []
    for dump, checks in results:
        failed_here = []
        for name, slack, values in checks:
            entry = agg[name]
            entry["checks"] += 1
            if entry["worst_slack"] is None or slack < entry["worst_slack"]:
                entry["worst_slack"] = slack
            if slack < 0:
                entry["failures"] += 1
                failed_here.append({"property": name, "slack": slack, "values": _plain(values)})
        if failed_here and len(dumps) < MAX_DUMPS:
            dumps.append({**dump, "failed": failed_here})

    props = []
    for name, desc in PROPERTIES.items():
        e = agg[name]
        props.append({
            "name": name,
            "description": desc,
            "passed": e["failures"] == 0,
            "checks": e["checks"],
            "failures": e["failures"],
            "worst_slack": e["worst_slack"],
        })
    report = {
        "seed": seed,
        "trials": trials,
        "max_n": max_n,
        "sabotage": sabotage,
        "passed": all(p["passed"] for p in props),
        "properties": props,
    }
    if dumps:
        report["failing_instances"] = dumps
    return report


def _plain(values: dict) -> dict:
    out = {}
    for k, v in values.items():
        if isinstance(v, np.ndarray):
            v = v.tolist()
        elif isinstance(v, np.floating):
            v = float(v)
        out[k] = v
    return out
