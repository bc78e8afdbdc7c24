"""Acceptance criteria, each at its stated tolerance.

Every test appends one ``PASS``/``FAIL`` line that is printed in the
"acceptance criteria" section of the pytest summary.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from measure_norms import (
    SignedMeasure,
    dirac,
    from_matrix,
    hanin_norm_dual,
    hanin_norm_primal,
    integrate,
    kr_norm_dual,
    kr_norm_primal,
    mk_norm_dual,
    mk_norm_primal,
    sub,
    sum_norm,
    tv_norm,
)
from measure_norms.approx import DENSITIES, refinement_distance
from measure_norms.lp import FlowProblem, solve_flow, solve_lp
from measure_norms.metric import random_space
from measure_norms.verify import make_instance
from oracles import two_point_grid_max

SEED, TRIALS, MAX_N = 42, 200, 8


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


class Solved:
    def __init__(self, inst):
        self.inst = inst
        self.mu = inst.mu
        self.mkp, self.mkd = mk_norm_primal(inst.mu), mk_norm_dual(inst.mu)
        self.hp, self.hd = hanin_norm_primal(inst.mu), hanin_norm_dual(inst.mu)


@pytest.fixture(scope="module")
def solved():
    start = time.perf_counter()
    out = [Solved(make_instance(SEED, t, MAX_N)) for t in range(TRIALS)]
    return out, time.perf_counter() - start


def test_instance_family_covers_the_stated_ranges(solved):
    items, _ = solved
    sizes = {s.inst.space.n for s in items}
    assert sizes == set(range(2, MAX_N + 1))
    w = np.concatenate([s.mu.weights for s in items])
    assert w.min() >= -2 and w.max() <= 2


def test_1_primal_dual_equality(solved):
    items, elapsed = solved
    mk_gap = max(abs(s.mkp.value - s.mkd.value) - 1e-6 * (1 + s.mkp.value) for s in items)
    h_gap = max(abs(s.hp.value - s.hd.value) - 1e-6 * (1 + s.hp.value) for s in items)
    worst = max(max(abs(s.mkp.value - s.mkd.value), abs(s.hp.value - s.hd.value)) for s in items)
    ok = mk_gap <= 0 and h_gap <= 0 and elapsed < 60
    record(1, "primal/dual equality", ok, f"{TRIALS} instances, worst |gap| {worst:.2e}, {elapsed:.1f} s")


def test_2_norm_equivalence(solved, two_point):
    items, _ = solved
    left = max(s.mkp.value - s.hp.value for s in items)
    right = max(s.hp.value - 2 * s.mkp.value for s in items)
    mu = sub(dirac(two_point(2.0), 0), dirac(two_point(2.0), 1))
    mk, h = mk_norm_primal(mu).value, hanin_norm_primal(mu).value
    # the grid oracle must support the exact values before the tight case counts
    oracle_ok = (abs(two_point_grid_max((1, -1), 2.0, "sum") - 1) <= 5e-3
                 and abs(two_point_grid_max((1, -1), 2.0, "max") - 2) <= 5e-3)
    tight = abs(mk - 1) <= 1e-6 and abs(h - 2) <= 1e-6 and abs(h - 2 * mk) <= 1e-6
    ok = left <= 1e-6 and right <= 1e-6 and tight and oracle_ok
    record(2, "norm equivalence", ok,
           f"max(mk - H) {left:.2e}, max(H - 2mk) {right:.2e}, t=2: mk {mk:.9f} H {h:.9f}")


def test_3_witness_achievement(solved):
    items, _ = solved
    nonzero = [s for s in items if tv_norm(s.mu) > 1e-9]
    norm_dev = max(abs(sum_norm(s.mkd.witness_f) - 1) for s in nonzero)
    int_dev = max(abs(integrate(s.mkd.witness_f, s.mu) - s.mkd.value) for s in nonzero)
    ok = norm_dev <= 1e-6 and int_dev <= 1e-7
    record(3, "witness achievement", ok,
           f"{len(nonzero)} instances, max |sum_norm - 1| {norm_dev:.2e}, max |int - value| {int_dev:.2e}")


def test_4_two_point_closed_forms():
    ts = np.linspace(0.2, 10.0, 50)
    worst = 0.0
    for t in ts:
        space = from_matrix([[0, t], [t, 0]])
        mu = sub(dirac(space, 0), dirac(space, 1))
        mk, h = 2 * t / (2 + t), min(t, 2.0)
        for val, ref in ((mk_norm_primal(mu).value, mk), (mk_norm_dual(mu).value, mk),
                         (hanin_norm_primal(mu).value, h), (hanin_norm_dual(mu).value, h)):
            worst = max(worst, abs(val - ref))
    oracle = max(
        max(abs(two_point_grid_max((1, -1), t, "sum") - 2 * t / (2 + t)),
            abs(two_point_grid_max((1, -1), t, "max") - min(t, 2.0)))
        for t in ts[::7]
    )
    ok = worst <= 1e-6 and oracle <= 5e-3
    record(4, "two-point closed forms", ok, f"50 values of t, LP error {worst:.2e}, grid oracle error {oracle:.2e}")


def _zero_charge(rng, space):
    w = rng.uniform(-2, 2, space.n)
    w -= w.mean()
    w[-1] -= w.sum()
    return SignedMeasure(space, w)


def test_5_kr_correctness():
    rng = np.random.default_rng(5)
    modes = ("euclidean-square", "shortest-path-closure")
    pd = 0.0
    for k in range(100):
        space = random_space(1000 + k, int(rng.integers(2, 9)), modes[k % 2])
        nu = _zero_charge(rng, space)
        pd = max(pd, abs(kr_norm_primal(nu).value - kr_norm_dual(nu).value))
    dip = 0.0
    for k in range(50):
        space = random_space(2000 + k, int(rng.integers(2, 9)), modes[k % 2])
        x, y = rng.choice(space.n, 2, replace=False)
        dip = max(dip, abs(kr_norm_primal(sub(dirac(space, x), dirac(space, y))).value - space.dist[x, y]))
    base = 0.0
    for k in range(30):
        space = random_space(3000 + k, 2 + k % 5, modes[k % 2])
        nu = _zero_charge(rng, space)
        vals = [kr_norm_dual(nu, base=b).value for b in range(space.n)]
        base = max(base, max(vals) - min(vals))
    ok = pd <= 1e-7 and dip <= 1e-9 and base <= 1e-7
    record(5, "KR correctness", ok,
           f"primal/dual {pd:.2e} (100), dipole {dip:.2e} (50), base spread {base:.2e} (n <= 6)")


def test_6_flow_lp_agreement():
    rng = np.random.default_rng(6)
    worst = 0.0
    for k in range(100):
        n = int(rng.integers(2, 9))
        space = random_space(4000 + k, n, ("euclidean-square", "shortest-path-closure")[k % 2])
        s = rng.uniform(-2, 2, n)
        s[-1] -= s.sum()
        p = FlowProblem.complete(s, space.dist)
        worst = max(worst, abs(solve_flow(p).cost - solve_lp(p.as_lp()).objective))
    record(6, "flow/LP agreement", worst <= 1e-7, f"100 instances, worst |dcost| {worst:.2e}")


def test_7_density_surrogate():
    start = time.perf_counter()
    ns = (1, 2, 4, 8, 16, 32)
    series = {d: [refinement_distance(d, n) for n in ns] for d in sorted(DENSITIES)}
    elapsed = time.perf_counter() - start
    uni = series["uniform"]
    bounded = all(v <= 1 / (2 * n) + 1e-6 for v, n in zip(uni, ns))
    monotone = all(b <= a for a, b in zip(uni, uni[1:]))
    small = all(v[-1] < 0.02 for v in series.values())
    ok = bounded and monotone and small and elapsed < 30
    at32 = ", ".join(f"{d} {v[-1]:.4f}" for d, v in series.items())
    record(7, "density surrogate", ok,
           f"uniform bounded {bounded}, non-increasing {monotone}; n=32: {at32}; {elapsed:.1f} s")


def test_8_norm_axioms(solved):
    items, _ = solved
    hom = tri = 0.0
    definite = True
    for s in items:
        inst = s.inst
        c = inst.scale
        for fn, val in ((mk_norm_dual, s.mkd.value), (hanin_norm_dual, s.hd.value)):
            scaled = fn(SignedMeasure(inst.space, c * s.mu.weights)).value
            hom = max(hom, abs(scaled - abs(c) * val) / max(abs(c) * val, 1e-300))
            summed = fn(SignedMeasure(inst.space, s.mu.weights + inst.eta.weights)).value
            tri = max(tri, summed - val - fn(inst.eta).value)
            if val <= 1e-9 and tv_norm(s.mu) > 1e-6:
                definite = False
    zero = SignedMeasure(items[0].inst.space, np.zeros(items[0].inst.space.n))
    definite = definite and mk_norm_dual(zero).value == 0 and hanin_norm_dual(zero).value == 0
    ok = hom <= 1e-7 and tri <= 1e-6 and definite
    record(8, "norm axioms", ok, f"homogeneity rel {hom:.2e}, triangle excess {tri:.2e}, definite {definite}")


def test_9_harness_falsifiability():
    out = subprocess.run([sys.executable, "-m", "measure_norms", "verify", "--sabotage"],
                         capture_output=True, text=True)
    doc = json.loads(out.stdout)
    failed = sorted(p["name"] for p in doc["properties"] if not p["passed"])
    ok = out.returncode == 1 and "norm_equivalence" in failed
    record(9, "harness falsifiability", ok, f"exit {out.returncode}, failing {failed}")
