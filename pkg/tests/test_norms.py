import json

import numpy as np
import pytest

from measure_norms import (
    DiscreteFunction,
    IndexOutOfRange,
    InvalidInput,
    NotZeroCharge,
    SignedMeasure,
    charge,
    dirac,
    from_matrix,
    from_points,
    hanin_norm_dual,
    hanin_norm_primal,
    integrate,
    kr_norm_dual,
    kr_norm_primal,
    lip_seminorm,
    max_norm,
    mk_norm_dual,
    mk_norm_primal,
    norm,
    sub,
    sum_norm,
    tv_norm,
)
from measure_norms.metric import random_space
from oracles import mk_grid_search, transport_brute_force, two_point_grid_max

T_VALUES = np.linspace(0.2, 10.0, 50)


def dipole(space, i=0, j=1):
    return sub(dirac(space, i), dirac(space, j))


def check_primal_witness(mu, cert):
    w = cert.witness_primal
    assert abs(charge(w.nu)) <= 1e-9
    div = w.plan.sum(axis=1) - w.plan.sum(axis=0)
    assert np.allclose(div, w.nu.weights, atol=1e-8)
    assert np.all(w.plan >= 0) and np.all(w.p.weights >= 0) and np.all(w.q.weights >= 0)
    assert np.allclose(mu.weights - w.nu.weights, w.p.weights - w.q.weights, atol=1e-8)


# ---------------------------------------------------------------- examples ---


@pytest.mark.parametrize("i", [0, 1, 2])
def test_dirac_mk_dual(line3, i):
    cert = mk_norm_dual(dirac(line3, i))
    assert cert.value == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(cert.witness_f.values, 1.0, atol=1e-9)


def test_dirac_everywhere(line3):
    mu = dirac(line3, 0)
    for fn in (mk_norm_primal, hanin_norm_primal, hanin_norm_dual):
        assert fn(mu).value == pytest.approx(1.0, abs=1e-9)
    # the max-norm maximiser is not unique here; f = 1 at the atom is forced
    f = hanin_norm_dual(mu).witness_f
    assert f.values[0] == pytest.approx(1.0, abs=1e-9)
    assert max_norm(f) <= 1 + 1e-9
    assert hanin_norm_dual(dirac(from_matrix([[0]]), 0)).witness_f.values.tolist() == [1.0]
    assert norm(mu, "mk", "both").value == pytest.approx(1.0, abs=1e-9)


def test_zero_measure(line3):
    z = SignedMeasure(line3, [0, 0, 0])
    for fn in (mk_norm_dual, mk_norm_primal, hanin_norm_dual, hanin_norm_primal, kr_norm_primal, kr_norm_dual):
        assert fn(z).value == 0.0
    cert = mk_norm_primal(z)
    assert not cert.witness_primal.nu.weights.any()
    assert not kr_norm_primal(z).witness_primal.plan.any()


def test_two_point_t2(two_point):
    mu = dipole(two_point(2.0))
    assert mk_norm_dual(mu).value == pytest.approx(1.0, abs=1e-9)
    assert mk_norm_primal(mu).value == pytest.approx(1.0, abs=1e-9)


def test_two_point_hanin_t3(two_point):
    mu = dipole(two_point(3.0))
    assert hanin_norm_primal(mu).value == pytest.approx(2.0, abs=1e-9)
    cert = hanin_norm_dual(mu)
    assert cert.value == pytest.approx(2.0, abs=1e-9)
    assert cert.witness_f.values.tolist() == pytest.approx([1.0, -1.0], abs=1e-9)


def test_kr_examples(two_point, line3):
    assert kr_norm_primal(dipole(two_point(1.0))).value == pytest.approx(1.0)
    cert = kr_norm_dual(dipole(two_point(1.0)), base=0)
    assert cert.value == pytest.approx(1.0)
    assert cert.witness_f.values.tolist() == pytest.approx([0.0, -1.0])
    nu = SignedMeasure(line3, [1, 1, -2])
    assert kr_norm_primal(nu).value == pytest.approx(3.0)
    assert transport_brute_force([1, 1, 0], [0, 0, 2], line3.dist) == pytest.approx(3.0)
    assert norm(dipole(two_point(1.0)), "kr", "primal").value == pytest.approx(1.0)


@pytest.mark.parametrize("method", ["primal", "dual", "both"])
def test_kr_requires_zero_charge(two_point, method):
    with pytest.raises(NotZeroCharge) as info:
        norm(SignedMeasure(two_point(1.0), [1, 1]), "kr", method)
    assert info.value.detail["charge"] == 2.0


def test_kr_lp_backend_matches_flow(rng):
    for seed in range(20):
        space = random_space(seed, 6, "euclidean-square")
        w = rng.uniform(-2, 2, 6)
        w -= w.mean()
        nu = SignedMeasure(space, w)
        assert kr_norm_primal(nu, "lp").value == pytest.approx(kr_norm_primal(nu).value, abs=1e-9)


def test_kr_primal_witness(rng):
    space = random_space(3, 5, "shortest-path-closure")
    w = rng.uniform(-2, 2, 5)
    w -= w.mean()
    nu = SignedMeasure(space, w)
    cert = kr_norm_primal(nu)
    plan = cert.witness_primal.plan
    assert np.allclose(plan.sum(axis=1) - plan.sum(axis=0), w, atol=1e-9)
    assert float((plan * space.dist).sum()) == pytest.approx(cert.value, abs=1e-9)


# ------------------------------------------------------------ closed forms ---


@pytest.mark.parametrize("t", T_VALUES)
def test_two_point_closed_forms(two_point, t):
    mu = dipole(two_point(t))
    mk, h = 2 * t / (2 + t), min(t, 2.0)
    assert mk_norm_dual(mu).value == pytest.approx(mk, abs=1e-6)
    assert mk_norm_primal(mu).value == pytest.approx(mk, abs=1e-6)
    assert hanin_norm_dual(mu).value == pytest.approx(h, abs=1e-6)
    assert hanin_norm_primal(mu).value == pytest.approx(h, abs=1e-6)


@pytest.mark.parametrize("t", [0.3, 1.0, 2.0, 3.7, 8.0])
@pytest.mark.parametrize("w", [(1, -1), (1, 0), (0.5, 1.5), (2, -0.5)])
def test_two_point_grid_oracle(two_point, t, w):
    mu = SignedMeasure(two_point(t), w)
    assert mk_norm_dual(mu).value == pytest.approx(two_point_grid_max(w, t, "sum"), abs=5e-3)
    assert hanin_norm_dual(mu).value == pytest.approx(two_point_grid_max(w, t, "max"), abs=5e-3)


def test_closed_forms_agree_with_grid_oracle(two_point):
    for t in (0.5, 2.0, 6.0):
        assert two_point_grid_max((1, -1), t, "sum") == pytest.approx(2 * t / (2 + t), abs=5e-3)
        assert two_point_grid_max((1, -1), t, "max") == pytest.approx(min(t, 2), abs=5e-3)


def _nu_scan(weights, t, combine, grid=np.linspace(-3, 3, 6001)):
    """Primal value by scanning nu = (s, -s) on a two-point space."""
    w0, w1 = weights
    kr = np.abs(grid) * t
    tv = np.abs(w0 - grid) + np.abs(w1 + grid)
    return float(combine(kr, tv).min())


@pytest.mark.parametrize("t", [0.5, 2.0, 3.0])
@pytest.mark.parametrize("w", [(1, 0), (1, -1), (0.7, 0.4)])
def test_two_point_primal_scan(two_point, t, w):
    mu = SignedMeasure(two_point(t), w)
    assert mk_norm_primal(mu).value == pytest.approx(_nu_scan(w, t, np.maximum), abs=2e-3)
    assert hanin_norm_primal(mu).value == pytest.approx(_nu_scan(w, t, np.add), abs=2e-3)


THREE_POINT_CASES = [
    ([(0,), (1,), (2,)], [1, -1, 0.5]),
    ([(0, 0), (1, 0), (0, 1)], [1, 1, -2]),
    ([(0, 0), (0.3, 0), (2, 1)], [-0.5, 1, 0.7]),
    ([(0, 0), (4, 0), (1, 3)], [2, -1, -1]),
]


@pytest.mark.parametrize("pts, w", THREE_POINT_CASES)
def test_three_point_grid_oracle(pts, w):
    space = from_points(pts)
    mu = SignedMeasure(space, w)
    assert mk_norm_dual(mu).value == pytest.approx(mk_grid_search(w, space.dist), abs=5e-3)


# ---------------------------------------------------------------- witnesses ---


def _instances(count=25):
    rng = np.random.default_rng(7)
    for k in range(count):
        n = 2 + k % 6
        space = random_space(k, n, "shortest-path-closure" if k % 2 else "euclidean-square")
        yield SignedMeasure(space, rng.uniform(-2, 2, n))


def test_dual_witnesses_feasible_and_achieving():
    for mu in _instances():
        c = mk_norm_dual(mu)
        assert sum_norm(c.witness_f) == pytest.approx(1.0, abs=1e-6)
        assert integrate(c.witness_f, mu) == pytest.approx(c.value, abs=1e-7)
        h = hanin_norm_dual(mu)
        assert max_norm(h.witness_f) <= 1 + 1e-7
        assert integrate(h.witness_f, mu) == pytest.approx(h.value, abs=1e-7)


def test_primal_witnesses_valid():
    for mu in _instances():
        for fn, combine in ((mk_norm_primal, max), (hanin_norm_primal, lambda a, b: a + b)):
            c = fn(mu)
            check_primal_witness(mu, c)
            w = c.witness_primal
            kr = float((w.plan * mu.space.dist).sum())
            tv = tv_norm(w.p) + tv_norm(w.q)
            assert combine(kr, tv) == pytest.approx(c.value, abs=1e-7)


def test_kr_dual_witness_and_base_independence():
    rng = np.random.default_rng(11)
    for k in range(10):
        n = 2 + k % 5
        space = random_space(50 + k, n, "euclidean-square")
        w = rng.uniform(-2, 2, n)
        w -= w.mean()
        nu = SignedMeasure(space, w)
        ref = kr_norm_primal(nu).value
        for b in range(n):
            c = kr_norm_dual(nu, base=b)
            assert c.value == pytest.approx(ref, abs=1e-7)
            assert c.witness_f.values[b] == 0.0
            assert lip_seminorm(c.witness_f) <= 1 + 1e-7


def test_kr_dipole_equals_distance(rng):
    space = random_space(9, 7, "shortest-path-closure")
    for _ in range(10):
        x, y = rng.choice(7, 2, replace=False)
        assert kr_norm_primal(dipole(space, x, y)).value == pytest.approx(space.dist[x, y], abs=1e-9)


def test_one_point_space(rng):
    s = from_matrix([[0]])
    for v in rng.uniform(-3, 3, 10):
        mu = SignedMeasure(s, [v])
        for fn in (mk_norm_dual, mk_norm_primal, hanin_norm_dual, hanin_norm_primal):
            assert fn(mu).value == pytest.approx(abs(v), abs=1e-9)


def test_routes_agree():
    for mu in _instances(10):
        for fn in (mk_norm_dual, mk_norm_primal, hanin_norm_dual, hanin_norm_primal):
            assert fn(mu, route="primal").value == pytest.approx(fn(mu, route="dual").value, abs=1e-8)


def test_backends_agree(backend):
    for mu in _instances(6):
        assert mk_norm_dual(mu).value == pytest.approx(mk_norm_primal(mu).value, abs=1e-6)


# ----------------------------------------------------------------- dispatch ---


def test_dispatch_errors(two_point):
    mu = dipole(two_point(1.0))
    with pytest.raises(InvalidInput):
        norm(mu, "wasserstein")
    with pytest.raises(InvalidInput):
        norm(mu, "mk", "sideways")
    with pytest.raises(IndexOutOfRange):
        norm(mu, "kr", "dual", base=5)


def test_both_reports_primal_with_both_witnesses(line3):
    mu = SignedMeasure(line3, [1, -0.5, 0.25])
    cert = norm(mu, "hanin", "both")
    assert cert.method == "both"
    assert cert.value == hanin_norm_primal(mu).value
    assert cert.witness_f is not None and cert.witness_primal is not None


def test_tv_dispatch(two_point):
    mu = SignedMeasure(two_point(1.0), [0.5, -1.5])
    for method in ("primal", "dual", "both"):
        assert norm(mu, "tv", method).value == 2.0
    cert = norm(mu, "tv", "dual")
    assert integrate(cert.witness_f, mu) == 2.0


def test_certificate_json(two_point):
    cert = norm(dipole(two_point(2.0)), "mk", "both")
    doc = json.loads(json.dumps(cert.to_json()))
    assert set(doc) == {"kind", "method", "value", "witness_f", "witness_primal"}
    assert set(doc["witness_primal"]) == {"nu", "plan", "p", "q"}
    assert doc["kind"] == "mk" and doc["value"] == pytest.approx(1.0)
    only_dual = mk_norm_dual(dipole(two_point(2.0))).to_json()
    assert "witness_primal" not in only_dual


def test_witness_is_discrete_function(two_point):
    assert isinstance(mk_norm_dual(dipole(two_point(1.0))).witness_f, DiscreteFunction)
