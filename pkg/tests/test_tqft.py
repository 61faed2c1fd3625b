import itertools
import json

import mpmath
import pytest

from higgs_verlinde.bethe import IndexRequest, index
from higgs_verlinde.lie import RootSystem, Weight, d_lambda
from higgs_verlinde.tqft import (
    FrobeniusData,
    Surface,
    algebra_from_bethe,
    corrupt,
    evaluate,
    solve_unit,
    star_product,
    su2_algebra,
    verify_frobenius,
)
from higgs_verlinde.tseries import TruncatedSeries, eval_at, invert
from higgs_verlinde.verify.closed_forms import genus2_closed, twisted_genus2_closed
from higgs_verlinde.verify.oracles import classical_fusion_su2

ORDER = 16
T = TruncatedSeries.monomial(1, order=ORDER)
ONE = TruncatedSeries.constant(1, ORDER)


def test_su2_fusion_and_metric():
    alg = su2_algebra(2, ORDER)
    assert alg.f(1, 1, 2) == ONE
    assert alg.f(2, 2, 2) == T
    assert alg.f(1, 1, 1).is_zero()
    assert alg.metric == [ONE - T * T, ONE - T, ONE - T * T]


def test_k0_algebra():
    alg = su2_algebra(0, ORDER)
    assert alg.size == 1
    assert alg.metric == [ONE + T]
    assert alg.f(0, 0, 0) == ONE
    assert alg.cap == [ONE + T]
    # single root at theta = pi/2 where theta_t = (1+t)^3
    assert evaluate(alg, Surface(0)) == (ONE + T) ** 3
    assert evaluate(alg, Surface(3)) == (ONE + T) ** -6
    assert evaluate(alg, Surface(1)) == ONE
    with pytest.raises(ValueError, match="no twisted cap"):
        evaluate(alg, Surface(2, twisted_marks=1))


def test_k0_matches_bethe():
    alg = su2_algebra(0, 32)
    for g in range(4):
        v, tail = eval_at(evaluate(alg, Surface(g)), "0.1")
        assert abs(index(IndexRequest(RootSystem(2), 0, "0.1", genus=g)).value - v) < 1e-12


def test_closed_sphere():
    for k in range(3, 7):
        assert evaluate(su2_algebra(k, ORDER), Surface(0)) == ONE - T ** 3


def test_four_point_k2():
    got = evaluate(su2_algebra(2, 8), Surface(0, (1, 1, 1, 1)))
    assert got == TruncatedSeries([2, 0, 2, 0, 2, 0, 2, 0, 2], 8)


def test_genus2_and_twisted_match_closed_forms():
    for k in range(1, 5):
        assert evaluate(su2_algebra(k, ORDER), Surface(2)) == genus2_closed(k, ORDER)
    for k in (2, 4):
        alg = su2_algebra(k, ORDER)
        assert evaluate(alg, Surface(2, twisted_marks=1)) == twisted_genus2_closed(k, ORDER)
    assert evaluate(su2_algebra(3, ORDER), Surface(2, twisted_marks=1)).is_zero()


def test_star_product_k2():
    alg = su2_algebra(2, ORDER)
    prod = star_product(alg, 1, 1)
    d0 = invert(ONE - T * T)
    assert prod == [d0, TruncatedSeries.constant(0, ORDER), d0]


def test_unit():
    for k in range(0, 6):
        alg = su2_algebra(k, ORDER)
        u = solve_unit(alg)
        assert u == alg.cap
        for a in range(alg.size):
            vec = [TruncatedSeries.constant(0, ORDER)] * alg.size
            for b in range(alg.size):
                st = alg.structure(b, a)
                vec = [vec[c] + u[b] * st[c] for c in range(alg.size)]
            assert vec == alg.basis_vector(a)


def test_t0_is_classical_fusion():
    for k in range(1, 6):
        alg = su2_algebra(k, 4)
        for a, b, c in itertools.product(range(k + 1), repeat=3):
            assert alg.f(a, b, c)[0] == classical_fusion_su2(k, a, b, c)


def test_metric_matches_d_lambda():
    for k in range(1, 6):
        alg = su2_algebra(k, ORDER)
        for j in range(k + 1):
            assert alg.d[j] == d_lambda(Weight((j,)), k, ORDER)


@pytest.mark.parametrize("k", range(0, 5))
def test_verify_frobenius_exact(k):
    rep = verify_frobenius(su2_algebra(k, 10))
    assert rep.ok, rep.failures()


def test_corrupted_algebra_fails():
    rep = verify_frobenius(corrupt(su2_algebra(3, 10)))
    assert not rep.ok
    assert "associativity" in [name for name, _ in rep.failures()]


def test_json_round_trip():
    alg = su2_algebra(3, 8)
    data = json.loads(json.dumps(alg.to_json()))
    back = FrobeniusData.from_json(data)
    assert back.fusion == alg.fusion
    assert back.metric == alg.metric
    assert back.cap == alg.cap and back.twisted_cap == alg.twisted_cap
    assert evaluate(back, Surface(2, (1, 1))) == evaluate(alg, Surface(2, (1, 1)))


def test_invalid_labels():
    alg = su2_algebra(2, 8)
    with pytest.raises(ValueError):
        evaluate(alg, Surface(0, (3,)))
    with pytest.raises(ValueError):
        Surface(-1)


def test_numeric_su2_matches_exact():
    k = 2
    num = algebra_from_bethe(RootSystem(2), k, ["0.1"])["0.1"]
    exact = su2_algebra(k, 32)
    for key, v in exact.fusion.items():
        assert abs(num.f(*key) - eval_at(v, "0.1")[0]) < 1e-8
    assert abs(num.f(2, 2, 2) - mpmath.mpf("0.1")) < 1e-8
    for a in range(k + 1):
        assert abs(num.metric[a] - eval_at(exact.metric[a], "0.1")[0]) < 1e-8
        assert abs(num.cap[a] - eval_at(exact.cap[a], "0.1")[0]) < 1e-8
    assert verify_frobenius(num, 1e-8).ok


def test_numeric_t0_classical():
    alg = algebra_from_bethe(RootSystem(2), 1, [0])[0]
    for a, b, c in itertools.product(range(2), repeat=3):
        assert abs(alg.f(a, b, c) - classical_fusion_su2(1, a, b, c)) < 1e-20
    # 1 * 1 has no component along 1
    assert abs(alg.f(1, 1, 1)) < 1e-20


def test_su3_level1_is_z3():
    rs = RootSystem(3)
    alg = algebra_from_bethe(rs, 1, [0])[0]
    # label coords: (0,0) -> 0, (1,0) -> 1, (0,1) -> 2 in Z3
    charge = {w.coords: (w.coords[0] + 2 * w.coords[1]) % 3 for w in alg.labels}
    for a, b, c in itertools.product(range(3), repeat=3):
        la, lb, lc = (alg.labels[i].coords for i in (a, b, c))
        want = 1 if (charge[la] + charge[lb] + charge[lc]) % 3 == 0 else 0
        assert abs(alg.f(a, b, c) - want) < 1e-20


def test_su3_numeric_frobenius():
    alg = algebra_from_bethe(RootSystem(3), 2, ["0.1"])["0.1"]
    rep = verify_frobenius(alg, 1e-8)
    assert rep.ok, rep.failures()
