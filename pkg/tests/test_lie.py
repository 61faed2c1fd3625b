from fractions import Fraction

import pytest

from higgs_verlinde.lie import (
    BOREL,
    ParabolicSpec,
    RootSystem,
    Weight,
    WeylEnumerationError,
    d_lambda,
    dual_weight,
    integrable_weights,
    stabilizer_exponents,
    weyl_group,
    weyl_poincare,
)
from higgs_verlinde.tseries import TruncatedSeries, invert


def coords(ws):
    return [w.coords for w in ws]


def test_root_system_invariants():
    for n in range(2, 6):
        rs = RootSystem(n)
        assert len(rs.positive_roots) == n * (n - 1) // 2
        th = rs.highest_root
        assert rs.pair_roots(th, th) == 2
        assert all(rs.pair_roots(r, r) == 2 for r in rs.positive_roots)
        # <rho, highest root> = h - 1
        assert rs.pair_weight_root(rs.rho, th) == rs.dual_coxeter - 1
        # rho is the half-sum of positive roots
        half = [Fraction(sum(r[i] for r in rs.positive_roots), 2) for i in range(rs.rank)]
        assert tuple(rs.root_to_fundamental(half)) == rs.rho


def test_integrable_weights():
    assert coords(integrable_weights(RootSystem(2), 2)) == [(0,), (1,), (2,)]
    assert coords(integrable_weights(RootSystem(2), 0)) == [(0,)]
    su3 = coords(integrable_weights(RootSystem(3), 1))
    assert sorted(su3) == [(0, 0), (0, 1), (1, 0)] and len(su3) == 3
    with pytest.raises(ValueError):
        integrable_weights(RootSystem(2), -1)


def test_dual_weight():
    for j in range(4):
        assert dual_weight(Weight((j,))) == Weight((j,))
    assert dual_weight(Weight((1, 0))) == Weight((0, 1))
    assert dual_weight(Weight((2, 1))) == Weight((1, 2))
    for w in integrable_weights(RootSystem(4), 3):
        assert dual_weight(dual_weight(w)) == w
        assert dual_weight(w).is_integrable(3)


def test_weyl_group():
    w2 = weyl_group(RootSystem(2))
    assert len(w2) == 2 and sorted(w.length for w in w2) == [0, 1]
    assert weyl_poincare(weyl_group(RootSystem(3))) == {0: 1, 1: 2, 2: 2, 3: 1}
    assert len(weyl_group(RootSystem(4))) == 24
    with pytest.raises(WeylEnumerationError, match="Weyl enumeration too large"):
        weyl_group(RootSystem(7))


def test_sign_is_parity():
    for w in weyl_group(RootSystem(4)):
        # parity from the cycle decomposition
        seen, parity = set(), 0
        for s in range(4):
            if s in seen:
                continue
            length, j = 0, s
            while j not in seen:
                seen.add(j)
                j = w.perm[j]
                length += 1
            parity += length - 1
        assert w.sign == (-1) ** parity


def test_weyl_poincare_product_identity():
    for n in range(2, 6):
        rs = RootSystem(n)
        order = n * n
        lhs = TruncatedSeries.from_poly(weyl_poincare(weyl_group(rs)), order)
        rhs = TruncatedSeries.constant(1, order)
        for m in rs.exponents:
            rhs = rhs * (1 - TruncatedSeries.monomial(m + 1, order=order))
        rhs = rhs * invert(1 - TruncatedSeries.monomial(1, order=order)) ** rs.rank
        assert lhs == rhs


def test_stabilizer_examples():
    order = 10
    t = TruncatedSeries.monomial(1, order=order)
    one = TruncatedSeries.constant(1, order)
    for k in (1, 2, 5):
        for j in range(1, k):
            assert d_lambda(Weight((j,)), k, order) == invert(one - t)
        for j in (0, k):
            assert d_lambda(Weight((j,)), k, order) == invert(one - t * t)
    for k in (1, 2, 3):
        assert stabilizer_exponents(Weight((0, 0)), k) == [1, 2]
        assert d_lambda(Weight((0, 0)), k, order) == invert((one - t ** 2) * (one - t ** 3))
    with pytest.raises(ValueError):
        stabilizer_exponents(Weight((0,)), 0)


# Independent oracle: enumerate the stabilizer of lam in the affine Weyl group by
# breadth-first search over words in the wall reflections, acting as affine maps.


def _reflections(n, k):
    r = n - 1
    cart = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(r)] for i in range(r)]
    theta = [sum(cart[i][j] for j in range(r)) for i in range(r)]  # highest root in fundamental coords

    def simple(i):
        return lambda mu: tuple(mu[a] - mu[i] * cart[i][a] for a in range(r))

    def affine(mu):
        c = sum(mu) - k
        return tuple(mu[a] - c * theta[a] for a in range(r))

    return simple, affine


def _stabilizer_poincare(lam, k):
    n = len(lam) + 1
    simple, affine = _reflections(n, k)
    gens = [simple(i) for i in range(n - 1) if lam[i] == 0]
    if sum(lam) == k:
        gens.append(affine)
    # generic probe points near lam identify group elements by their action
    probes = [tuple(Fraction(lam[a]) + Fraction(1, 7 + 3 * a + 11 * p) for a in range(n - 1)) for p in range(n)]
    start = tuple(probes)
    seen = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for pts in frontier:
            for g in gens:
                img = tuple(g(p) for p in pts)
                if img not in seen:
                    seen[img] = seen[pts] + 1
                    nxt.append(img)
        frontier = nxt
    out = {}
    for length in seen.values():
        out[length] = out.get(length, 0) + 1
    return out


@pytest.mark.parametrize("n,kmax", [(2, 5), (3, 4), (4, 3)])
def test_stabilizer_matches_enumeration(n, kmax):
    order = 12
    for k in range(1, kmax + 1):
        for w in integrable_weights(RootSystem(n), k):
            poly = TruncatedSeries.from_poly(_stabilizer_poincare(w.coords, k), order)
            geo = invert(1 - TruncatedSeries.monomial(1, order=order)) ** (n - 1)
            assert invert(d_lambda(w, k, order)) * geo == poly, (k, w)


def test_parabolic():
    rs = RootSystem(3)
    assert len(BOREL.roots_of_g_mod_p(rs)) == 3
    p1 = ParabolicSpec(frozenset({1}))
    assert p1.roots_of_g_mod_p(rs) == ((0, 2), (1, 2))
    assert p1.compatible(Weight((0, 2)))
    assert not p1.compatible(Weight((1, 0)))
    assert ParabolicSpec.parse("1+2").levi == frozenset({1, 2})
    with pytest.raises(ValueError):
        ParabolicSpec(frozenset({3})).validate(rs)
