"""Frobenius algebra over level-k labels and the 2D TQFT built from it.

The coefficient ring is either exact (``TruncatedSeries``) or numeric
(mpmath reals at a fixed ``t``); all code paths below only use ``+``, ``*``
and a division for ``d = 1/eta``.

Conventions: ``fusion[(a, b, c)]`` is the three-holed sphere amplitude on
label indices; ``metric[a]`` is the cylinder pairing ``eta(a, a*)`` and
``d[a] = 1/metric[a]``.  The product is::

    a * b = sum_c fusion(a, b, c*) d[c] c

``cap`` is the disc state (it is the unit), ``counit(c) = eta(c, c*) cap[c*]``
is the one-holed sphere, and the handle element is ``H = sum_a d[a] a * a*``.
A surface of genus g with labels l_1..l_n evaluates to
``counit(cap * l_1 * ... * l_n * H^g)``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .lie import RootSystem, Weight, dual_weight, integrable_weights
from .tseries import TruncatedSeries, default_order, invert

__all__ = [
    "FrobeniusData",
    "Surface",
    "su2_fusion_exponent",
    "su2_algebra",
    "algebra_from_bethe",
    "evaluate",
    "star_product",
    "solve_unit",
    "verify_frobenius",
    "FrobeniusReport",
]


@dataclass
class FrobeniusData:
    n: int
    level: int
    labels: list  # list[Weight]
    dual: list  # dual[a] = index of the dual label
    fusion: dict  # ordered index triple -> coefficient
    metric: list
    d: list
    cap: list
    twisted_cap: list | None
    zero: object
    one: object
    order: int | None = None  # truncation order for exact algebras
    t: object = None  # sample point for numeric algebras
    _structure: dict = field(default_factory=dict, repr=False)
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def exact(self) -> bool:
        return self.order is not None

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, lam) -> int:
        if isinstance(lam, int):
            if self.n != 2:
                raise ValueError("integer labels are only accepted for SU(2)")
            lam = Weight((lam,))
        if not isinstance(lam, Weight):
            raise TypeError(f"label must be a Weight, got {lam!r}")
        try:
            return self._label_pos[lam.coords]
        except AttributeError:
            self._label_pos = {w.coords: i for i, w in enumerate(self.labels)}
            return self.index_of(lam)
        except KeyError:
            raise ValueError(f"label {lam} is not in the level-{self.level} basis") from None

    def f(self, a: int, b: int, c: int):
        return self.fusion.get((a, b, c), self.zero)

    def basis_vector(self, a: int) -> list:
        return [self.one if i == a else self.zero for i in range(self.size)]

    # structure constants of the product, cached
    def structure(self, a: int, b: int) -> list:
        key = (a, b)
        st = self._structure.get(key)
        if st is None:
            st = [self.f(a, b, self.dual[c]) * self.d[c] for c in range(self.size)]
            self._structure[key] = st
        return st

    def counit(self, vec: Sequence) -> object:
        tot = self.zero
        for c in range(self.size):
            if not _is_zero(vec[c]):
                tot = tot + vec[c] * self.metric[c] * self.cap[self.dual[c]]
        return tot

    def pairing(self, u: Sequence, v: Sequence) -> object:
        tot = self.zero
        for a in range(self.size):
            tot = tot + u[a] * v[self.dual[a]] * self.metric[a]
        return tot

    def handle(self) -> list:
        h = self._memo.get("handle")
        if h is None:
            h = [self.zero] * self.size
            for a in range(self.size):
                st = self.structure(a, self.dual[a])
                h = [h[c] + self.d[a] * st[c] for c in range(self.size)]
            self._memo["handle"] = h
        return h

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        if not self.exact:
            enc = lambda v: mpmath.nstr(v, 20)
        else:
            enc = lambda v: v.to_json()
        fusion = []
        for a, b, c in itertools.combinations_with_replacement(range(self.size), 3):
            v = self.f(a, b, c)
            if not _is_zero(v):
                fusion.append({"labels": [self._label_json(i) for i in (a, b, c)], "series": enc(v)})
        out = {
            "group": f"su{self.n}",
            "level": self.level,
            "order": self.order,
            "labels": [self._label_json(i) for i in range(self.size)],
            "metric": [enc(v) for v in self.metric],
            "fusion": fusion,
            "cap": [enc(v) for v in self.cap],
            "twisted_cap": None if self.twisted_cap is None else [enc(v) for v in self.twisted_cap],
        }
        if not self.exact:
            out["t"] = float(self.t)
        return out

    def _label_json(self, i):
        w = self.labels[i]
        return w.coords[0] if self.n == 2 else list(w.coords)

    @classmethod
    def from_json(cls, data) -> FrobeniusData:
        """Rebuild an exact algebra from ``to_json`` output."""
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("order") is None:
            raise ValueError("only exact (series) algebras can be deserialized")
        n = int(data["group"][2:])
        order = data["order"]
        labels = [Weight((l,) if n == 2 else tuple(l), data["level"]) for l in data["labels"]]
        pos = {w.coords: i for i, w in enumerate(labels)}
        key = lambda l: pos[(l,) if n == 2 else tuple(l)]
        dual = [pos[dual_weight(w).coords] for w in labels]
        fusion = {}
        for entry in data["fusion"]:
            idx = [key(l) for l in entry["labels"]]
            s = TruncatedSeries.from_json(entry["series"])
            for p in set(itertools.permutations(idx)):
                fusion[p] = s
        metric = [TruncatedSeries.from_json(s) for s in data["metric"]]
        cap = [TruncatedSeries.from_json(s) for s in data["cap"]]
        tw = data.get("twisted_cap")
        tw = None if tw is None else [TruncatedSeries.from_json(s) for s in tw]
        zero = TruncatedSeries.constant(0, order)
        return cls(n, data["level"], labels, dual, fusion, metric, [invert(m) for m in metric],
                   cap, tw, zero, zero + 1, order=order)


def _is_zero(v) -> bool:
    if isinstance(v, TruncatedSeries):
        return v.is_zero()
    return v == 0


@dataclass(frozen=True)
class Surface:
    genus: int
    boundaries: tuple = ()
    twisted_marks: int = 0

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        if self.twisted_marks < 0:
            raise ValueError("twisted_marks must be >= 0")
        object.__setattr__(self, "boundaries", tuple(self.boundaries))


# -- SU(2) closed-form data ------------------------------------------------------


def su2_fusion_exponent(k: int, a: int, b: int, c: int) -> int | None:
    """Power of t in the SU(2) fusion coefficient, or None when it vanishes."""
    if (a + b + c) % 2:
        return None
    delta = max(a + b + c - 2 * k, a - b - c, b - c - a, c - a - b)
    return max(delta, 0) // 2


def su2_algebra(k: int, order: int | None = None) -> FrobeniusData:
    if k < 0:
        raise ValueError("level must be non-negative")
    order = default_order() if order is None else order
    one = TruncatedSeries.constant(1, order)
    zero = TruncatedSeries.constant(0, order)
    t = TruncatedSeries.monomial(1, order=order)
    labels = [Weight((j,), k) for j in range(k + 1)]
    dual = list(range(k + 1))
    if k == 0:
        # one-dimensional degenerate algebra
        metric = [one + t]
        return FrobeniusData(2, 0, labels, dual, {(0, 0, 0): one}, metric, [invert(metric[0])],
                             [one + t], None, zero, one, order=order)
    fusion = {}
    for a, b, c in itertools.product(range(k + 1), repeat=3):
        e = su2_fusion_exponent(k, a, b, c)
        if e is not None:
            fusion[(a, b, c)] = TruncatedSeries.monomial(e, order=order)
    metric = [one - t * t if j in (0, k) else one - t for j in range(k + 1)]
    d = [invert(m) for m in metric]
    cap = [zero] * (k + 1)
    tw = [zero] * (k + 1)
    if k == 1:
        # the t-shifted partner of w_0 (resp. w_k) would be w_2 (w_{k-2}), absent here
        cap[0] = one - t * t
        tw[1] = one - t * t
    else:
        cap[0] = one
        cap[2] = -t
        tw[k] = one
        tw[k - 2] = tw[k - 2] - t
    return FrobeniusData(2, k, labels, dual, fusion, metric, d, cap, tw, zero, one, order=order)


# -- numeric algebra from the Bethe path -----------------------------------------


def algebra_from_bethe(rs: RootSystem, k: int, t_samples, steps: int | None = None) -> dict:
    """Numeric algebra tables at each sample ``t``, keyed by the sample.

    Amplitudes are genus-0 Bethe sums with Borel punctures:
    ``fusion = d_{0,3}``, ``metric = d_{0,2}(a, a*)`` and the disc state from
    ``d_{0,1}``.  Characters are computed once per root and reused.
    """
    from . import bethe

    if isinstance(t_samples, (int, float, str)) or hasattr(t_samples, "_mpf_"):
        t_samples = [t_samples]
    out = {}
    labels = integrable_weights(rs, k)
    size = len(labels)
    pos = {w.coords: i for i, w in enumerate(labels)}
    dual = [pos[dual_weight(w).coords] for w in labels]
    with mpmath.workdps(bethe.WORKING_DPS):
        for t in t_samples:
            tt = mpmath.mpf(t)
            kw = {} if steps is None else {"steps": steps}
            roots = bethe.solve(rs, k, tt, **kw)
            th = [bethe.theta_tR(rs, k, tt, 2, r.point) for r in roots]
            chars = [[bethe.deformed_character(rs, k, tt, lam, bethe.BOREL, r.point) for r in roots]
                     for lam in labels]

            def amp(*idx):
                tot = mpmath.mpc(0)
                for i in range(len(roots)):
                    v = mpmath.mpc(th[i])
                    for a in idx:
                        v *= chars[a][i]
                    tot += v
                return tot.real

            fusion = {}
            for a, b, c in itertools.combinations_with_replacement(range(size), 3):
                v = amp(a, b, c)
                for p in set(itertools.permutations((a, b, c))):
                    fusion[p] = v
            metric = [amp(a, dual[a]) for a in range(size)]
            d = [1 / m for m in metric]
            # counit(c) = d_{0,1}(c) = metric[c] * cap[c*]
            cap = [amp(dual[c]) * d[dual[c]] for c in range(size)]
            zero, one = mpmath.mpf(0), mpmath.mpf(1)
            alg = FrobeniusData(rs.n, k, labels, dual, fusion, metric, d, cap, None, zero, one, t=tt)
            alg._memo["closed_sphere"] = amp()
            out[t] = alg
    return out


# -- product, unit, evaluation --------------------------------------------------------


def _mul(alg: FrobeniusData, u: Sequence, v: Sequence) -> list:
    out = [alg.zero] * alg.size
    for a in range(alg.size):
        if _is_zero(u[a]):
            continue
        for b in range(alg.size):
            if _is_zero(v[b]):
                continue
            w = u[a] * v[b]
            st = alg.structure(a, b)
            for c in range(alg.size):
                if not _is_zero(st[c]):
                    out[c] = out[c] + w * st[c]
    return out


def _mul_basis(alg: FrobeniusData, u: Sequence, a: int) -> list:
    out = [alg.zero] * alg.size
    for b in range(alg.size):
        if _is_zero(u[b]):
            continue
        st = alg.structure(b, a)
        for c in range(alg.size):
            if not _is_zero(st[c]):
                out[c] = out[c] + u[b] * st[c]
    return out


def star_product(alg: FrobeniusData, lam, mu) -> list:
    """Coefficient vector of ``lam * mu`` over the label basis."""
    a, b = alg.index_of(lam), alg.index_of(mu)
    return list(alg.structure(a, b))


def solve_unit(alg: FrobeniusData) -> list:
    """Unit read off from the axioms: ``u * a = a`` forces ``u_b = d_{0,1}(b*) d_b``.

    The result is computed from the counit and metric only, so comparing it
    with ``cap`` and checking ``u * a = a`` are genuine tests.
    """
    counit = [alg.counit(alg.basis_vector(c)) for c in range(alg.size)]
    return [counit[alg.dual[b]] * alg.d[b] for b in range(alg.size)]


def evaluate(alg: FrobeniusData, s: Surface) -> object:
    """Amplitude of a surface with the given boundary labels."""
    idx = sorted(alg.index_of(l) for l in s.boundaries)
    key = (s.genus, tuple(idx), s.twisted_marks)
    hit = alg._memo.get(key)
    if hit is not None:
        return hit
    if s.twisted_marks and alg.twisted_cap is None:
        raise ValueError("this algebra has no twisted cap")
    vec = list(alg.cap)
    for a in idx:
        vec = _mul_basis(alg, vec, a)
    for _ in range(s.twisted_marks):
        vec = _mul(alg, vec, alg.twisted_cap)
    if s.genus:
        h = alg.handle()
        for _ in range(s.genus):
            vec = _mul(alg, vec, h)
    val = alg.counit(vec)
    alg._memo[key] = val
    return val


# -- axiom checks ---------------------------------------------------------------------


@dataclass
class FrobeniusReport:
    checks: dict = field(default_factory=dict)  # name -> [n_checked, n_failed, max_dev, first failure]

    def record(self, name: str, ok: bool, dev=0.0, where=None):
        row = self.checks.setdefault(name, [0, 0, 0.0, None])
        row[0] += 1
        if dev > row[2]:
            row[2] = dev
        if not ok:
            row[1] += 1
            if row[3] is None:
                row[3] = where

    @property
    def ok(self) -> bool:
        return all(r[1] == 0 for r in self.checks.values())

    def failures(self) -> list:
        return [(k, r[3]) for k, r in self.checks.items() if r[1]]

    def to_json(self) -> dict:
        return {
            k: {"checked": r[0], "failed": r[1], "max_dev": float(r[2]), "first_failure": r[3]}
            for k, r in self.checks.items()
        }


def _comparer(alg: FrobeniusData, tol) -> Callable:
    if alg.exact:
        def cmp(x, y):
            same = x == y
            return same, 0.0 if same else 1.0
    else:
        def cmp(x, y):
            dev = float(abs(x - y))
            return dev <= tol, dev
    return cmp


def verify_frobenius(alg: FrobeniusData, tol: float = 1e-8, decompositions: bool = True) -> FrobeniusReport:
    """Exhaustively check the algebra axioms.

    Exact algebras are compared with zero tolerance; numeric ones use ``tol``.
    """
    rep = FrobeniusReport()
    cmp = _comparer(alg, tol)
    m = alg.size
    r = range(m)

    for a, b, c in itertools.product(r, repeat=3):
        base = alg.f(a, b, c)
        for p in ((b, a, c), (a, c, b), (c, b, a)):
            ok, dev = cmp(base, alg.f(*p))
            rep.record("fusion_symmetric", ok, dev, (a, b, c))

    basis = [alg.basis_vector(a) for a in r]
    prod = {(a, b): list(alg.structure(a, b)) for a in r for b in r}
    for a, b, c in itertools.product(r, repeat=3):
        left = _mul_basis(alg, prod[(a, b)], c)
        right = _mul(alg, basis[a], prod[(b, c)])
        for i in r:
            ok, dev = cmp(left[i], right[i])
            rep.record("associativity", ok, dev, (a, b, c, i))

    for a, b, c in itertools.product(r, repeat=3):
        lhs = alg.pairing(prod[(a, c)], basis[b])
        rhs = alg.pairing(basis[a], prod[(c, b)])
        ok, dev = cmp(lhs, rhs)
        rep.record("compatibility", ok, dev, (a, b, c))

    # the cylinder is the disc glued into a pair of pants
    for a, b in itertools.product(r, repeat=2):
        lhs = alg.zero
        for c in r:
            lhs = lhs + alg.f(a, b, c) * alg.cap[c]
        rhs = alg.metric[a] if b == alg.dual[a] else alg.zero
        ok, dev = cmp(lhs, rhs)
        rep.record("metric_from_cap", ok, dev, (a, b))

    unit = solve_unit(alg)
    for i in r:
        ok, dev = cmp(unit[i], alg.cap[i])
        rep.record("unit_is_cap", ok, dev, i)
    for a in r:
        got = _mul_basis(alg, unit, a)
        for i in r:
            ok, dev = cmp(got[i], basis[a][i])
            rep.record("unit", ok, dev, (a, i))

    if decompositions:
        for l1, l2, l3, l4 in itertools.product(r, repeat=4):
            s = alg.zero
            u = alg.zero
            for c in r:
                s = s + alg.f(l1, l2, c) * alg.d[c] * alg.f(alg.dual[c], l3, l4)
                u = u + alg.f(l1, l3, c) * alg.d[c] * alg.f(alg.dual[c], l2, l4)
            ok, dev = cmp(s, u)
            rep.record("four_point_decomposition", ok, dev, (l1, l2, l3, l4))
    return rep


def corrupt(alg: FrobeniusData, triple=(1, 1, 2), factor=2) -> FrobeniusData:
    """Copy of ``alg`` with one fusion entry (all permutations) scaled; for negative tests."""
    fusion = dict(alg.fusion)
    for p in set(itertools.permutations(triple)):
        fusion[p] = alg.f(*p) * factor + (alg.one if _is_zero(alg.f(*p)) else alg.zero)
    return FrobeniusData(alg.n, alg.level, alg.labels, alg.dual, fusion, alg.metric, alg.d, alg.cap,
                         alg.twisted_cap, alg.zero, alg.one, order=alg.order, t=alg.t)
