"""Closed-form SU(2) amplitudes as exact rational functions of t.

Each form is assembled from its displayed coefficients as a ``Rational``
(ratio of Laurent polynomials with Fraction coefficients) and only expanded
into a ``TruncatedSeries`` at the end.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..lie import RootSystem
from ..tseries import TruncatedSeries, invert

__all__ = [
    "Rational",
    "T",
    "ONE",
    "ClosedForm",
    "genus0_poincare",
    "genus2_closed",
    "genus3_closed",
    "d04_closed",
    "d04_L_data",
    "twisted_genus2_closed",
    "twisted_genus2_index_part",
    "twisted_genus2_higher_part",
    "CLOSED_FORMS",
]


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {p: c for p, c in out.items() if c}


def _padd(a: dict, b: dict, sign=1) -> dict:
    out = dict(a)
    for p, c in b.items():
        out[p] = out.get(p, 0) + sign * c
    return {p: c for p, c in out.items() if c}


class Rational:
    """``num / den`` with both sides Laurent polynomials ``{power: Fraction}``."""

    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: dict | None = None):
        self.num = {int(p): Fraction(c) for p, c in num.items() if c}
        self.den = {0: Fraction(1)} if den is None else {int(p): Fraction(c) for p, c in den.items() if c}
        if not self.den:
            raise ZeroDivisionError("zero denominator")

    @staticmethod
    def lift(x) -> Rational:
        if isinstance(x, Rational):
            return x
        if isinstance(x, (int, Fraction)):
            return Rational({0: x})
        return NotImplemented

    def __add__(self, other):
        o = Rational.lift(other)
        if o is NotImplemented:
            return o
        if o.den == self.den:
            return Rational(_padd(self.num, o.num), self.den)
        return Rational(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)), _pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return Rational({p: -c for p, c in self.num.items()}, self.den)

    def __sub__(self, other):
        return self + (-Rational.lift(other))

    def __rsub__(self, other):
        return Rational.lift(other) + (-self)

    def __mul__(self, other):
        o = Rational.lift(other)
        if o is NotImplemented:
            return o
        return Rational(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Rational.lift(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise ZeroDivisionError("division by the zero rational function")
        return Rational(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        return Rational.lift(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return Rational(self.den, self.num) ** (-n)
        out = Rational({0: 1})
        for _ in range(n):
            out = out * self
        return out

    def evaluate(self, t):
        num = sum(c * t ** p for p, c in self.num.items())
        den = sum(c * t ** p for p, c in self.den.items())
        return num / den

    def to_series(self, order: int) -> TruncatedSeries:
        """Expand around t = 0; raises if the function has a pole there."""
        if not self.num:
            return TruncatedSeries.constant(0, order)
        vn, vd = min(self.num), min(self.den)
        shift = vn - vd
        work = order + max(0, -shift)
        n = TruncatedSeries.from_poly({p - vn: c for p, c in self.num.items()}, work)
        d = TruncatedSeries.from_poly({p - vd: c for p, c in self.den.items()}, work)
        q = n * invert(d)
        if shift >= 0:
            return q.shift(shift)
        head = q.coeffs[: -shift]
        if any(head):
            raise ValueError("rational function has a pole at t = 0")
        return TruncatedSeries(q.coeffs[-shift:], order)


T = Rational({1: 1})
ONE = Rational({0: 1})


def tp(e) -> Rational:
    """``t**e`` for an integer exponent (negative allowed)."""
    e = Fraction(e)
    if e.denominator != 1:
        raise ValueError(f"non-integral power of t: {e}")
    return Rational({int(e): 1})


@dataclass(frozen=True)
class ClosedForm:
    name: str
    params: dict = field(default_factory=dict)
    build: Callable[[], Rational] | None = None

    def rational(self) -> Rational:
        return self.build()

    def emit(self, order: int) -> TruncatedSeries:
        return self.build().to_series(order)


# -- genus zero --------------------------------------------------------------------


def genus0_poincare(rs: RootSystem, order: int) -> TruncatedSeries:
    """``prod_i (1 - t^{2 m_i + 1})`` over the exponents of SU(N)."""
    out = ONE
    for m in rs.exponents:
        out = out * (1 - tp(2 * m + 1))
    return out.to_series(order)


# -- closed surfaces -----------------------------------------------------------------


def genus2_rational(k: int) -> Rational:
    t = T
    c3 = Rational({0: Fraction(1, 6)})
    c2 = (1 + t ** 2) / (1 - t ** 2)
    c1 = (11 - 36 * t - 9 * t ** 2 + 9 * t ** 4 + 36 * t ** 5 - 11 * t ** 6) / (6 * (1 - t ** 2) ** 3)
    c0 = (1 - 6 * t + 15 * t ** 2 - 4 * t ** 3 + 15 * t ** 4 - 6 * t ** 5 + t ** 6 - 16 * tp(k + 3)) / (1 - t ** 2) ** 3
    return (c3 * k ** 3 + c2 * k ** 2 + c1 * k + c0) / (1 - t) ** 3


def genus2_closed(k: int, order: int) -> TruncatedSeries:
    return genus2_rational(k).to_series(order)


def genus3_rational(k: int) -> Rational:
    t = T
    b6 = Rational({0: Fraction(1, 180)})
    b5 = (1 + t) / (15 * (1 - t))
    b4 = (7 * t ** 2 - 2 * t + 7) / (18 * (1 - t) ** 2)
    b3 = 4 * (t ** 6 - t ** 5 - 4 * t ** 4 - 10 * t ** 3 - 4 * t ** 2 - t + 1) / (3 * (1 - t ** 2) ** 3)
    b2 = (31680 * tp(4 + k) + 469 * t ** 8 - 2280 * t ** 7 + 44 * t ** 6 - 6360 * t ** 5
          + 7614 * t ** 4 - 6360 * t ** 3 + 44 * t ** 2 - 2280 * t + 469) / (180 * (1 - t ** 2) ** 4)
    b1 = (4160 * tp(4 + k) + 3200 * tp(5 + k) + 4160 * tp(6 + k) + 13 * t ** 10 - 114 * t ** 9
          + 361 * t ** 8 + 296 * t ** 7 + 2986 * t ** 6 + 1556 * t ** 5 + 2986 * t ** 4
          + 296 * t ** 3 + 361 * t ** 2 - 114 * t + 13) / (5 * (1 - t ** 2) ** 5)
    b0 = (960 * tp(4 + k) + 1536 * tp(5 + k) + 2944 * tp(6 + k) + 1536 * tp(7 + k) + 960 * tp(8 + k)
          + 64 * tp(6 + 2 * k) + t ** 12 - 12 * t ** 11 + 66 * t ** 10 - 220 * t ** 9 - 465 * t ** 8
          - 2328 * t ** 7 - 2084 * t ** 6 - 2328 * t ** 5 - 465 * t ** 4 - 220 * t ** 3
          + 66 * t ** 2 - 12 * t + 1) / (1 - t ** 2) ** 6
    poly = b6 * k ** 6 + b5 * k ** 5 + b4 * k ** 4 + b3 * k ** 3 + b2 * k ** 2 + b1 * k + b0
    return poly / (1 - t) ** 6


def genus3_closed(k: int, order: int) -> TruncatedSeries:
    return genus3_rational(k).to_series(order)


def genus3_top_term(k: int) -> Rational:
    """The ``t^{2k}`` piece of the genus-3 form, written as a localization term."""
    t = T
    return 64 * tp(2 * k) / ((1 - tp(-1)) ** 6 * (1 - t ** 2) ** 6)


# -- four-punctured sphere ----------------------------------------------------------------


def d04_L_data(k: int, lams) -> tuple[int, int, int, int]:
    l1, l2, l3, l4 = lams
    d1 = abs(l1 - l2)
    d2 = min(l1 + l2, 2 * k - l1 - l2)
    d3 = abs(l3 - l4)
    d4 = min(l3 + l4, 2 * k - l3 - l4)
    return min(d1, d3), max(d1, d3), min(d2, d4), max(d2, d4)


def d04_rational(k: int, lams) -> Rational:
    if sum(lams) % 2:
        return Rational({})
    L1, L2, L3, L4 = d04_L_data(k, lams)
    t = T
    # t^{k h_i} with h_1..h_4 from the sorted L data
    higher = tp(Fraction(2 * k - L3 - L4, 2)) + tp(Fraction(L4 - L3, 2)) \
        + tp(Fraction(L1 + L2, 2)) + tp(Fraction(L2 - L1, 2))
    tail = higher / ((1 - tp(-1)) * (1 - t ** 2))
    if L2 <= L3:
        return Rational({0: Fraction(L3 - L2, 2) + 1}) / (1 - t) + 2 * t / (1 - t) ** 2 + tail
    h0 = tp(Fraction(L2 - L3, 2))
    return h0 * (Rational({0: Fraction(L2 - L3, 2) + 1}) / (1 - t) + 2 * t / (1 - t) ** 2) + tail


def d04_closed(k: int, lams, order: int) -> TruncatedSeries:
    return d04_rational(k, lams).to_series(order)


# -- twisted genus two ----------------------------------------------------------------------


def _even(k: int):
    if k % 2:
        raise ValueError("the twisted genus-two form is defined for even k only")


def twisted_genus2_rational(k: int) -> Rational:
    _even(k)
    t = T
    h = tp(k // 2)
    a3 = (1 - t ** 2) ** 3
    a2 = 6 * (1 - t) ** 2 * (1 + t) ** 4
    a1 = 2 * (1 - t ** 2) * (144 * h * t ** 2 + 7 * t ** 4 + 12 * t ** 3 + 10 * t ** 2 + 12 * t + 7)
    a0 = 12 * (48 * h * t ** 2 + 32 * h * t ** 3 + 48 * h * t ** 4 + t ** 6 - 6 * t ** 5
               - 33 * t ** 4 - 52 * t ** 3 - 33 * t ** 2 - 6 * t + 1)
    return (a3 * k ** 3 + a2 * k ** 2 + a1 * k + a0) / (12 * (1 - t) ** 6 * (1 + t) ** 3)


def twisted_genus2_index_rational(k: int, corrected: bool = True) -> Rational:
    """The part of the twisted form without ``t^{k/2}`` terms.

    The default uses prefactor ``1/(1-t)^3`` and
    ``a'_0 = (1+t)(1-10t+t^2)/(1-t)^3``.  ``corrected=False`` swaps in
    prefactor ``1/(1-t^3)`` and ``a'_0 = (1+t)(3+2t+3t^2)/(3(1-t)^3)``; that
    variant does not add up with the higher part to the whole form.
    """
    t = T
    a3 = Rational({0: Fraction(1, 12)})
    a2 = (1 + t) / (2 * (1 - t))
    a1 = (7 - 2 * t + 7 * t ** 2) / (6 * (1 - t) ** 2)
    if corrected:
        a0 = (1 + t) * (1 - 10 * t + t ** 2) / (1 - t) ** 3
        pref = 1 / (1 - t) ** 3
    else:
        a0 = (1 + t) * (3 + 2 * t + 3 * t ** 2) / (3 * (1 - t) ** 3)
        pref = 1 / (1 - t ** 3)
    return pref * (a3 * k ** 3 + a2 * k ** 2 + a1 * k + a0)


def twisted_genus2_higher_rational(k: int) -> Rational:
    _even(k)
    t = T
    return tp(k // 2 + 2) * (24 * k / ((1 - t) ** 5 * (1 + t) ** 2)
                             + 16 * (3 + 2 * t + 3 * t ** 2) / ((1 - t) ** 6 * (1 + t) ** 3))


def twisted_genus2_closed(k: int, order: int) -> TruncatedSeries:
    """Twisted genus-two amplitude; zero for odd k."""
    if k % 2:
        return TruncatedSeries.constant(0, order)
    return twisted_genus2_rational(k).to_series(order)


def twisted_genus2_index_part(k: int, order: int, corrected: bool = True) -> TruncatedSeries:
    return twisted_genus2_index_rational(k, corrected).to_series(order)


def twisted_genus2_higher_part(k: int, order: int) -> TruncatedSeries:
    return twisted_genus2_higher_rational(k).to_series(order)


def euler_char_TM(k: int) -> Fraction:
    """Holomorphic Euler characteristic of ``TM (x) L^k`` on the genus-2 moduli space."""
    return Fraction(k ** 3 + 10 * k ** 2 + 22 * k - 12, 4)


def euler_char_S2TM(k: int) -> Fraction:
    return Fraction(k ** 3 + 14 * k ** 2 + 34 * k - 84, 2)


CLOSED_FORMS = {
    "genus2": lambda k: ClosedForm("genus2", {"k": k}, lambda: genus2_rational(k)),
    "genus3": lambda k: ClosedForm("genus3", {"k": k}, lambda: genus3_rational(k)),
    "twisted_genus2": lambda k: ClosedForm("twisted_genus2", {"k": k}, lambda: twisted_genus2_rational(k)),
}
