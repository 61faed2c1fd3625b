"""Truncated formal power series in ``t`` with exact rational coefficients.

All series taking part in one computation share a truncation order; the
default comes from the ``HIGGS_VERLINDE_ORDER`` environment variable
(falling back to 32).
"""
from __future__ import annotations

import json
import os
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import mpmath

__all__ = [
    "DEFAULT_ORDER",
    "NonUnitSeriesError",
    "OrderMismatchError",
    "TruncatedSeries",
    "add",
    "mul",
    "invert",
    "eval_at",
    "default_order",
]


def default_order() -> int:
    raw = os.environ.get("HIGGS_VERLINDE_ORDER", "32")
    try:
        order = int(raw)
    except ValueError:
        raise ValueError(f"HIGGS_VERLINDE_ORDER must be an integer, got {raw!r}") from None
    if order < 0:
        raise ValueError("HIGGS_VERLINDE_ORDER must be non-negative")
    return order


DEFAULT_ORDER = default_order()


class OrderMismatchError(ValueError):
    pass


class NonUnitSeriesError(ZeroDivisionError):
    pass


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"series coefficients must be exact rationals, got {type(c).__name__}")


class TruncatedSeries:
    """Power series ``c_0 + c_1 t + ... + c_order t^order`` over the rationals.

    Instances are immutable. Arithmetic operators are defined for series of
    equal order and for plain ints/Fractions (treated as constants).
    """

    __slots__ = ("_c", "_order")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [_as_fraction(c) for c in coeffs]
        if order is None:
            order = DEFAULT_ORDER
        if order < 0:
            raise ValueError("order must be non-negative")
        if len(cs) > order + 1:
            cs = cs[: order + 1]
        else:
            cs.extend([Fraction(0)] * (order + 1 - len(cs)))
        self._c = tuple(cs)
        self._order = order

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c, order: int | None = None) -> TruncatedSeries:
        return cls([c], order)

    @classmethod
    def monomial(cls, power: int, coeff=1, order: int | None = None) -> TruncatedSeries:
        if power < 0:
            raise ValueError("negative powers are not representable")
        order = DEFAULT_ORDER if order is None else order
        cs = [0] * (order + 1)
        if power <= order:
            cs[power] = coeff
        return cls(cs, order)

    @classmethod
    def from_poly(cls, terms: dict[int, object], order: int | None = None) -> TruncatedSeries:
        """Build from ``{power: coeff}``; terms above the order are dropped."""
        order = DEFAULT_ORDER if order is None else order
        cs = [Fraction(0)] * (order + 1)
        for p, c in terms.items():
            if p < 0:
                raise ValueError("negative powers are not representable")
            if p <= order:
                cs[p] += _as_fraction(c)
        return cls(cs, order)

    @classmethod
    def _raw(cls, cs: tuple, order: int) -> TruncatedSeries:
        obj = cls.__new__(cls)
        obj._c = cs
        obj._order = order
        return obj

    # accessors ------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._c

    @property
    def order(self) -> int:
        return self._order

    def __getitem__(self, m: int) -> Fraction:
        return self._c[m]

    def __len__(self) -> int:
        return len(self._c)

    def is_zero(self) -> bool:
        return not any(self._c)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._c)

    def valuation(self) -> int | None:
        for i, c in enumerate(self._c):
            if c:
                return i
        return None

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            if other._order != self._order:
                raise OrderMismatchError(
                    f"truncation orders differ: {self._order} vs {other._order}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.constant(other, self._order)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TruncatedSeries._raw(tuple(a + b for a, b in zip(self._c, o._c)), self._order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(tuple(-a for a in self._c), self._order)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TruncatedSeries._raw(tuple(a - b for a, b in zip(self._c, o._c)), self._order)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries._raw(tuple(a * other for a in self._c), self._order)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _cauchy(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a series by zero")
            return TruncatedSeries._raw(tuple(a / other for a in self._c), self._order)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _cauchy(self, invert(o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _cauchy(o, invert(self))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return invert(self) ** (-n)
        result = TruncatedSeries.constant(1, self._order)
        base = self
        while n:
            if n & 1:
                result = _cauchy(result, base)
            n >>= 1
            if n:
                base = _cauchy(base, base)
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.constant(other, self._order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._order == other._order and self._c == other._c

    def __hash__(self):
        return hash((self._order, self._c))

    def shift(self, n: int) -> TruncatedSeries:
        """Multiply by ``t**n`` (``n >= 0``)."""
        if n < 0:
            raise ValueError("negative shifts leave the power-series ring")
        cs = (Fraction(0),) * n + self._c
        return TruncatedSeries._raw(cs[: self._order + 1], self._order)

    def with_order(self, order: int) -> TruncatedSeries:
        """Re-truncate (or zero-pad) to a different order."""
        return TruncatedSeries(self._c, order)

    # formatting -----------------------------------------------------------
    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self._c]

    @classmethod
    def from_json(cls, data: Sequence[str] | str) -> TruncatedSeries:
        if isinstance(data, str):
            data = json.loads(data)
        cs = [Fraction(s) for s in data]
        return cls(cs, len(cs) - 1)

    def __repr__(self):
        return f"TruncatedSeries({self.pretty()}, order={self._order})"

    def pretty(self, var: str = "t") -> str:
        parts = []
        for i, c in enumerate(self._c):
            if not c:
                continue
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if i == 0:
                body = str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        if not parts:
            return "0"
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return " ".join([head] + [f"{s} {b}" for s, b in parts[1:]])


def _scaled_ints(cs: tuple) -> tuple[list[int], int]:
    den = lcm(*(c.denominator for c in cs)) if cs else 1
    return [c.numerator * (den // c.denominator) for c in cs], den


def _cauchy(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    order = a._order
    na, da = _scaled_ints(a._c)
    nb, db = _scaled_ints(b._c)
    nz_b = [(j, v) for j, v in enumerate(nb) if v]
    out = [0] * (order + 1)
    for i, x in enumerate(na):
        if not x:
            continue
        lim = order - i
        for j, y in nz_b:
            if j > lim:
                break
            out[i + j] += x * y
    den = da * db
    if den == 1:
        return TruncatedSeries._raw(tuple(Fraction(v) for v in out), order)
    return TruncatedSeries._raw(tuple(Fraction(v, den) for v in out), order)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.order != b.order:
        raise OrderMismatchError(f"truncation orders differ: {a.order} vs {b.order}")
    return a + b


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.order != b.order:
        raise OrderMismatchError(f"truncation orders differ: {a.order} vs {b.order}")
    return _cauchy(a, b)


def invert(a: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse up to the truncation order."""
    c = a.coeffs
    if c[0] == 0:
        raise NonUnitSeriesError("non-unit series: constant term is zero")
    inv0 = 1 / c[0]
    out = [inv0]
    for m in range(1, a.order + 1):
        s = sum((c[j] * out[m - j] for j in range(1, m + 1)), Fraction(0))
        out.append(-s * inv0)
    return TruncatedSeries._raw(tuple(out), a.order)


def eval_at(a: TruncatedSeries, t0, growth_bound=0):
    """Evaluate the truncated polynomial at ``t0`` by Horner's rule.

    Returns ``(value, tail)`` where ``tail = |t0|**(order+1) * growth_bound``
    bounds the contribution of discarded terms when ``growth_bound`` bounds
    their coefficients (times any geometric factor the caller wants to absorb).
    """
    t0 = mpmath.mpf(t0)
    if t0 >= 1:
        raise ValueError(f"t0={t0} is outside convergence guard [0, 1)")
    if t0 < 0:
        raise ValueError(f"t0={t0} must be non-negative")
    acc = mpmath.mpf(0)
    for c in reversed(a.coeffs):
        acc = acc * t0 + mpmath.mpf(c.numerator) / c.denominator
    if isinstance(growth_bound, Fraction):
        growth_bound = mpmath.mpf(growth_bound.numerator) / growth_bound.denominator
    tail = abs(t0) ** (a.order + 1) * mpmath.mpf(growth_bound)
    return acc, tail
