"""Root data of SU(N) (type A_{N-1}).

Conventions
-----------
* Weights are integer vectors in the fundamental-weight basis (length N-1).
* Roots are integer vectors in the simple-root basis.  Positive roots of
  A_{N-1} are ``e_a - e_b`` for ``a < b``; in the simple-root basis this is the
  indicator of ``[a, b)``.
* The invariant form is the Cartan matrix on the simple-root basis, so every
  root has norm squared 2.  Pairing a weight ``lam`` with a root ``r`` is just
  ``sum(lam[i] * r[i])``.
* Weyl group elements are permutations of ``{0..N-1}`` acting on the
  ``e``-basis; ``length`` is the inversion count.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .tseries import TruncatedSeries, invert

__all__ = [
    "WEYL_CAP",
    "RootSystem",
    "Weight",
    "WeylElement",
    "ParabolicSpec",
    "BOREL",
    "WeylEnumerationError",
    "integrable_weights",
    "dual_weight",
    "weyl_group",
    "stabilizer_exponents",
    "stabilizer_walls",
    "d_lambda",
    "weyl_poincare",
    "parse_weight",
]

WEYL_CAP = 6


class WeylEnumerationError(ValueError):
    pass


def _cartan(n: int) -> tuple[tuple[int, ...], ...]:
    r = n - 1
    return tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(r))
        for i in range(r)
    )


@dataclass(frozen=True)
class RootSystem:
    """Root system of SU(n)."""

    n: int
    positive_roots: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    root_pairs: tuple[tuple[int, int], ...] = field(init=False, repr=False)
    form: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"SU(N) needs N >= 2, got {self.n}")
        n = self.n
        pairs = tuple((a, b) for a in range(n) for b in range(a + 1, n))
        roots = tuple(tuple(1 if a <= i < b else 0 for i in range(n - 1)) for a, b in pairs)
        object.__setattr__(self, "root_pairs", pairs)
        object.__setattr__(self, "positive_roots", roots)
        object.__setattr__(self, "form", _cartan(n))

    @property
    def rank(self) -> int:
        return self.n - 1

    @property
    def dual_coxeter(self) -> int:
        return self.n

    @property
    def rho(self) -> tuple[int, ...]:
        return (1,) * self.rank

    @property
    def highest_root(self) -> tuple[int, ...]:
        return (1,) * self.rank

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(range(1, self.n))

    def pair_roots(self, r1: Sequence[int], r2: Sequence[int]) -> int:
        """Invariant form on two vectors given in the simple-root basis."""
        f = self.form
        return sum(r1[i] * f[i][j] * r2[j] for i in range(self.rank) for j in range(self.rank))

    def root_to_fundamental(self, r: Sequence[int]) -> tuple[int, ...]:
        f = self.form
        return tuple(sum(f[i][j] * r[j] for j in range(self.rank)) for i in range(self.rank))

    def pair_weight_root(self, lam: Sequence[int], r: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(lam, r))

    def level_of(self, lam: Sequence[int]) -> int:
        """``<lam, highest root>``."""
        return sum(lam)

    def e_basis(self, lam: Sequence[int]) -> tuple[int, ...]:
        """Weight in fundamental coordinates -> partition-like vector of length n."""
        return tuple(sum(lam[i] for i in range(a, self.rank)) for a in range(self.n))

    def from_e_basis(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(vec[i] - vec[i + 1] for i in range(self.rank))


@dataclass(frozen=True, order=True)
class Weight:
    coords: tuple[int, ...]
    level: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def n(self) -> int:
        return len(self.coords) + 1

    def is_integrable(self, k: int | None = None) -> bool:
        k = self.level if k is None else k
        if k is None:
            raise ValueError("no level given")
        return all(c >= 0 for c in self.coords) and sum(self.coords) <= k

    def __str__(self):
        return ",".join(str(c) for c in self.coords)


def parse_weight(text: str, level: int | None = None) -> Weight:
    """Parse ``"2,1"`` into a weight with fundamental coordinates (2, 1)."""
    try:
        coords = tuple(int(s) for s in text.split(",") if s.strip() != "")
    except ValueError:
        raise ValueError(f"cannot parse weight {text!r}; expected e.g. '2,1'") from None
    if not coords:
        raise ValueError(f"empty weight {text!r}")
    return Weight(coords, level)


@dataclass(frozen=True)
class WeylElement:
    perm: tuple[int, ...]
    length: int

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1

    def act_e(self, vec: Sequence) -> tuple:
        """Permute e-basis coordinates: ``e_a -> e_{perm[a]}``."""
        out = [None] * len(vec)
        for a, v in enumerate(vec):
            out[self.perm[a]] = v
        return tuple(out)


@dataclass(frozen=True)
class ParabolicSpec:
    """Parabolic subgroup containing the Borel, given by its Levi simple roots (1-based)."""

    levi: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "levi", frozenset(int(i) for i in self.levi))

    def roots_of_g_mod_p(self, rs: RootSystem) -> tuple[tuple[int, int], ...]:
        """Positive roots (as ``(a, b)`` pairs) not in the Levi."""
        out = []
        for a, b in rs.root_pairs:
            support = set(range(a + 1, b + 1))
            if not support <= self.levi:
                out.append((a, b))
        return tuple(out)

    def compatible(self, lam: Weight) -> bool:
        return all(1 <= i <= len(lam.coords) and lam.coords[i - 1] == 0 for i in self.levi)

    def validate(self, rs: RootSystem) -> None:
        bad = [i for i in self.levi if not 1 <= i <= rs.rank]
        if bad:
            raise ValueError(f"Levi simple-root indices {sorted(bad)} out of range 1..{rs.rank}")

    @classmethod
    def parse(cls, text: str) -> ParabolicSpec:
        text = text.strip()
        if text in ("", "B", "borel"):
            return cls()
        return cls(frozenset(int(s) for s in text.split("+")))

    def __str__(self):
        return "borel" if not self.levi else "+".join(str(i) for i in sorted(self.levi))


BOREL = ParabolicSpec()


def integrable_weights(rs: RootSystem, k: int) -> list[Weight]:
    if k < 0:
        raise ValueError("level must be non-negative")
    return [
        Weight(c, k)
        for c in itertools.product(range(k + 1), repeat=rs.rank)
        if sum(c) <= k
    ]


def dual_weight(lam: Weight) -> Weight:
    # -w0 reverses the Dynkin diagram of A_{N-1}
    return Weight(tuple(reversed(lam.coords)), lam.level)


def _inversions(p: Sequence[int]) -> int:
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


@lru_cache(maxsize=None)
def _weyl(n: int) -> tuple[WeylElement, ...]:
    return tuple(WeylElement(p, _inversions(p)) for p in itertools.permutations(range(n)))


def weyl_group(rs: RootSystem, cap: int = WEYL_CAP) -> tuple[WeylElement, ...]:
    if rs.n > cap:
        raise WeylEnumerationError(
            f"Weyl enumeration too large: SU({rs.n}) exceeds the cap N <= {cap}"
        )
    return _weyl(rs.n)


def weyl_poincare(elements: Iterable[WeylElement]) -> dict[int, int]:
    """Length generating function as ``{length: count}``."""
    out: dict[int, int] = {}
    for w in elements:
        out[w.length] = out.get(w.length, 0) + 1
    return dict(sorted(out.items()))


def stabilizer_walls(lam: Weight, k: int) -> list[int]:
    """Affine Dynkin nodes whose walls contain ``lam``.

    Nodes ``1..N-1`` are the finite simple roots, node ``0`` the affine one.
    """
    nodes = [0] if k - sum(lam.coords) == 0 else []
    nodes += [i + 1 for i, c in enumerate(lam.coords) if c == 0]
    return sorted(nodes)


def stabilizer_exponents(lam: Weight, k: int) -> list[int]:
    """Exponents of the stabilizer ``H_lam``, padded with zeros to the rank.

    The stabilizer of ``lam`` in the affine Weyl group is generated by the
    reflections in the walls through ``lam``.  For type A the affine diagram
    is an N-cycle, so any proper subset of nodes is a disjoint union of
    chains ``A_m`` with exponents ``1..m``; torus directions contribute 0.
    """
    if k <= 0:
        raise ValueError("stabilizer exponents need k > 0; use the k=0 algebra instead")
    n = lam.n
    if not lam.is_integrable(k):
        raise ValueError(f"weight {lam} is not integrable at level {k}")
    walls = set(stabilizer_walls(lam, k))
    seen: set[int] = set()
    exps: list[int] = []
    for v in sorted(walls):
        if v in seen:
            continue
        size = 0
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            size += 1
            for w in ((u + 1) % n, (u - 1) % n):
                if w in walls and w not in seen:
                    seen.add(w)
                    stack.append(w)
        exps.extend(range(1, size + 1))
    exps.sort()
    return [0] * (n - 1 - len(exps)) + exps


def d_lambda(lam: Weight, k: int, order: int | None = None) -> TruncatedSeries:
    """``prod_i (1 - t^{m_i + 1})^{-1}`` over the stabilizer exponents."""
    denom = TruncatedSeries.constant(1, order)
    for m in stabilizer_exponents(lam, k):
        denom = denom * (1 - TruncatedSeries.monomial(m + 1, order=denom.order))
    return invert(denom)
