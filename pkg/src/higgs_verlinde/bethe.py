"""Numerical path: deformed fixed-point equations on the SU(N) torus.

Coordinates.  A torus point is stored as ``x = (alpha_1(xi), ..., alpha_{N-1}(xi))``,
the values of the simple roots on ``xi`` (so ``f = exp(2 pi i xi)``).  For SU(2)
the usual angle is ``theta = pi * x``.  The e-basis coordinates used for
characters are ``sigma_a = sum_{i >= a} x_i - mean``.

Equations.  Taking logarithms of the deformed equations gives, per branch
``lam``, the real system::

    F(x) = (k+N) x + (1/pi) sum_{alpha>0} kappa(2 pi alpha(x)) C alpha - (lam + rho) = 0

with ``kappa(phi) = arg(1 - t e^{-i phi}) - arg(1 - t e^{i phi})`` folded to
``atan2(t sin phi, 1 - t cos phi)`` and ``C`` the Cartan matrix.  At ``t = 0``
the solution is ``x = (lam + rho)/(k+N)``; each branch is tracked from there.

All arithmetic uses mpmath at ``WORKING_DPS`` digits; global precision is
never modified outside a ``workdps`` block.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
from mpmath import mpf

from .lie import (
    BOREL,
    ParabolicSpec,
    RootSystem,
    Weight,
    dual_weight,
    integrable_weights,
    weyl_group,
)

__all__ = [
    "WORKING_DPS",
    "T_MAX",
    "NEWTON_TOL",
    "TorusPoint",
    "BetheRoot",
    "IndexRequest",
    "IndexResult",
    "BetheError",
    "NewtonDivergenceError",
    "BranchCollisionError",
    "ContinuationGuardError",
    "NonRegularPointError",
    "solve_t0",
    "continue_roots",
    "solve",
    "residual",
    "product_form_residual",
    "hessian_det",
    "theta_tR",
    "deformed_character",
    "deformed_character_prime",
    "index",
]

WORKING_DPS = 30
T_MAX = 0.5
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
MAX_HALVINGS = 10
DEFAULT_STEPS = 64
COLLISION_DIST = 1e-6
REGULARITY_EPS = 1e-12


class BetheError(RuntimeError):
    """Numeric failure while tracking a branch."""


class NewtonDivergenceError(BetheError):
    pass


class BranchCollisionError(BetheError):
    pass


class ContinuationGuardError(ValueError):
    pass


class NonRegularPointError(ValueError):
    pass


def _hp(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with mpmath.workdps(WORKING_DPS):
            return fn(*args, **kwargs)

    return wrapper


@dataclass(frozen=True)
class TorusPoint:
    """Point ``exp(2 pi i xi)`` of the maximal torus, stored as simple-root values."""

    x: tuple

    @property
    def n(self) -> int:
        return len(self.x) + 1

    @property
    def theta(self):
        """SU(2) angle in (0, pi)."""
        if len(self.x) != 1:
            raise ValueError("theta is only defined for SU(2)")
        return mpmath.pi * self.x[0]

    def sigma(self) -> list:
        n = self.n
        s = [mpmath.fsum(self.x[a:]) for a in range(n)]
        m = mpmath.fsum(s) / n
        return [v - m for v in s]


@dataclass(frozen=True)
class BetheRoot:
    point: TorusPoint
    branch: Weight
    k: int
    t: object
    residual: object

    def to_json(self) -> dict:
        return {
            "branch": list(self.branch.coords),
            "t": float(self.t),
            "xi": [mpmath.nstr(v, 20) for v in self.point.x],
            "residual": float(self.residual),
        }


@dataclass
class IndexRequest:
    group: RootSystem
    k: int
    t: object
    genus: int = 0
    R: int = 2
    punctures: list = field(default_factory=list)  # (Weight, ParabolicSpec) pairs

    def validate(self) -> None:
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        for lam, par in self.punctures:
            if len(lam.coords) != self.group.rank:
                raise ValueError(f"weight {lam} has wrong length for SU({self.group.n})")
            if not lam.is_integrable(self.k):
                raise ValueError(f"weight {lam} is not integrable at level {self.k}")
            par.validate(self.group)
            if not par.compatible(lam):
                raise ValueError(f"weight {lam} is not compatible with parabolic {par}")


@dataclass
class IndexResult:
    value: object
    contributions: list  # (BetheRoot, value) in branch order
    imag: object = 0

    def to_json(self) -> dict:
        return {
            "value": float(self.value),
            "value_str": mpmath.nstr(self.value, 20),
            "per_root_contributions": [
                {"branch": list(r.branch.coords), "contribution": float(c)}
                for r, c in self.contributions
            ],
        }


# -- equation kernels --------------------------------------------------------


def _kappa(t, phi):
    return mpmath.atan2(t * mpmath.sin(phi), 1 - t * mpmath.cos(phi))


def _dkappa_dphi(t, phi):
    c = mpmath.cos(phi)
    return (t * c - t * t) / (1 - 2 * t * c + t * t)


def _dkappa_dt(t, phi):
    return mpmath.sin(phi) / (1 - 2 * t * mpmath.cos(phi) + t * t)


@functools.lru_cache(maxsize=None)
def _tables(n: int):
    rs = RootSystem(n)
    roots = rs.positive_roots
    fund = tuple(rs.root_to_fundamental(r) for r in roots)
    return rs, roots, fund


def _alpha_vals(roots, x):
    return [mpmath.fsum(x[i] for i in range(len(x)) if r[i]) for r in roots]


def _system(n, k, t, x, target):
    """Return ``F(x)`` and its Jacobian."""
    _, roots, fund = _tables(n)
    r = n - 1
    h = k + n
    out = [h * x[i] - target[i] for i in range(r)]
    jac = mpmath.zeros(r, r)
    for i in range(r):
        jac[i, i] = h
    twopi = 2 * mpmath.pi
    for rv, fv, a in zip(roots, fund, _alpha_vals(roots, x)):
        phi = twopi * a
        kv = _kappa(t, phi) / mpmath.pi
        dk = 2 * _dkappa_dphi(t, phi)
        for i in range(r):
            if fv[i]:
                out[i] += kv * fv[i]
                for j in range(r):
                    if rv[j]:
                        jac[i, j] += dk * fv[i]
    return out, jac


def _dF_dt(n, t, x):
    _, roots, fund = _tables(n)
    out = [mpf(0)] * (n - 1)
    twopi = 2 * mpmath.pi
    for fv, a in zip(fund, _alpha_vals(roots, x)):
        d = _dkappa_dt(t, twopi * a) / mpmath.pi
        for i in range(n - 1):
            out[i] += d * fv[i]
    return out


def _target(lam: Weight):
    return [c + 1 for c in lam.coords]


def _check_regular(point: TorusPoint, where: str = ""):
    _, roots, _ = _tables(point.n)
    for r, a in zip(roots, _alpha_vals(roots, point.x)):
        if abs(a - mpmath.nint(a)) < REGULARITY_EPS:
            raise NonRegularPointError(f"non-regular torus point{where}: root {r} is integral")


@_hp
def residual(root: BetheRoot):
    """Max-norm of the real equations at the root."""
    out, _ = _system(root.point.n, root.k, mpf(root.t), root.point.x, _target(root.branch))
    return max(abs(v) for v in out)


@_hp
def product_form_residual(n: int, k: int, t, point: TorusPoint):
    """Independent check in exponentiated form.

    For every ``c`` the quantity
    ``e^{2 pi i (k+N) sigma_c} e^{pi i (2c-N-1)} prod_{b != c} (1 - t e^{-2 pi i (s_c - s_b)})/(1 - t e^{2 pi i (s_c - s_b)})``
    (``c`` 1-based) must be the same number; returns the max spread.
    """
    t = mpf(t)
    s = point.sigma()
    vals = []
    for c in range(n):
        v = mpmath.expj(2 * mpmath.pi * (k + n) * s[c]) * mpmath.expj(mpmath.pi * (2 * (c + 1) - n - 1))
        for b in range(n):
            if b != c:
                d = 2 * mpmath.pi * (s[c] - s[b])
                v *= (1 - t * mpmath.expj(-d)) / (1 - t * mpmath.expj(d))
        vals.append(v)
    return max(abs(v - vals[0]) for v in vals)


# -- solving -------------------------------------------------------------------


@_hp
def solve_t0(rs: RootSystem, k: int) -> list[BetheRoot]:
    if k < 0:
        raise ValueError("level must be non-negative")
    roots = []
    for lam in integrable_weights(rs, k):
        x = tuple(mpf(c) / (k + rs.n) for c in _target(lam))
        pt = TorusPoint(x)
        _check_regular(pt, f" for branch {lam}")
        out, _ = _system(rs.n, k, mpf(0), x, _target(lam))
        roots.append(BetheRoot(pt, lam, k, mpf(0), max(abs(v) for v in out)))
    return roots


def _newton(n, k, t, x, target, tol):
    """Newton corrector. Returns (x, residual) or None on failure."""
    fine = mpf(10) ** (-(WORKING_DPS - 6))
    prev = None
    for _ in range(NEWTON_MAX_ITER):
        out, jac = _system(n, k, t, x, target)
        res = max(abs(v) for v in out)
        if res <= fine:
            return x, res
        if prev is not None and res > 2 * prev and prev <= tol:
            return x_prev, prev
        if prev is not None and res > 1e3 * prev:
            return None
        try:
            dx = mpmath.lu_solve(jac, mpmath.matrix(out))
        except ZeroDivisionError:
            return None
        x_prev, prev = x, res
        x = [x[i] - dx[i] for i in range(n - 1)]
        if max(abs(v) for v in dx) <= fine:
            out, _ = _system(n, k, t, x, target)
            res = max(abs(v) for v in out)
            return (x, res) if res <= tol else None
    out, _ = _system(n, k, t, x, target)
    res = max(abs(v) for v in out)
    return (x, res) if res <= tol else None


def _check_guard(t, t_max):
    if t < 0:
        raise ContinuationGuardError(f"t={float(t)} must be non-negative")
    if t >= t_max:
        raise ContinuationGuardError(
            f"t={float(t)} is outside the continuation guard [0, {t_max}); "
            "raise t_max explicitly if you trust the branch structure there"
        )


def _track(root: BetheRoot, t_target, steps, tol):
    n = root.point.n
    k = root.k
    target = _target(root.branch)
    x = list(root.point.x)
    t = mpf(root.t)
    h0 = (t_target - t) / steps
    h = h0
    halvings = 0
    while t < t_target:
        h = min(h, t_target - t)
        # Euler predictor along dx/dt = -J^{-1} dF/dt
        _, jac = _system(n, k, t, x, target)
        dfdt = _dF_dt(n, t, x)
        slope = mpmath.lu_solve(jac, mpmath.matrix(dfdt))
        guess = [x[i] - h * slope[i] for i in range(n - 1)]
        got = _newton(n, k, t + h, guess, target, tol)
        if got is None:
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise NewtonDivergenceError(
                    f"Newton diverged on branch {root.branch} at t={mpmath.nstr(t + h, 8)} "
                    f"after {MAX_HALVINGS} step halvings"
                )
            h /= 2
            continue
        x, _ = got
        t = t + h
        if halvings:
            # grow back gently after a successful reduced step
            h = min(h * 2, h0)
            halvings = max(halvings - 1, 0)
    out, _ = _system(n, k, t_target, x, target)
    res = max(abs(v) for v in out)
    pt = TorusPoint(tuple(x))
    _check_regular(pt, f" on branch {root.branch} at t={mpmath.nstr(t_target, 8)}")
    return BetheRoot(pt, root.branch, k, t_target, res)


def _check_collisions(roots: Sequence[BetheRoot], t):
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            d = max(abs(a - b) for a, b in zip(roots[i].point.x, roots[j].point.x))
            if d < COLLISION_DIST:
                raise BranchCollisionError(
                    f"branches {roots[i].branch} and {roots[j].branch} collide at "
                    f"t={mpmath.nstr(t, 8)} (distance {mpmath.nstr(d, 3)})"
                )


@_hp
def continue_roots(
    roots_t0: Sequence[BetheRoot],
    t_target,
    steps: int = DEFAULT_STEPS,
    t_max: float = T_MAX,
    tol: float = NEWTON_TOL,
) -> list[BetheRoot]:
    """Track every branch from its current ``t`` to ``t_target``.

    Branches are advanced in lock-step segments so pairwise separation can be
    monitored along the way; the output keeps the input branch order.
    """
    t_target = mpf(t_target)
    _check_guard(t_target, t_max)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    roots = list(roots_t0)
    if not roots:
        return roots
    t0 = max(mpf(r.t) for r in roots)
    if t_target == t0:
        return roots
    if any(mpf(r.t) > t_target for r in roots):
        raise ValueError("continuation only runs forward in t")
    segments = min(steps, 8)
    per = max(steps // segments, 1)
    for s in range(1, segments + 1):
        ts = t0 + (t_target - t0) * s / segments
        roots = [_track(r, ts, per, tol) for r in roots]
        _check_collisions(roots, ts)
    bad = [r for r in roots if r.residual > tol]
    if bad:
        r = bad[0]
        raise NewtonDivergenceError(
            f"residual {float(r.residual):.3e} above tolerance on branch {r.branch} "
            f"at t={mpmath.nstr(t_target, 8)}"
        )
    return roots


@functools.lru_cache(maxsize=256)
def _solve_cached(n: int, k: int, t_str: str, steps: int, t_max: float):
    rs = RootSystem(n)
    return tuple(continue_roots(solve_t0(rs, k), mpf(t_str), steps=steps, t_max=t_max))


def solve(rs: RootSystem, k: int, t, steps: int = DEFAULT_STEPS, t_max: float = T_MAX) -> list[BetheRoot]:
    """``solve_t0`` followed by ``continue_roots``; memoized on ``(N, k, t)``."""
    with mpmath.workdps(WORKING_DPS):
        t_str = mpmath.nstr(mpf(t), WORKING_DPS)
    return list(_solve_cached(rs.n, k, t_str, steps, t_max))


# -- evaluation at a root ------------------------------------------------------


@_hp
def hessian_det(rs: RootSystem, k: int, t, point: TorusPoint):
    """``|F| det H_t^dagger`` as ``N det J`` with ``J`` the Jacobian of the real system."""
    _check_regular(point)
    _, jac = _system(rs.n, k, mpf(t), point.x, [0] * rs.rank)
    return rs.n * mpmath.det(jac)


@_hp
def theta_tR(rs: RootSystem, k: int, t, R: int, point: TorusPoint):
    t = mpf(t)
    _check_regular(point)
    _, roots, _ = _tables(rs.n)
    num = (1 - t) ** ((R - 1) * rs.rank)
    for a in _alpha_vals(roots, point.x):
        e = mpmath.expj(2 * mpmath.pi * a)
        num *= abs(1 - e) ** 2 * abs(1 - t * e) ** (2 * (R - 1))
    return num / hessian_det(rs, k, t, point)


def _exp_pair(vec_e, perm, sigma):
    # e^{w(mu)} with mu given by e-basis coordinates vec_e
    return mpmath.expj(2 * mpmath.pi * mpmath.fsum(vec_e[a] * sigma[perm[a]] for a in range(len(vec_e))))


def _check_puncture(rs, lam: Weight, par: ParabolicSpec):
    if len(lam.coords) != rs.rank:
        raise ValueError(f"weight {lam} has wrong length for SU({rs.n})")
    par.validate(rs)
    if not par.compatible(lam):
        raise ValueError(f"weight {lam} is not compatible with parabolic {par}")


@_hp
def deformed_character(rs: RootSystem, k: int, t, lam: Weight, par: ParabolicSpec, point: TorusPoint):
    """Weyl-alternating deformed character; complex in general (real for SU(2))."""
    _check_puncture(rs, lam, par)
    _check_regular(point)
    t = mpf(t)
    sigma = point.sigma()
    lr = rs.e_basis([c + 1 for c in lam.coords])
    rho = rs.e_basis(rs.rho)
    extra = par.roots_of_g_mod_p(rs)
    twopi = 2 * mpmath.pi
    num = mpmath.mpc(0)
    den = mpmath.mpc(0)
    for w in weyl_group(rs):
        p = w.perm
        term = w.sign * _exp_pair(lr, p, sigma)
        for a, b in extra:
            term /= 1 - t * mpmath.expj(twopi * (sigma[p[a]] - sigma[p[b]]))
        num += term
        den += w.sign * _exp_pair(rho, p, sigma)
    return num / den


@_hp
def deformed_character_prime(rs: RootSystem, k: int, t, lam: Weight, par: ParabolicSpec, point: TorusPoint):
    """Fixed-point form used for the non-positive twists."""
    _check_puncture(rs, lam, par)
    _check_regular(point)
    t = mpf(t)
    sigma = point.sigma()
    le = rs.e_basis(lam.coords)
    extra = par.roots_of_g_mod_p(rs)
    twopi = 2 * mpmath.pi
    total = mpmath.mpc(0)
    for w in weyl_group(rs):
        p = w.perm
        term = _exp_pair(le, p, sigma)
        for a, b in extra:
            term *= 1 - t * mpmath.expj(-twopi * (sigma[p[a]] - sigma[p[b]]))
        for a, b in rs.root_pairs:
            term /= 1 - mpmath.expj(-twopi * (sigma[p[a]] - sigma[p[b]]))
        total += term
    return total


@_hp
def index(req: IndexRequest, roots: Sequence[BetheRoot] | None = None, steps: int = DEFAULT_STEPS,
          t_max: float = T_MAX) -> IndexResult:
    """Sum of per-root contributions ``theta^{1-g} * prod(characters)``.

    For ``R >= 1`` the punctures use the deformed characters; for ``R <= 0``
    the primed characters are used instead.
    """
    req.validate()
    rs, k = req.group, req.k
    t = mpf(req.t)
    _check_guard(t, t_max)
    if roots is None:
        roots = solve(rs, k, t, steps=steps, t_max=t_max)
    char = deformed_character if req.R >= 1 else deformed_character_prime
    contribs = []
    total = mpmath.mpc(0)
    for r in roots:
        th = theta_tR(rs, k, t, req.R, r.point)
        c = mpmath.mpc(th ** (1 - req.genus))
        for lam, par in req.punctures:
            c *= char(rs, k, t, lam, par, r.point)
        contribs.append((r, c.real))
        total += c
    return IndexResult(total.real, contribs, total.imag)


def dual_request(req: IndexRequest) -> IndexRequest:
    """Same request with every puncture weight dualized and the order reversed."""
    punct = [(dual_weight(l), ParabolicSpec(frozenset(req.group.n - i for i in p.levi)))
             for l, p in reversed(req.punctures)]
    return IndexRequest(req.group, req.k, req.t, req.genus, req.R, punct)


def borel_punctures(weights: Sequence[Weight]) -> list:
    return [(w, BOREL) for w in weights]
