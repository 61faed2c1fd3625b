"""Identity suite tying the numeric and exact paths to each other and to the closed forms."""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from .. import bethe, tqft
from ..lie import BOREL, RootSystem, Weight, d_lambda, dual_weight, integrable_weights
from ..tseries import TruncatedSeries, eval_at
from . import closed_forms as cf
from .oracles import classical_fusion_su2, classical_verlinde_su2

__all__ = ["SuiteConfig", "CheckResult", "SuiteReport", "run_suite", "CHECKS", "tail_bound"]


@dataclass
class SuiteConfig:
    su2_levels: tuple = (0, 1, 2, 3, 4, 5, 6)
    su3_levels: tuple = (1, 2, 3)
    t_values: tuple = (0.05, 0.1)
    genus0_t_values: tuple = (0.05, 0.1, 0.15)
    order: int = 32
    max_genus: int = 3
    max_punctures: int = 4
    numeric_tol: float = 1e-8
    cross_tol: float = 1e-7
    classical_tol: float = 1e-9
    exact_tol: float = 0.0
    golden_dir: str | None = None
    checks: tuple | None = None  # None = all
    inject_failure: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> SuiteConfig:
        known = {f for f in cls.__dataclass_fields__}
        bad = sorted(set(data) - known)
        if bad:
            raise ValueError(f"unknown suite config keys: {bad}")
        out = cls(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in data.items()})
        if out.order < 8:
            raise ValueError("order must be at least 8 for the closed-form checks")
        return out


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_dev: float = 0.0
    cases: int = 0
    detail: str = ""
    seconds: float = 0.0


@dataclass
class SuiteReport:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(r) for r in self.results]}

    def table(self) -> str:
        w = max([len(r.name) for r in self.results] + [5])
        lines = [f"{'check':<{w}}  status  cases   max_dev     detail"]
        for r in self.results:
            st = "PASS" if r.passed else "FAIL"
            lines.append(f"{r.name:<{w}}  {st:<6}  {r.cases:<6}  {r.max_dev:<10.3e}  {r.detail}")
        return "\n".join(lines)


class _Acc:
    """Running tally of deviations against a tolerance."""

    def __init__(self, tol):
        self.tol = tol
        self.cases = 0
        self.max_dev = 0.0
        self.first_bad = None

    def add(self, dev, where=None, ok=None):
        dev = float(dev)
        self.cases += 1
        if dev > self.max_dev:
            self.max_dev = dev
        if ok is None:
            ok = dev <= self.tol
        if not ok and self.first_bad is None:
            self.first_bad = where
        return ok

    def result(self, name, extra="") -> CheckResult:
        passed = self.first_bad is None
        detail = extra if passed else f"first failure at {self.first_bad}. {extra}".strip()
        return CheckResult(name, passed, self.max_dev, self.cases, detail)


def tail_bound(series: TruncatedSeries, t) -> mpmath.mpf:
    """Declared bound on the discarded tail of a truncated amplitude at ``t``.

    Coefficients of the amplitudes grow at most polynomially in the degree
    (degree <= 3g-3+n), so we take ``B = 10 * max|c_m|`` times the generating
    factor ``1/(1-t)^(d+1)`` with a generous ``d = 12``.
    """
    big = max((abs(c) for c in series.coeffs), default=Fraction(0))
    _, tail = eval_at(series, t, growth_bound=10 * (big + 1))
    return tail / (1 - mpmath.mpf(t)) ** 13


def _mp(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def _series_at(s: TruncatedSeries, t):
    v, _ = eval_at(s, t)
    return v


# -- individual checks --------------------------------------------------------------------


def check_genus0(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(cfg.numeric_tol)
    cases = [(2, k) for k in range(3, 9)] + [(3, k) for k in range(5, 8)]
    with mpmath.workdps(bethe.WORKING_DPS):
        for n, k in cases:
            rs = RootSystem(n)
            target = cf.genus0_poincare(rs, cfg.order)
            for t in cfg.genus0_t_values:
                got = bethe.index(bethe.IndexRequest(rs, k, t)).value
                want = _series_at(target, t)
                acc.add(abs(got - want), (f"su{n}", k, t))
    return acc.result("genus0_poincare")


class _NumericSU2:
    """Per-(k, t) cache of Bethe roots, theta values and characters."""

    def __init__(self, k, t):
        rs = RootSystem(2)
        self.k, self.t = k, mpmath.mpf(t)
        self.roots = bethe.solve(rs, k, t)
        self.theta = [bethe.theta_tR(rs, k, t, 2, r.point) for r in self.roots]
        self.chars = [[bethe.deformed_character(rs, k, t, Weight((l,)), BOREL, r.point).real
                       for r in self.roots] for l in range(k + 1)]

    def amplitude(self, genus, labels):
        tot = mpmath.mpf(0)
        for i in range(len(self.roots)):
            v = self.theta[i] ** (1 - genus)
            for l in labels:
                v *= self.chars[l][i]
            tot += v
        return tot


def check_cross_path(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(cfg.cross_tol)
    levels = [k for k in cfg.su2_levels]
    with mpmath.workdps(bethe.WORKING_DPS):
        for k in levels:
            alg = tqft.su2_algebra(k, cfg.order)
            exact_cache = {}
            for t in cfg.t_values:
                num = _NumericSU2(k, t)
                for g in range(cfg.max_genus + 1):
                    for n in range(cfg.max_punctures + 1):
                        for labels in itertools.product(range(k + 1), repeat=n):
                            key = (g, tuple(sorted(labels)), t)
                            if key not in exact_cache:
                                s = tqft.evaluate(alg, tqft.Surface(g, labels))
                                exact_cache[key] = (_series_at(s, t), tail_bound(s, t))
                            ev, tail = exact_cache[key]
                            dev = abs(num.amplitude(g, labels) - ev)
                            acc.add(dev, (k, g, labels, t), ok=dev <= cfg.cross_tol + tail)
    return acc.result("cross_path_su2", f"g<={cfg.max_genus}, n<={cfg.max_punctures}, ordered label tuples")


def _golden(cfg: SuiteConfig):
    if cfg.golden_dir is None:
        return None
    from .golden import load_golden
    return load_golden(cfg.golden_dir)


def check_closed_forms(cfg: SuiteConfig) -> CheckResult:
    """Exact equality of TQFT amplitudes with the closed forms (and golden files if given)."""
    acc = _Acc(0)
    gold = _golden(cfg)
    order = cfg.order

    def cmp(got, want, where):
        acc.add(0 if got == want else 1, where)

    def ref(name, key, build):
        if gold is not None and name in gold and key in gold[name]:
            s = gold[name][key]
            return s if s.order == order else s.with_order(order)
        return build()

    for k in range(1, 7):
        alg = tqft.su2_algebra(k, order)
        cmp(tqft.evaluate(alg, tqft.Surface(2)), ref("genus2", str(k), lambda: cf.genus2_closed(k, order)),
            ("genus2", k))
        if k <= 4:
            cmp(tqft.evaluate(alg, tqft.Surface(3)), ref("genus3", str(k), lambda: cf.genus3_closed(k, order)),
                ("genus3", k))
        if k % 2 == 0:
            cmp(tqft.evaluate(alg, tqft.Surface(2, (), 1)),
                ref("twisted_genus2", str(k), lambda: cf.twisted_genus2_closed(k, order)), ("twisted_genus2", k))
    for k in range(1, 5):
        alg = tqft.su2_algebra(k, order)
        for labels in itertools.product(range(k + 1), repeat=4):
            key = f"{k}:" + ",".join(map(str, labels))
            want = ref("d04", key, lambda: cf.d04_closed(k, labels, order))
            cmp(tqft.evaluate(alg, tqft.Surface(0, labels)), want, ("d04", k, labels))
    return acc.result("closed_forms_exact", "genus2 k<=6, genus3 k<=4, four-point k<=4, twisted even k<=6")


def _su2_gluing(alg, acc, max_genus=2, max_n=3):
    k = alg.level
    labels_all = range(k + 1)
    # genus reduction
    for g in range(max_genus):
        for n in range(max_n + 1):
            for labels in itertools.combinations_with_replacement(labels_all, n):
                lhs = tqft.evaluate(alg, tqft.Surface(g + 1, labels))
                rhs = alg.zero
                for l in labels_all:
                    rhs = rhs + tqft.evaluate(alg, tqft.Surface(g, labels + (l, l))) * alg.d[l]
                acc.add(0 if lhs == rhs else 1, ("genus_rule", k, g, labels))
    # splitting
    for g1, g2 in itertools.product(range(max_genus), repeat=2):
        if g1 + g2 > max_genus:
            continue
        for n1, n2 in itertools.product(range(2), repeat=2):
            for l1 in itertools.product(labels_all, repeat=n1):
                for l2 in itertools.product(labels_all, repeat=n2):
                    lhs = tqft.evaluate(alg, tqft.Surface(g1 + g2, l1 + l2))
                    rhs = alg.zero
                    for l in labels_all:
                        rhs = rhs + (tqft.evaluate(alg, tqft.Surface(g1, l1 + (l,)))
                                     * tqft.evaluate(alg, tqft.Surface(g2, l2 + (l,))) * alg.d[l])
                    acc.add(0 if lhs == rhs else 1, ("split_rule", k, g1, g2, l1, l2))


def _numeric_gluing(rs, k, t, acc):
    """Gluing rules on raw Bethe sums with d_lambda from the stabilizer exponents."""
    labels = integrable_weights(rs, k)
    roots = bethe.solve(rs, k, t)
    th = [bethe.theta_tR(rs, k, t, 2, r.point) for r in roots]
    ch = {l.coords: [bethe.deformed_character(rs, k, t, l, BOREL, r.point) for r in roots] for l in labels}
    dl = {l.coords: eval_at(d_lambda(l, k, 40), t)[0] for l in labels}

    def amp(g, ls):
        tot = mpmath.mpc(0)
        for i in range(len(roots)):
            v = mpmath.mpc(th[i] ** (1 - g))
            for l in ls:
                v *= ch[l.coords][i]
            tot += v
        return tot

    for mu in labels:
        lhs = amp(1, [mu])
        rhs = sum(amp(0, [mu, l, dual_weight(l)]) * dl[l.coords] for l in labels)
        acc.add(abs(lhs - rhs), ("genus_rule", f"su{rs.n}", k, str(mu)))
    lhs = amp(2, [])
    rhs = sum(amp(1, [l, dual_weight(l)]) * dl[l.coords] for l in labels)
    acc.add(abs(lhs - rhs), ("genus_rule", f"su{rs.n}", k, "closed"))
    for a, b, c, d in itertools.combinations_with_replacement(labels, 4):
        lhs = amp(0, [a, b, c, d])
        rhs = sum(amp(0, [a, b, l]) * amp(0, [dual_weight(l), c, d]) * dl[l.coords] for l in labels)
        acc.add(abs(lhs - rhs), ("split_rule", f"su{rs.n}", k, str(a), str(b), str(c), str(d)))


def check_frobenius(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(cfg.numeric_tol)
    for k in cfg.su2_levels:
        alg = tqft.su2_algebra(k, cfg.order)
        if cfg.inject_failure and k == max(cfg.su2_levels) and k >= 2:
            alg = tqft.corrupt(alg)
        rep = tqft.verify_frobenius(alg)
        for name, row in rep.checks.items():
            for _ in range(row[0] - row[1]):
                acc.add(0, None)
            if row[1]:
                acc.add(1, ("su2", k, name, row[3]), ok=False)
        _su2_gluing(alg, acc)
    with mpmath.workdps(bethe.WORKING_DPS):
        rs = RootSystem(3)
        for k in cfg.su3_levels:
            alg = tqft.algebra_from_bethe(rs, k, [0.1])[0.1]
            rep = tqft.verify_frobenius(alg, tol=cfg.numeric_tol)
            for name, row in rep.checks.items():
                acc.add(row[2], ("su3", k, name, row[3]), ok=row[1] == 0)
            _numeric_gluing(rs, k, mpmath.mpf("0.1"), acc)
    return acc.result("frobenius_and_gluing", "SU(2) exact, SU(3) numeric at t=0.1")


def _orth_cases(cfg):
    return [(2, k) for k in cfg.su2_levels if k >= 1] + [(3, k) for k in cfg.su3_levels]


def check_orthogonality(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(cfg.numeric_tol)
    with mpmath.workdps(bethe.WORKING_DPS):
        for n, k in _orth_cases(cfg):
            rs = RootSystem(n)
            labels = integrable_weights(rs, k)
            pos = {l.coords: i for i, l in enumerate(labels)}
            for t in cfg.t_values:
                roots = bethe.solve(rs, k, t)
                th = [bethe.theta_tR(rs, k, t, 2, r.point) for r in roots]
                ch = [[bethe.deformed_character(rs, k, t, l, BOREL, r.point) for r in roots] for l in labels]
                dl = [eval_at(d_lambda(l, k, 40), t)[0] for l in labels]
                dual = [pos[dual_weight(l).coords] for l in labels]
                m = len(roots)
                for a in range(len(labels)):
                    for b in range(len(labels)):
                        v = mpmath.fsum(th[i] * ch[a][i] * ch[b][i] for i in range(m))
                        want = 1 / dl[a] if b == dual[a] else 0
                        acc.add(abs(v - want), ("first", f"su{n}", k, t, a, b))
                for i in range(m):
                    for j in range(m):
                        v = mpmath.fsum(dl[a] * ch[a][i] * ch[dual[a]][j] for a in range(len(labels))) * th[i]
                        want = 1 if i == j else 0
                        acc.add(abs(v - want), ("second", f"su{n}", k, t, i, j))
    return acc.result("orthogonality", "second relation with d_lambda inside the sum")


def check_classical(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(cfg.classical_tol)
    rs = RootSystem(2)
    with mpmath.workdps(bethe.WORKING_DPS):
        for k in cfg.su2_levels:
            alg = tqft.su2_algebra(k, cfg.order)
            roots = bethe.solve(rs, k, 0)
            for g in range(cfg.max_genus + 1):
                for n in range(4):
                    for labels in itertools.combinations_with_replacement(range(k + 1), n):
                        want = classical_verlinde_su2(k, g, labels)
                        exact = tqft.evaluate(alg, tqft.Surface(g, labels))[0]
                        acc.add(abs(_mp(exact) - want),
                                ("tqft", k, g, labels))
                        req = bethe.IndexRequest(rs, k, 0, g, 2, [(Weight((l,)), BOREL) for l in labels])
                        acc.add(abs(bethe.index(req, roots=roots).value - want), ("bethe", k, g, labels))
            if k >= 1:
                acc.add(abs(_mp(cf.genus2_closed(k, 4)[0]) - classical_verlinde_su2(k, 2)), ("genus2_closed", k))
                acc.add(abs(_mp(cf.genus3_closed(k, 4)[0]) - classical_verlinde_su2(k, 3)), ("genus3_closed", k))
                acc.add(abs(_mp(tqft.evaluate(alg, tqft.Surface(2, (), 1))[0]) - classical_verlinde_su2(k, 2, (k,))),
                        ("twisted_genus2", k))
                for labels in itertools.combinations_with_replacement(range(k + 1), 4):
                    acc.add(abs(_mp(cf.d04_closed(k, labels, 4)[0]) - classical_verlinde_su2(k, 0, labels)),
                            ("d04_closed", k, labels))
                for a, b, c in itertools.product(range(k + 1), repeat=3):
                    f = alg.f(a, b, c)[0]
                    acc.add(abs(f - classical_fusion_su2(k, a, b, c)), ("fusion", k, a, b, c))
    return acc.result("classical_limit", "t=0 against the S-matrix oracle")


def check_integrality(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(0)
    for k in cfg.su2_levels:
        alg = tqft.su2_algebra(k, cfg.order)
        surfaces = []
        for g in (2, 3):
            for n in range(3):
                for labels in itertools.combinations_with_replacement(range(k + 1), n):
                    surfaces.append(tqft.Surface(g, labels))
        if k >= 1:
            surfaces.append(tqft.Surface(2, (), 1))
        for s in surfaces:
            if k == 0 and s.genus >= 2:
                # the degenerate algebra gives (1+t)^{3-3g}: not a dimension count
                continue
            ser = tqft.evaluate(alg, s)
            ok = ser.is_integral() and all(c >= 0 for c in ser.coeffs)
            acc.add(0 if ok else 1, ("nonneg_integer", k, s))
        if k >= 1:
            for name, ser in (("genus2", cf.genus2_closed(k, cfg.order)), ("genus3", cf.genus3_closed(k, cfg.order)),
                              ("twisted", cf.twisted_genus2_closed(k, cfg.order))):
                ok = ser.is_integral() and all(c >= 0 for c in ser.coeffs)
                acc.add(0 if ok else 1, ("closed_nonneg_integer", name, k))
        if k >= 3:
            ok = tqft.evaluate(alg, tqft.Surface(0)) == cf.genus0_poincare(RootSystem(2), cfg.order)
            acc.add(0 if ok else 1, ("genus0_equals_poincare", k))
    return acc.result("integrality_positivity", "g>=2 amplitudes; genus-0 equals 1-t^3 for k>=3")


def check_twisted_split(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(0)
    lit_bad = []
    for k in range(2, 9, 2):
        whole = cf.twisted_genus2_closed(k, cfg.order)
        idx = cf.twisted_genus2_index_part(k, cfg.order)
        hi = cf.twisted_genus2_higher_part(k, cfg.order)
        acc.add(0 if whole == idx + hi else 1, ("split", k))
        acc.add(0 if idx[1] == cf.euler_char_TM(k) and idx[2] == cf.euler_char_S2TM(k) else 1,
                ("euler_characteristics", k))
        if whole != cf.twisted_genus2_index_part(k, cfg.order, corrected=False) + hi:
            lit_bad.append(k)
    note = "corrected index part"
    if lit_bad:
        note += f"; uncorrected coefficients fail the split for k={lit_bad}"
    return acc.result("twisted_split", note)


def check_fusion_identity(cfg: SuiteConfig) -> CheckResult:
    """Character products expand with the exact fusion data; twisted-cap decomposition."""
    acc = _Acc(cfg.numeric_tol)
    with mpmath.workdps(bethe.WORKING_DPS):
        for k in cfg.su2_levels:
            if k < 1:
                continue
            alg = tqft.su2_algebra(k, cfg.order)
            for t in cfg.t_values:
                num = _NumericSU2(k, t)
                fv = {key: _series_at(s, t) for key, s in alg.fusion.items()}
                dv = [_series_at(s, t) for s in alg.d]
                for i in range(len(num.roots)):
                    for a, b in itertools.product(range(k + 1), repeat=2):
                        lhs = num.chars[a][i] * num.chars[b][i]
                        rhs = mpmath.fsum(fv.get((a, b, c), 0) * dv[c] * num.chars[c][i] for c in range(k + 1))
                        acc.add(abs(lhs - rhs), ("fusion_identity", k, t, i, a, b))
                    # (-1)^j against the twisted cap, j ordering roots by distance to the identity
                    if k >= 2:
                        tw = [_series_at(s, t) for s in alg.twisted_cap]
                        val = mpmath.fsum(tw[c] * num.chars[c][i] for c in range(k + 1))
                        acc.add(abs(val - (-1) ** i), ("twisted_decomposition", k, t, i))
    return acc.result("fusion_identity", "Theta_a Theta_b = sum_c f d_c Theta_c; (-1)^j = Theta_k - t Theta_{k-2}")


def check_residuals(cfg: SuiteConfig) -> CheckResult:
    acc = _Acc(1e-12)
    with mpmath.workdps(bethe.WORKING_DPS):
        for n, k in _orth_cases(cfg):
            rs = RootSystem(n)
            count = len(integrable_weights(rs, k))
            for t in cfg.genus0_t_values:
                roots = bethe.solve(rs, k, t)
                acc.add(0 if len(roots) == count else 1, ("root_count", n, k, t))
                for r in roots:
                    acc.add(max(r.residual, bethe.product_form_residual(n, k, t, r.point)), ("residual", n, k, t, str(r.branch)))
    return acc.result("bethe_residuals", "real system and exponentiated form")


CHECKS: dict[str, Callable[[SuiteConfig], CheckResult]] = {
    "genus0_poincare": check_genus0,
    "cross_path_su2": check_cross_path,
    "closed_forms_exact": check_closed_forms,
    "frobenius_and_gluing": check_frobenius,
    "orthogonality": check_orthogonality,
    "classical_limit": check_classical,
    "integrality_positivity": check_integrality,
    "twisted_split": check_twisted_split,
    "fusion_identity": check_fusion_identity,
    "bethe_residuals": check_residuals,
}


def run_suite(cfg: SuiteConfig | None = None, progress: Callable[[str], None] | None = None) -> SuiteReport:
    cfg = cfg or SuiteConfig()
    names = list(CHECKS) if cfg.checks is None else list(cfg.checks)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; choose from {sorted(CHECKS)}")
    report = SuiteReport()
    for name in names:
        start = time.perf_counter()
        res = CHECKS[name](cfg)
        res.seconds = round(time.perf_counter() - start, 3)
        report.results.append(res)
        if progress:
            progress(f"{name}: {'PASS' if res.passed else 'FAIL'}")
    return report


def report_json(report: SuiteReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)
