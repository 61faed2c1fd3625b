"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any

import mpmath

from . import bethe, tqft
from .lie import WEYL_CAP, ParabolicSpec, RootSystem, Weight, integrable_weights, parse_weight
from .tseries import default_order

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# -- parsing helpers -------------------------------------------------------------------


def parse_group(text: str, cap: int = WEYL_CAP) -> RootSystem:
    t = str(text).strip().lower()
    if not t.startswith("su") or not t[2:].isdigit():
        raise UsageError(f"group must look like 'su2', 'su3', ...; got {text!r}")
    n = int(t[2:])
    if n < 2:
        raise UsageError("SU(N) needs N >= 2")
    if n > cap:
        raise UsageError(f"Weyl enumeration too large: su{n} exceeds the cap N <= {cap}")
    return RootSystem(n)


def parse_puncture(text: str, rs: RootSystem, k: int) -> tuple[Weight, ParabolicSpec]:
    """``"1,0"`` (Borel) or ``"0,1:1"`` (Levi generated by simple root 1)."""
    wtext, _, ptext = str(text).partition(":")
    lam = parse_weight(wtext, k)
    if len(lam.coords) != rs.rank:
        raise UsageError(f"puncture {text!r} needs {rs.rank} coordinates for su{rs.n}")
    if not lam.is_integrable(k):
        raise UsageError(f"puncture weight {lam} is not integrable at level {k}")
    par = ParabolicSpec.parse(ptext)
    par.validate(rs)
    if not par.compatible(lam):
        raise UsageError(f"puncture weight {lam} is not compatible with parabolic {par}")
    return lam, par


def _labels_list(value) -> list[int]:
    if value is None or value == "":
        return []
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(",") if v.strip()]


# -- emitters ---------------------------------------------------------------------------------


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _csv(rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _table(rows: list[list[Any]]) -> str:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _emit(fmt: str, payload, rows: list[list[Any]]) -> str:
    if fmt == "json":
        return _dump_json(payload)
    if fmt == "csv":
        return _csv(rows)
    return _table(rows)


# -- commands -----------------------------------------------------------------------------------


def cmd_solve(cfg: dict) -> tuple[int, str]:
    rs = parse_group(cfg["group"], cfg["weyl_cap"])
    k = _level(cfg)
    t = _t_value(cfg)
    roots = bethe.continue_roots(bethe.solve_t0(rs, k), t, steps=cfg["steps"], t_max=cfg["t_max"])
    payload = [r.to_json() for r in roots]
    if rs.n == 2:
        for p, r in zip(payload, roots):
            with mpmath.workdps(bethe.WORKING_DPS):
                p["theta"] = mpmath.nstr(r.point.theta, 20)
    head = ["branch"] + [f"x{i + 1}" for i in range(rs.rank)] + ["residual"]
    rows = [head] + [[str(r.branch)] + [mpmath.nstr(v, 17) for v in r.point.x] + [f"{float(r.residual):.3e}"]
                     for r in roots]
    return EXIT_OK, _emit(cfg["format"], payload, rows)


def cmd_index(cfg: dict) -> tuple[int, str]:
    rs = parse_group(cfg["group"], cfg["weyl_cap"])
    k = _level(cfg)
    t = _t_value(cfg)
    punct = [parse_puncture(p, rs, k) for p in cfg.get("puncture") or []]
    genus = int(cfg["genus"])
    if genus < 0:
        raise UsageError("genus must be >= 0")
    req = bethe.IndexRequest(rs, k, t, genus, int(cfg["R"]), punct)
    res = bethe.index(req, steps=cfg["steps"], t_max=cfg["t_max"])
    payload = res.to_json()
    payload.update({"group": f"su{rs.n}", "level": k, "genus": genus, "R": int(cfg["R"]), "t": float(t),
                    "punctures": [f"{l}:{p}" for l, p in punct]})
    rows = [["branch", "contribution"]] + [[str(r.branch), mpmath.nstr(c, 17)] for r, c in res.contributions]
    rows.append(["total", mpmath.nstr(res.value, 17)])
    return EXIT_OK, _emit(cfg["format"], payload, rows)


def cmd_tqft(cfg: dict) -> tuple[int, str]:
    group = str(cfg.get("group") or "su2").lower()
    if group != "su2":
        raise UsageError("the exact TQFT path is available for su2 only; use 'index' for su(N) numerics")
    k = _level(cfg)
    order = int(cfg["order"]) if cfg.get("order") is not None else default_order()
    if order < 0:
        raise UsageError("order must be non-negative")
    alg = tqft.su2_algebra(k, order)
    if cfg.get("dump_algebra"):
        return EXIT_OK, _dump_json(alg.to_json())
    labels = _labels_list(cfg.get("punctures"))
    bad = [l for l in labels if not 0 <= l <= k]
    if bad:
        raise UsageError(f"labels {bad} are outside 0..{k}")
    genus = int(cfg["genus"])
    twisted = int(cfg.get("twisted") or 0)
    if twisted and k == 0:
        raise UsageError("no twisted cap at level 0")
    s = tqft.evaluate(alg, tqft.Surface(genus, labels, twisted))
    payload = {"group": "su2", "level": k, "genus": genus, "punctures": labels, "twisted": twisted,
               "order": order, "series": s.to_json(), "pretty": s.pretty()}
    rows = [["power", "coefficient"]] + [[i, f"{c.numerator}/{c.denominator}" if c.denominator != 1 else c.numerator]
                                         for i, c in enumerate(s.coeffs)]
    if cfg["format"] == "table":
        return EXIT_OK, s.pretty()
    return EXIT_OK, _emit(cfg["format"], payload, rows)


def cmd_verify(cfg: dict) -> tuple[int, str]:
    from .verify.suite import SuiteConfig, run_suite

    fields = SuiteConfig.__dataclass_fields__
    data = {k: v for k, v in (cfg.get("suite") or {}).items()}
    for key in ("golden_dir", "inject_failure", "order"):
        if cfg.get(key) is not None:
            data[key] = cfg[key]
    if cfg.get("checks"):
        data["checks"] = [c for c in str(cfg["checks"]).split(",") if c] if isinstance(cfg["checks"], str) \
            else list(cfg["checks"])
    if cfg.get("tol") is not None:
        data["numeric_tol"] = float(cfg["tol"])
    if cfg.get("quick"):
        data.setdefault("su2_levels", [1, 2, 3])
        data.setdefault("su3_levels", [1])
        data.setdefault("max_genus", 2)
        data.setdefault("max_punctures", 3)
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise UsageError(f"unknown suite keys {unknown}")
    try:
        scfg = SuiteConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    report = run_suite(scfg)
    payload = report.to_json()
    for c in payload["checks"]:
        c.pop("seconds", None)
    rows = [["check", "status", "cases", "max_dev", "detail"]] + [
        [r.name, "PASS" if r.passed else "FAIL", r.cases, f"{r.max_dev:.3e}", r.detail] for r in report.results]
    text = report.table() if cfg["format"] == "table" else _emit(cfg["format"], payload, rows)
    return (EXIT_OK if report.passed else EXIT_VERIFY), text


def _level(cfg) -> int:
    if cfg.get("level") is None:
        raise UsageError("--level is required")
    k = int(cfg["level"])
    if k < 0:
        raise UsageError("level must be non-negative")
    return k


def _t_value(cfg):
    if cfg.get("t") is None:
        raise UsageError("--t is required")
    with mpmath.workdps(bethe.WORKING_DPS):
        return mpmath.mpf(str(cfg["t"]))


COMMANDS = {"solve": cmd_solve, "index": cmd_index, "tqft": cmd_tqft, "verify": cmd_verify}

DEFAULTS = {
    "format": "json",
    "group": "su2",
    "genus": 0,
    "R": 2,
    "steps": bethe.DEFAULT_STEPS,
    "t_max": bethe.T_MAX,
    "weyl_cap": WEYL_CAP,
    "twisted": 0,
}


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="JSON file with the same keys as the flags; flags win")
    common.add_argument("--format", choices=["json", "csv", "table"])
    common.add_argument("--group", help="su2, su3, ...")
    common.add_argument("--level", type=int, help="level k")
    common.add_argument("--weyl-cap", dest="weyl_cap", type=int)

    p = argparse.ArgumentParser(prog="higgs-verlinde", description="Deformed Verlinde numbers for SU(N).")
    sub = p.add_subparsers(dest="command", required=True)

    numeric = argparse.ArgumentParser(add_help=False, argument_default=S)
    numeric.add_argument("--t", help="deformation parameter, 0 <= t < t_max")
    numeric.add_argument("--steps", type=int, help="continuation steps")
    numeric.add_argument("--t-max", dest="t_max", type=float, help="continuation guard")

    sub.add_parser("solve", parents=[common, numeric], argument_default=S, help="Bethe roots at t")

    ix = sub.add_parser("index", parents=[common, numeric], argument_default=S, help="Bethe-sum index")
    ix.add_argument("--genus", type=int)
    ix.add_argument("--R", type=int, help="twist, default 2")
    ix.add_argument("--puncture", action="append",
                    help="weight like '1,0', optionally ':LEVI' e.g. '0,1:1'; repeatable")

    tq = sub.add_parser("tqft", parents=[common], argument_default=S, help="exact SU(2) series")
    tq.add_argument("--genus", type=int)
    tq.add_argument("--punctures", help="comma-separated SU(2) labels, e.g. 1,1,1,1")
    tq.add_argument("--twisted", type=int, help="number of twisted caps")
    tq.add_argument("--order", type=int, help="truncation order (default from HIGGS_VERLINDE_ORDER or 32)")
    tq.add_argument("--dump-algebra", dest="dump_algebra", action="store_true")

    vf = sub.add_parser("verify", parents=[common], argument_default=S, help="run the identity suite")
    vf.add_argument("--checks", help="comma-separated subset of checks")
    vf.add_argument("--quick", action="store_true", help="smaller ranges")
    vf.add_argument("--golden-dir", dest="golden_dir")
    vf.add_argument("--order", type=int)
    vf.add_argument("--tol", type=float, help="numeric tolerance override")
    vf.add_argument("--inject-failure", dest="inject_failure", action="store_true",
                    help="corrupt one fusion entry (harness self-test)")
    return p


def merge_config(args: argparse.Namespace) -> dict:
    flags = {k: v for k, v in vars(args).items() if k not in ("config",)}
    cfg = dict(DEFAULTS)
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in data.items()})
    cfg.update(flags)
    if cfg["format"] not in ("json", "csv", "table"):
        raise UsageError(f"unknown format {cfg['format']!r}")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = merge_config(args)
        code, text = COMMANDS[args.command](cfg)
    except bethe.BetheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
