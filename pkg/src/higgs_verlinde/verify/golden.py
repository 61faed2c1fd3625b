"""Golden files: closed forms expanded to a fixed order and stored as JSON."""
from __future__ import annotations

import itertools
import json
from pathlib import Path

from ..lie import RootSystem
from ..tseries import TruncatedSeries
from . import closed_forms as cf

GOLDEN_ORDER = 32
GOLDEN_KMAX = 8
D04_KMAX = 4


def build_golden(order: int = GOLDEN_ORDER, kmax: int = GOLDEN_KMAX) -> dict:
    out = {
        "genus0": {f"su{n}": cf.genus0_poincare(RootSystem(n), order) for n in (2, 3, 4)},
        "genus2": {str(k): cf.genus2_closed(k, order) for k in range(1, kmax + 1)},
        "genus3": {str(k): cf.genus3_closed(k, order) for k in range(1, kmax + 1)},
        "twisted_genus2": {str(k): cf.twisted_genus2_closed(k, order) for k in range(2, kmax + 1, 2)},
        "twisted_genus2_index": {str(k): cf.twisted_genus2_index_part(k, order) for k in range(2, kmax + 1, 2)},
        "twisted_genus2_higher": {str(k): cf.twisted_genus2_higher_part(k, order) for k in range(2, kmax + 1, 2)},
    }
    d04 = {}
    for k in range(1, min(kmax, D04_KMAX) + 1):
        for labels in itertools.product(range(k + 1), repeat=4):
            if sum(labels) % 2 == 0:
                d04[f"{k}:" + ",".join(map(str, labels))] = cf.d04_closed(k, labels, order)
    out["d04"] = d04
    return out


def write_golden(directory, order: int = GOLDEN_ORDER, kmax: int = GOLDEN_KMAX) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in build_golden(order, kmax).items():
        path = directory / f"{name}.json"
        payload = {"order": order, "entries": {k: v.to_json() for k, v in table.items()}}
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        written.append(path)
    return written


def load_golden(directory) -> dict:
    directory = Path(directory)
    out = {}
    for path in sorted(directory.glob("*.json")):
        data = json.loads(path.read_text())
        out[path.stem] = {k: TruncatedSeries.from_json(v) for k, v in data["entries"].items()}
    if not out:
        raise FileNotFoundError(f"no golden files in {directory}")
    # odd-sum four-point entries vanish and are not stored
    return _with_zero_default(out)


class _ZeroDefault(dict):
    def __init__(self, data, order):
        super().__init__(data)
        self._order = order

    def __contains__(self, key):
        return True

    def __missing__(self, key):
        return TruncatedSeries.constant(0, self._order)


def _with_zero_default(out: dict) -> dict:
    if "d04" in out and out["d04"]:
        order = next(iter(out["d04"].values())).order
        out["d04"] = _ZeroDefault(out["d04"], order)
    return out
