"""Machine-readable verdicts of checks."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Mapping

from .series import LaurentPoly


@dataclass
class Report:
    check: str
    params: dict
    order: int
    status: str
    first_mismatch: dict | None
    elapsed_ms: int

    def __post_init__(self):
        if self.status not in ("pass", "fail"):
            raise ValueError("status must be 'pass' or 'fail'")
        if (self.status == "fail") != (self.first_mismatch is not None):
            raise ValueError("a report fails exactly when it carries a mismatch")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "order": self.order,
            "status": self.status,
            "first_mismatch": self.first_mismatch,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> Report:
        return cls(d["check"], dict(d["params"]), d["order"], d["status"],
                   d["first_mismatch"], d["elapsed_ms"])

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        line = f"{self.status.upper():4}  {self.check}  [{params}]  order={self.order}  {self.elapsed_ms}ms"
        if self.first_mismatch:
            fm = self.first_mismatch
            line += f"\n      first mismatch at {fm['monomial']}: {fm['lhs']} vs {fm['rhs']}"
        return line


def first_mismatch(a: LaurentPoly, b: LaurentPoly) -> dict | None:
    """Lowest-degree monomial where ``a`` and ``b`` differ, or None."""
    if a.ctx != b.ctx:
        raise ValueError("cannot compare series from different contexts")
    if a.terms == b.terms:
        return None
    diff = (a - b)
    e, _ = diff.sorted_items()[0]
    names = a.ctx.vars.names
    return {
        "monomial": {v: x for v, x in zip(names, e) if x},
        "lhs": str(a.terms.get(e, 0)),
        "rhs": str(b.terms.get(e, 0)),
    }


def compare_sides(check: str, params: dict, order: int, sides: Mapping[str, LaurentPoly],
                  t0: float) -> Report:
    """Every side against the first; the first disagreement wins."""
    names = list(sides)
    if len(names) < 2:
        raise ValueError("need at least two sides to compare")
    params = dict(params)
    params["sides"] = names
    ref = sides[names[0]]
    mismatch = None
    for name in names[1:]:
        mismatch = first_mismatch(ref, sides[name])
        if mismatch:
            params["mismatch_sides"] = [names[0], name]
            break
    return Report(check, params, order, "fail" if mismatch else "pass", mismatch,
                  int((time.perf_counter() - t0) * 1000))


def compare_stages(check: str, params: dict, order: int, stages, t0: float) -> Report:
    """Like :func:`compare_sides` over several named groups of sides.

    Each stage is ``(name, sides)``; sides are compared within a stage only.
    The first failing stage is recorded as ``params['failed_stage']``.
    """
    params = dict(params)
    params["stages"] = {name: list(sides) for name, sides in stages}
    mismatch = None
    for name, sides in stages:
        names = list(sides)
        if len(names) < 2:
            raise ValueError(f"stage {name!r} needs at least two sides")
        ref = sides[names[0]]
        for other in names[1:]:
            mismatch = first_mismatch(ref, sides[other])
            if mismatch:
                params["failed_stage"] = name
                params["mismatch_sides"] = [names[0], other]
                break
        if mismatch:
            break
    return Report(check, params, order, "fail" if mismatch else "pass", mismatch,
                  int((time.perf_counter() - t0) * 1000))
