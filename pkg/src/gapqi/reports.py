"""Report containers shared by the validation and verification checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ValidationReport", "QiReport", "to_jsonable", "dumps"]


def to_jsonable(obj):
    """Convert report payloads to JSON-ready values.

    Floats become shortest round-trip decimal strings (``repr``); sets and
    frozensets become sorted lists.
    """
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if v == float("inf"):
            return "inf"
        if v == float("-inf"):
            return "-inf"
        return repr(v)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


@dataclass
class ValidationReport:
    """Named boolean checks, each failing one carrying a witness."""

    check: str
    checks: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def record(self, name, ok, witness=None):
        ok = bool(ok)
        self.checks[name] = self.checks.get(name, True) and ok
        if not ok and name not in self.witnesses:
            self.witnesses[name] = witness
        return ok

    @property
    def ok(self):
        return all(self.checks.values())

    def to_dict(self):
        return {"check": self.check, "verdict": self.ok, "checks": self.checks,
                "witnesses": self.witnesses, "notes": self.notes}


@dataclass
class QiReport:
    """Outcome of a quasi-invariance style verification.

    ``verdicts`` maps condition names to booleans.  Every false verdict has at
    least one entry in ``witnesses`` whose ``condition`` field names it.
    """

    check: str
    level: object = None
    verdicts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    tolerance: float = 0.0
    truncation_depth: object = None
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def record(self, name, ok, witness=None):
        ok = bool(ok)
        prev = self.verdicts.get(name, True)
        self.verdicts[name] = prev and ok
        if not ok and prev:
            w = {"condition": name}
            if witness:
                w.update(witness)
            self.witnesses.append(w)
        return ok

    @property
    def verdict(self):
        return all(self.verdicts.values())

    def failed(self):
        return [k for k, v in self.verdicts.items() if not v]

    def to_dict(self):
        return {"check": self.check, "level": self.level, "verdict": self.verdict,
                "verdicts": self.verdicts, "witnesses": self.witnesses,
                "tolerance": self.tolerance,
                "truncation_depth": self.truncation_depth,
                "notes": self.notes, "details": self.details}
