"""Verdicts returned by the checkers and their JSON rendering."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from gmpy2 import mpq

from .core import TransfMap, TestSpec
from .rational import fmt
from .systems import fmt_system


class InconsistencyError(AssertionError):
    """Two routes that must agree by theorem disagree: a model bug."""


def conjunction(results):
    """Three-valued AND: False beats undecided (None), which beats True."""
    results = list(results)
    if any(r is False for r in results):
        return False
    if any(r is None for r in results):
        return None
    return True


def disjunction(results):
    """Three-valued OR: True beats undecided (None), which beats False."""
    results = list(results)
    if any(r is True for r in results):
        return True
    if any(r is None for r in results):
        return None
    return False


@dataclass(frozen=True)
class Verdict:
    prop: str
    theory: str
    systems: Tuple[str, ...]
    result: Any
    certificate: Dict[str, Any] = field(default_factory=dict)
    crosschecks: Dict[str, Any] = field(default_factory=dict)
    decided_by: str = "cone"

    def __bool__(self):
        return bool(self.result)

    def to_json(self) -> dict:
        return {
            "property": self.prop,
            "theory": self.theory,
            "systems": list(self.systems),
            "result": jsonable(self.result),
            "decided_by": self.decided_by,
            "certificate": jsonable(self.certificate),
            "crosschecks": jsonable(self.crosschecks),
        }


def jsonable(obj):
    """Exact, deterministic JSON form: rationals become "num/den"."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, mpq):
        return fmt(obj)
    if isinstance(obj, TransfMap):
        return {
            "input": fmt_system(obj.inp),
            "output": fmt_system(obj.out),
            "label": obj.label,
            "data": [[[fmt(x) for x in row] for row in m] for m in obj.data],
        }
    if isinstance(obj, TestSpec):
        return {"name": obj.name, "labels": list(obj.labels), "events": [jsonable(e) for e in obj.events]}
    if isinstance(obj, Verdict):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    raise TypeError(f"cannot render {type(obj).__name__} in a report")
