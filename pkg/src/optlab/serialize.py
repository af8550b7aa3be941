"""The ``optlab-theory/1`` JSON document.

A document names a built-in constructor (``kind`` and ``params``) and
spells out everything the checkers use: per-system cones, unit effects,
deterministic states, witnesses, reversibles, test catalogs and
transformation cones, with every number written as a ``"num/den"``
string.  Loading rebuilds the model from the constructor and rejects the
file unless the recomputed data agree exactly, so a document can be
audited offline but cannot smuggle in a different theory.
"""

from __future__ import annotations

import hashlib
import json
from typing import Union

from .core import TransfMap, TestSpec
from .psd import PSDCone
from .rational import mat_from_json, mat_to_json, vec_from_json, vec_to_json
from .systems import fmt_system, parse_system
from .theory import PolyCone
from .zoo import BoxWorld, Classical, DetClassical, Fermionic, Quantum, RealQuantum
from .zoo.boxworld import HConeAdapter

SCHEMA = "optlab-theory/1"

_CONSTRUCTORS = {
    "Classical": lambda p: Classical(int(p["n"])),
    "DetClassical": lambda p: DetClassical(int(p["n"])),
    "Quantum": lambda p: Quantum(int(p["d"])),
    "RealQuantum": lambda p: RealQuantum(int(p["d"])),
    "Fermionic": lambda p: Fermionic(int(p["N"])),
    "PRBoxMax": lambda p: BoxWorld("max"),
    "PRBoxMin": lambda p: BoxWorld("min"),
}


class TheoryFormatError(ValueError):
    pass


def cone_to_json(cone) -> dict:
    if isinstance(cone, PolyCone):
        return {
            "kind": "generators",
            "ambient_dim": cone.ambient_dim,
            "generators": [vec_to_json(g) for g in cone.generators],
        }
    if isinstance(cone, PSDCone):
        sp = cone.space
        return {
            "kind": "psd",
            "ambient_dim": cone.ambient_dim,
            "matrix_size": sp.n,
            "field": "real" if sp.real else "complex",
            "sectors": list(sp.sectors),
        }
    if isinstance(cone, HConeAdapter):
        return {
            "kind": "inequalities",
            "ambient_dim": cone.ambient_dim,
            "inequalities": [vec_to_json(h) for h in cone.H.inequalities],
        }
    raise TypeError(f"cannot serialise cone {cone!r}")


def transf_to_json(T: TransfMap) -> dict:
    return {
        "input": fmt_system(T.inp),
        "output": fmt_system(T.out),
        "data": [mat_to_json(m) for m in T.data],
        "label": T.label,
    }


def transf_from_json(doc: dict) -> TransfMap:
    return TransfMap.of(
        parse_system(doc["input"]),
        parse_system(doc["output"]),
        [mat_from_json(m) for m in doc["data"]],
        doc.get("label", ""),
    )


def test_to_json(t: TestSpec) -> dict:
    return {"name": t.name, "labels": list(t.labels), "events": [transf_to_json(e) for e in t.events]}


def test_from_json(doc: dict) -> TestSpec:
    return TestSpec.of([transf_from_json(e) for e in doc["events"]], doc["labels"], doc.get("name", ""))


def _composition(theory) -> dict:
    if isinstance(theory, Fermionic):
        return {
            "rule": "graded-kronecker",
            "representation": "choi",
            "leaf_dim": theory.leaf_d,
            "note": "Jordan-Wigner order; odd maps pick up the parity of earlier modes",
        }
    if isinstance(theory, Quantum):
        return {"rule": "kronecker", "representation": "choi", "leaf_dim": theory.leaf_d}
    rule = "kronecker"
    if isinstance(theory, BoxWorld):
        rule = "kronecker-" + theory.variant
    return {"rule": rule, "representation": "matrix", "leaf_dim": theory.leaf_dim}


def theory_to_json(theory) -> dict:
    systems = []
    for A in theory.registered_systems():
        pure = theory.pure_states(A)
        systems.append(
            {
                "id": fmt_system(A),
                "dim": theory.dim(A),
                "state_cone": cone_to_json(theory.state_cone(A)),
                "effect_cone": cone_to_json(theory.effect_cone(A)),
                "deterministic_effects": [vec_to_json(e) for e in theory.det_effects(A)],
                "deterministic_states": (
                    None if pure is None else [vec_to_json(s) for s in pure]
                ),
                "witnesses": [
                    {"ancilla": fmt_system(E), "state": vec_to_json(s)} for E, s in theory.witnesses(A)
                ],
                "transformation_cone": cone_to_json(theory.transf_cone(A, A)),
                "reversibles": [transf_to_json(U) for U in theory.reversibles(A)],
                "catalog": [test_to_json(t) for t in theory.test_catalog(A)],
            }
        )
    return {
        "schema": SCHEMA,
        "name": theory.name,
        "kind": theory.kind,
        "params": dict(theory.params),
        "flags": {
            "causal": theory.causal,
            "convex": theory.convex,
            "no_restriction": theory.no_restriction,
        },
        "composition": _composition(theory),
        "systems": systems,
    }


def dumps(doc: dict) -> str:
    """Canonical text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def dump_theory(theory) -> str:
    return dumps(theory_to_json(theory))


def content_hash(text: Union[str, bytes]) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


def load_theory(source: Union[str, dict]):
    """Rebuild the model described by a document and verify its data."""
    doc = json.loads(source) if isinstance(source, str) else source
    if doc.get("schema") != SCHEMA:
        raise TheoryFormatError(f"expected schema {SCHEMA!r}, found {doc.get('schema')!r}")
    kind = doc.get("kind")
    if kind not in _CONSTRUCTORS:
        raise TheoryFormatError(f"unknown theory kind {kind!r}")
    try:
        theory = _CONSTRUCTORS[kind](doc.get("params", {}))
    except (KeyError, ValueError) as exc:
        raise TheoryFormatError(f"bad parameters for {kind}: {exc}") from exc
    expected = theory_to_json(theory)
    for key in ("name", "flags", "composition", "systems", "params"):
        if doc.get(key) != expected[key]:
            raise TheoryFormatError(f"field {key!r} does not match the {kind} constructor")
    return theory


def read_theory_file(path) -> tuple:
    """(theory, raw text) for a JSON theory file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return load_theory(text), text
    except json.JSONDecodeError as exc:
        raise TheoryFormatError(f"{path}: not valid JSON ({exc})") from exc


__all__ = [
    "SCHEMA",
    "TheoryFormatError",
    "content_hash",
    "dump_theory",
    "dumps",
    "load_theory",
    "read_theory_file",
    "test_from_json",
    "test_to_json",
    "theory_to_json",
    "transf_from_json",
    "transf_to_json",
    "vec_from_json",
]
