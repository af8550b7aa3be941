"""Report documents, the classification table, and certificate replay."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from . import __version__
from . import checkers as ck
from . import linalg as la
from .cones import MAX_DIM
from .guided import MIN_GENERATORS
from .lp import DEGENERATE_LIMIT
from .restricted import DEFAULT_CATALOG_BOUND, RestrictionPair, niwd_upon
from .serialize import content_hash, dump_theory, dumps, transf_from_json
from .systems import compose, fmt_system, parse_system
from .verdict import Verdict, conjunction, jsonable

SCHEMA = "optlab-report/1"

PROPERTIES = (
    "niwd",
    "structure",
    "local-disc",
    "purification",
    "classicality",
    "fiwd",
    "reversible",
    "niwd-upon",
)

# row labels of the classification table, in display order
CLASSIFICATION = (
    ("QT", "quantum2"),
    ("CT", "classical2"),
    ("DCT", "detclassical2"),
    ("RQT", "realquantum2"),
    ("FQT", "fermionic2"),
    ("PR", "prbox-max"),
    ("PR-Min", "prbox-min"),
)


class ReportError(ValueError):
    pass


def theory_identity(theory, source: str = "builtin", text: Optional[str] = None) -> dict:
    """Name, kind, parameters and the content hash of the canonical theory document."""
    body = text if text is not None else dump_theory(theory)
    return {
        "name": theory.name,
        "kind": theory.kind,
        "params": jsonable(theory.params),
        "source": source,
        "hash": content_hash(body),
    }


def environment(probe_depth: int = 1) -> dict:
    return {
        "version": __version__,
        "caps": {
            "probe_depth": probe_depth,
            "samples": ck.DEFAULT_SAMPLES,
            "catalog_bound": DEFAULT_CATALOG_BOUND,
            "dd_max_dim": MAX_DIM,
            "guided_min_generators": MIN_GENERATORS,
            "degenerate_pivot_limit": DEGENERATE_LIMIT,
        },
    }


# --------------------------------------------------------------------------
# running one property


@dataclass
class Scenario:
    """A restriction loaded from a circuit file, with the tests it declares."""

    name: str
    pair: RestrictionPair
    tests: tuple

    def describe(self) -> dict:
        return {"restriction": self.name, "tests": [t.name for t in self.tests]}


def _systems(theory, system: Optional[str]):
    if system is None:
        return list(theory.registered_systems())
    return [parse_system(system)]


def _one_system(theory, system: Optional[str]):
    return parse_system(system) if system else theory.system(1)


def run_property(theory, prop: str, system: Optional[str] = None, probe_depth: int = 1,
                 scenario: Optional[Scenario] = None) -> Tuple[List[Verdict], Any]:
    """Verdicts for one property and the summary value compared by ``--expect``."""
    if prop not in PROPERTIES:
        raise ReportError(f"unknown property {prop!r}; choose from {', '.join(PROPERTIES)}")
    if prop == "niwd":
        if system is None:
            v = ck.niwd_verdict(theory, probe_depth)
        else:
            v = ck.tri_consistency(theory, parse_system(system), probe_depth)
        return [v], bool(v.result)
    if prop == "structure":
        A = _one_system(theory, system)
        ref = ck.atomic_refinement_of_identity(theory, A)
        blocks = ck.block_decomposition(theory, A)
        return [ref, blocks], len(ref.result)
    if prop == "local-disc":
        AB = parse_system(system) if system else compose(theory.system(1), theory.system(1))
        if len(AB) < 2:
            raise ReportError("local discriminability needs a composite system such as C*C")
        v = ck.check_local_discriminability(theory, AB[:1], AB[1:])
        return [v], v.result
    if prop == "purification":
        vs = [ck.check_purification(theory, A) for A in _systems(theory, system)]
        return vs, conjunction(v.result for v in vs)
    if prop == "classicality":
        vs = [ck.check_classical_system(theory, A) for A in _systems(theory, system)]
        return vs, all(bool(v.result) for v in vs)
    if prop == "fiwd":
        v = ck.fiwd_check(theory)
        return [v], bool(v.result)
    if prop == "reversible":
        vs = [ck.check_reversible_conditions(theory, A) for A in _systems(theory, system)]
        return vs, all(bool(v.result) for v in vs)
    # niwd-upon
    if scenario is not None:
        pair = scenario.pair
        v = niwd_upon(theory, pair.A, pair, extra_tests=scenario.tests)
        return [v], bool(v.result)
    vs = []
    for A in _systems(theory, system):
        vs.append(niwd_upon(theory, A, RestrictionPair.full(theory, A)))
    return vs, all(bool(v.result) for v in vs)


def build_report(theory, prop: str, verdicts: List[Verdict], summary, identity: dict,
                 system: Optional[str] = None, probe_depth: int = 1,
                 scenario: Optional[Scenario] = None, seconds: Optional[float] = None) -> dict:
    return {
        "schema": SCHEMA,
        "theory": identity,
        "command": {
            "property": prop,
            "system": system,
            "probe_depth": probe_depth,
            "scenario": None if scenario is None else scenario.describe(),
        },
        "summary": jsonable(summary),
        "verdicts": [v.to_json() for v in verdicts],
        "environment": environment(probe_depth),
        "timing": None if seconds is None else {"seconds": round(seconds, 3)},
    }


def check_report(theory, prop: str, identity: Optional[dict] = None, system: Optional[str] = None,
                 probe_depth: int = 1, scenario: Optional[Scenario] = None, timing: bool = False) -> dict:
    identity = identity or theory_identity(theory)
    t0 = time.perf_counter()
    verdicts, summary = run_property(theory, prop, system, probe_depth, scenario)
    seconds = time.perf_counter() - t0 if timing else None
    return build_report(theory, prop, verdicts, summary, identity, system, probe_depth, scenario, seconds)


def render_json(doc: dict) -> str:
    return dumps(doc)


def _cell(x) -> str:
    if x is True:
        return "✓"
    if x is False:
        return "✗"
    if x is None:
        return "-"
    return str(x)


def render_markdown(doc: dict) -> str:
    th = doc["theory"]
    lines = [
        f"# {th['name']}: {doc['command']['property']}",
        "",
        f"summary: **{_cell(doc['summary'])}**",
        "",
        "| property | systems | result | decided by |",
        "|---|---|---|---|",
    ]
    for v in doc["verdicts"]:
        res = v["result"]
        shown = _cell(res) if not isinstance(res, list) else f"{len(res)} element(s)"
        lines.append(f"| {v['property']} | {', '.join(v['systems'])} | {shown} | {v['decided_by']} |")
    notes = witness_notes(doc)
    if notes:
        lines += ["", *notes]
    lines += ["", f"theory hash `{th['hash'][:16]}`, optlab {doc['environment']['version']}"]
    return "\n".join(lines) + "\n"


def _short(x: str) -> str:
    return x[:-2] if x.endswith("/1") else x


def witness_notes(doc: dict) -> List[str]:
    """Human-readable lines for the most telling certificates."""
    out = []
    for v in doc["verdicts"]:
        cert = v["certificate"]
        if v["property"] == "purification":
            st = cert.get("states", {})
            sc = st.get("certificate", {})
            if st.get("result") is False and "state" in sc:
                out.append(
                    f"- no purification on {', '.join(v['systems'])}: {sc.get('role', 'state')} state "
                    f"({', '.join(_short(x) for x in sc['state'])}) has no pure dilation over {', '.join(sc['dilation_systems'])}"
                )
            elif st.get("result") is None and "state" in sc:
                out.append(
                    f"- purification on {', '.join(v['systems'])} undecided: pure states of "
                    f"{', '.join(sc['not_enumerable'])} are not enumerated"
                )
        if v["property"] == "structure":
            out.append(
                f"- identity on {', '.join(v['systems'])} splits into {cert['blocks']} atomic event(s); "
                f"sum is identity: {cert['sum_is_identity']}, idempotent: {cert['idempotent']}, "
                f"unique: {cert['unique']}"
            )
        if v["property"] == "niwd-upon":
            for t in cert.get("nondisturbing_tests", []):
                kind = "no-information" if t["no_information"] else "informative"
                out.append(f"- test {t['test']} is non-disturbing upon the pair and {kind}")
        if v["property"] == "blocks":
            out.append(f"- block dimensions {cert['dims']} sum to {cert['sum_dims']} of {cert['total_dim']}")
        if v["property"] == "niwd":
            for name, sub in cert.get("systems", {}).items():
                ref = sub["certificate"].get("refinement")
                if ref is not None:
                    out.append(f"- identity on {name} has a non-proportional refinement (face dimension "
                               f"{sub['certificate']['face_dim']})")
    return out


# --------------------------------------------------------------------------
# classification table


@dataclass(frozen=True)
class ClassificationRow:
    label: str
    theory: str
    niwd: bool
    local_discriminability: Any
    states_purification: bool
    effects_purification: bool
    purification: bool
    all_systems_classical: bool

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "theory": self.theory,
            "niwd": self.niwd,
            "local_discriminability": self.local_discriminability,
            "states_purification": self.states_purification,
            "effects_purification": self.effects_purification,
            "purification": self.purification,
            "all_systems_classical": self.all_systems_classical,
        }


def classification_row(label: str, theory) -> Tuple[ClassificationRow, dict]:
    info = ck.classify(theory)
    row = ClassificationRow(
        label, theory.name, info["niwd"], info["local_discriminability"],
        info["states_purification"], info["effects_purification"],
        info["purification"], info["all_systems_classical"],
    )
    return row, info["verdicts"]


def classification_document(rows: List[ClassificationRow], verdicts: Dict[str, dict]) -> dict:
    return {
        "schema": SCHEMA,
        "command": {"property": "classification"},
        "rows": [r.to_json() for r in rows],
        "verdicts": {name: jsonable(v) for name, v in verdicts.items()},
        "environment": environment(),
        "timing": None,
    }


def classification_markdown(rows: List[ClassificationRow]) -> str:
    head = "| theory | NIWD | local disc. degree | states pur. | effects pur. | pur. | all classical |"
    lines = [head, "|---|---|---|---|---|---|---|"]
    for r in rows:
        lines.append(
            f"| {r.label} ({r.theory}) | {_cell(r.niwd)} | {_cell(r.local_discriminability)} | "
            f"{_cell(r.states_purification)} | {_cell(r.effects_purification)} | "
            f"{_cell(r.purification)} | {_cell(r.all_systems_classical)} |"
        )
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# replay


def _walk_verdicts(node):
    if isinstance(node, dict):
        if "property" in node and "certificate" in node and "result" in node:
            yield node
        for v in node.values():
            yield from _walk_verdicts(v)
    elif isinstance(node, list):
        for v in node:
            yield from _walk_verdicts(v)


def _vec(xs):
    return tuple(la.q(x) for x in xs)


def _replay_structure(theory, v) -> bool:
    A = parse_system(v["systems"][0])
    events = [transf_from_json(e) for e in v["result"]]
    I = theory.identity(A)
    total = events[0]
    for E in events[1:]:
        total = total + E
    if total.data != I.data or len(events) != v["certificate"]["blocks"]:
        return False
    for i, Ei in enumerate(events):
        if not theory.is_atomic(Ei):
            return False
        for j, Ej in enumerate(events):
            prod = theory.seq(Ei, Ej)
            if (i == j and prod.data != Ei.data) or (i != j and not prod.is_zero()):
                return False
    return True


def _replay_refinement(theory, v) -> bool:
    """A claimed non-proportional refinement of the identity."""
    A = parse_system(v["systems"][0])
    D = transf_from_json(v["certificate"]["refinement"])
    I = theory.identity(A)
    return theory.refines(D, I) and la.proportional_factor(theory.transf_coords(D), theory.transf_coords(I)) is None


def _replay_classical(theory, v) -> bool:
    A = parse_system(v["systems"][0])
    effects = [_vec(e) for e in v["certificate"]["effects"]]
    pure = theory.pure_states(A)
    if pure is None or len(pure) != len(effects):
        return False
    u = tuple(theory.unit_effect(A))
    total = effects[0]
    for e in effects[1:]:
        total = la.vadd(total, e)
    if tuple(total) != u or not all(theory.effect_cone(A).contains(e) for e in effects):
        return False
    return all(theory.pair(e, p, A) == (1 if i == j else 0)
               for i, e in enumerate(effects) for j, p in enumerate(pure))


def _replay_no_purification(theory, v) -> bool:
    A = parse_system(v["systems"][0])
    cert = v["certificate"]
    rho = _vec(cert["state"])
    if not theory.state_cone(A).contains(rho):
        return False
    for name in cert["dilation_systems"]:
        B = parse_system(name)
        AB = compose(A, B)
        pure = theory.pure_states(AB)
        if pure is None:
            return False
        for psi in pure:
            marg = theory.discard(psi, A, B, theory.unit_effect(B))
            if la.proportional_factor(marg, rho) is not None:
                return False
    return True


def replay_certificate(theory, v: dict) -> Optional[bool]:
    """Independent validation of one certificate; None when there is no typed replay."""
    prop, res, cert = v["property"], v["result"], v["certificate"]
    if prop == "structure" and isinstance(res, list):
        return _replay_structure(theory, v)
    if prop == "niwd-system" and res is False and "refinement" in cert:
        return _replay_refinement(theory, v)
    if prop == "classical" and res is True and "effects" in cert:
        return _replay_classical(theory, v)
    if prop == "states-purification" and res is False and "state" in cert:
        return _replay_no_purification(theory, v)
    return None


def verify_report(theory, doc: dict, scenario: Optional[Scenario] = None) -> dict:
    """Re-run the referenced checks and replay every typed certificate."""
    cmd = doc["command"]
    fresh = check_report(theory, cmd["property"], doc["theory"], cmd["system"], cmd["probe_depth"], scenario)
    same = json.dumps(fresh["verdicts"], sort_keys=True) == json.dumps(doc["verdicts"], sort_keys=True)
    typed, failed = 0, []
    for v in _walk_verdicts(doc["verdicts"]):
        r = replay_certificate(theory, v)
        if r is None:
            continue
        typed += 1
        if not r:
            failed.append(f"{v['property']} on {', '.join(v['systems'])}")
    return {"reproduced": same, "typed_replays": typed, "failed": failed, "ok": same and not failed}
