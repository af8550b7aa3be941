"""Exact joint distributions of closed circuits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

from ..rational import ZERO, fmt_short
from ..systems import TRIVIAL, compose
from .binder import BoundCircuit, BoundElement
from .errors import EvalError


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities indexed by one outcome label per informative element."""

    variables: Tuple[str, ...]
    probs: Dict[tuple, object]
    circuit: str = ""

    def total(self):
        return sum(self.probs.values(), ZERO)

    def __getitem__(self, outcome):
        if isinstance(outcome, str):
            outcome = (outcome,)
        return self.probs[tuple(outcome)]

    def marginal(self, variables: Sequence[str]) -> "JointDistribution":
        idx = []
        for v in variables:
            if v not in self.variables:
                raise KeyError(f"no variable {v!r}; have {', '.join(self.variables)}")
            idx.append(self.variables.index(v))
        out: Dict[tuple, object] = {}
        for k, p in self.probs.items():
            key = tuple(k[i] for i in idx)
            out[key] = out.get(key, ZERO) + p
        return JointDistribution(tuple(variables), out, self.circuit)

    def format(self, decimals: int = None) -> str:
        def val(p):
            s = fmt_short(p)
            if decimals is not None:
                s += f" (~{float(p):.{decimals}f})"
            return s

        if not self.variables:
            return f"(): {val(self.probs[()])}"
        return ", ".join(f"{' '.join(k)}: {val(p)}" for k, p in self.probs.items())

    def to_json(self) -> dict:
        return {
            "circuit": self.circuit,
            "variables": list(self.variables),
            "probabilities": [{"outcome": list(k), "p": fmt_short(p)} for k, p in self.probs.items()],
        }


def _variable_names(stages):
    names, seen = [], {}
    for st in stages:
        for el in st:
            if el.informative:
                n = seen.get(el.name, 0)
                seen[el.name] = n + 1
                names.append(el.name if n == 0 else f"{el.name}#{n + 1}")
    return names


def run_stages(theory, stages: Sequence[Sequence[BoundElement]], name: str = "") -> JointDistribution:
    """Propagate every outcome branch through the stages (elements act on disjoint wires)."""
    branches = {(): (theory.unit_effect(TRIVIAL),)}
    current = TRIVIAL
    for st in stages:
        inp = compose(*[e.inp for e in st])
        if inp != current:
            raise EvalError(f"stage expects {inp} but the wires carry {current}")
        new = {}
        for key, (psi,) in branches.items():
            partial = {key: psi}
            done = ()
            for pos, el in enumerate(st):
                after = compose(*[e.inp for e in st[pos + 1:]])
                nxt = {}
                for k2, v in partial.items():
                    for lab, E in zip(el.labels, el.events):
                        out = theory.apply_at(E, v, done, after)
                        nxt[k2 + ((lab,) if el.informative else ())] = out
                partial = nxt
                done = compose(done, el.out)
            for k2, v in partial.items():
                new[k2] = (v,)
        branches = new
        current = compose(*[e.out for e in st])
    if current != TRIVIAL:
        raise EvalError("circuit is open: its output is not the trivial system")
    u = theory.unit_effect(TRIVIAL)
    probs = {k: theory.pair(u, v, TRIVIAL) for k, (v,) in branches.items()}
    return JointDistribution(tuple(_variable_names(stages)), probs, name)


def evaluate(circuit: BoundCircuit, theory) -> JointDistribution:
    if not circuit.closed:
        raise EvalError(f"circuit {circuit.name!r} is open; only closed circuits have a joint distribution")
    return run_stages(theory, circuit.stages, circuit.name)
