"""Constructors for the built-in theories and a name registry."""

from __future__ import annotations

from .boxworld import BoxWorld
from .classical import Classical, DetClassical
from .fermionic import Fermionic, parity_projector
from .quantum import Quantum, RealQuantum


def make_classical(n: int = 2) -> Classical:
    return Classical(n)


def make_det_classical(n: int = 2) -> DetClassical:
    return DetClassical(n)


def make_quantum(d: int = 2) -> Quantum:
    return Quantum(d)


def make_real_quantum(d: int = 2) -> RealQuantum:
    return RealQuantum(d)


def make_fermionic(N: int = 2) -> Fermionic:
    return Fermionic(N)


def make_prbox(variant: str = "max") -> BoxWorld:
    return BoxWorld(variant.lower())


def parity_projectors(N: int):
    return make_fermionic(max(N, 1)).parity_projectors(N)


BUILTINS = {
    "classical2": lambda: Classical(2),
    "classical3": lambda: Classical(3),
    "detclassical2": lambda: DetClassical(2),
    "detclassical3": lambda: DetClassical(3),
    "quantum2": lambda: Quantum(2),
    "quantum3": lambda: Quantum(3),
    "realquantum2": lambda: RealQuantum(2),
    "realquantum3": lambda: RealQuantum(3),
    "fermionic1": lambda: Fermionic(1),
    "fermionic2": lambda: Fermionic(2),
    "fermionic3": lambda: Fermionic(3),
    "prbox-max": lambda: BoxWorld("max"),
    "prbox-min": lambda: BoxWorld("min"),
}

_instances = {}


def get_theory(name: str):
    """Shared instance of a built-in theory (models are immutable)."""
    key = name.lower()
    if key not in BUILTINS:
        raise KeyError(f"unknown theory {name!r}; choose from {', '.join(sorted(BUILTINS))}")
    if key not in _instances:
        _instances[key] = BUILTINS[key]()
    return _instances[key]


__all__ = [
    "BUILTINS",
    "BoxWorld",
    "Classical",
    "DetClassical",
    "Fermionic",
    "Quantum",
    "RealQuantum",
    "get_theory",
    "make_classical",
    "make_det_classical",
    "make_fermionic",
    "make_prbox",
    "make_quantum",
    "make_real_quantum",
    "parity_projector",
    "parity_projectors",
]
