"""System identifiers.

A system is a tuple of elementary labels; parallel composition is tuple
concatenation and the trivial system is the empty tuple, so ``A*I == A``
and associativity hold by construction.
"""

from __future__ import annotations

from typing import Tuple

SystemId = Tuple[str, ...]
TRIVIAL: SystemId = ()


def compose(*systems) -> SystemId:
    out: tuple = ()
    for s in systems:
        out = out + tuple(s)
    return out


def power(leaf: str, k: int) -> SystemId:
    return (leaf,) * k


def fmt_system(s: SystemId) -> str:
    return "I" if not s else "*".join(s)


def parse_system(text: str) -> SystemId:
    text = text.strip()
    if text in ("", "I"):
        return TRIVIAL
    parts = [p.strip() for p in text.split("*")]
    if any(not p for p in parts):
        raise ValueError(f"malformed system expression {text!r}")
    return tuple(p for p in parts if p != "I")
