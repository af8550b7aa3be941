"""Exact rational scalars.

Every decision procedure in the package runs on ``gmpy2.mpq`` values.  The
helpers here convert user input into that type and render it back as the
``"num/den"`` strings used by the JSON documents.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)
HALF = mpq(1, 2)


def q(value, den=None) -> mpq:
    """Coerce ints, Fractions, mpq and ``"a/b"`` strings to an exact rational.

    ``q(a, b)`` builds ``a/b``.  Floats are refused: silently importing
    binary rounding error would defeat the point of exact arithmetic.
    """
    if den is not None:
        return q(value) / q(den)
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        return mpq(text)
    return mpq(value)


def fmt(x) -> str:
    """Render as ``num/den`` (always with a denominator)."""
    x = q(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_short(x) -> str:
    x = q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vec(values: Iterable) -> tuple:
    return tuple(q(v) for v in values)


def mat(rows: Iterable[Iterable]) -> list:
    return [[q(v) for v in row] for row in rows]


def vec_to_json(v: Sequence) -> list:
    return [fmt(x) for x in v]


def mat_to_json(m: Sequence[Sequence]) -> list:
    return [[fmt(x) for x in row] for row in m]


def vec_from_json(data: Sequence[str]) -> tuple:
    return tuple(q(s) for s in data)


def mat_from_json(data) -> list:
    return [[q(s) for s in row] for row in data]


def to_float(x) -> float:
    x = q(x)
    return x.numerator / x.denominator
