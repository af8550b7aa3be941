"""The ``.opt`` circuit language: tokenize, parse, bind, evaluate, print."""

from .ast import Program
from .binder import BoundCircuit, BoundElement, BoundProgram, bind, shortcut_names
from .errors import BindError, DslError, EvalError, LexError, ParseError, SourceSpan
from .evaluate import JointDistribution, evaluate, run_stages
from .lexer import Token, tokenize
from .parser import parse
from .printer import print_program


def load(source: str, theory=None) -> BoundProgram:
    return bind(parse(source), theory)


def load_file(path, theory=None) -> BoundProgram:
    with open(path, encoding="utf-8") as fh:
        return load(fh.read(), theory)


__all__ = [
    "BindError",
    "BoundCircuit",
    "BoundElement",
    "BoundProgram",
    "DslError",
    "EvalError",
    "JointDistribution",
    "LexError",
    "ParseError",
    "Program",
    "SourceSpan",
    "Token",
    "bind",
    "evaluate",
    "load",
    "load_file",
    "parse",
    "print_program",
    "run_stages",
    "shortcut_names",
    "tokenize",
]
