"""Command-line front end: ``optlab check|classify|run|export-theory``.

Exit codes: 0 when the command completed, 2 when ``--expect`` does not match
the computed summary, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .cache import CacheError, ReportCache, cache_key
from .dsl import DslError, evaluate, load
from .report import (
    CLASSIFICATION,
    PROPERTIES,
    ReportError,
    Scenario,
    check_report,
    classification_document,
    classification_markdown,
    classification_row,
    render_json,
    render_markdown,
    theory_identity,
    verify_report,
)
from .serialize import TheoryFormatError, content_hash, dump_theory, dumps, read_theory_file
from .verdict import InconsistencyError
from .zoo import BUILTINS, get_theory

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 so that 2 keeps meaning "expectation mismatch"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def resolve_theory(arg: str):
    """(theory, identity) for a built-in name or a theory JSON file."""
    if arg.lower() in BUILTINS:
        th = get_theory(arg)
        return th, theory_identity(th, "builtin")
    if os.path.exists(arg):
        th, text = read_theory_file(arg)
        return th, theory_identity(th, os.path.basename(arg), text)
    raise UsageError(f"unknown theory {arg!r}: not a built-in ({', '.join(sorted(BUILTINS))}) and no such file")


def resolve_circuit_path(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    bundled = resources.files("optlab") / "data" / "circuits" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise UsageError(f"no such circuit file: {arg}")


def _diagnostic(path, source: str, err: DslError) -> str:
    msg = f"{path}:{err}"
    span = err.span
    if span is None:
        return msg
    lines = source.splitlines()
    if 1 <= span.line <= len(lines):
        text = lines[span.line - 1]
        width = max(1, (span.end_column - span.column) if span.end_line == span.line else 1)
        msg += f"\n  {text}\n  {' ' * (span.column - 1)}{'^' * width}"
    return msg


def _load_program(path, theory=None):
    source = Path(path).read_text(encoding="utf-8")
    try:
        return load(source, theory), source
    except DslError as err:
        raise UsageError(_diagnostic(path, source, err)) from err


def _scenario(args, theory):
    if args.scenario is None:
        if args.restriction:
            raise UsageError("--restriction needs --scenario FILE")
        return None, None
    path = resolve_circuit_path(args.scenario)
    prog, source = _load_program(path, theory)
    if not prog.restrictions:
        raise UsageError(f"{path}: declares no restriction")
    name = args.restriction or sorted(prog.restrictions)[0]
    if name not in prog.restrictions:
        raise UsageError(f"{path}: no restriction named {name!r}")
    pair = prog.restrictions[name]
    tests = tuple(el.as_test() for el in prog.elements.values()
                  if el.kind == "test" and tuple(el.inp) == pair.A and tuple(el.out) == pair.A)
    return Scenario(name, pair, tests), content_hash(source)


def _summary_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return "undecided" if value is None else str(value)


def cmd_check(args) -> int:
    theory, identity = resolve_theory(args.theory)
    if args.property == "niwd-upon":
        scenario, scenario_hash = _scenario(args, theory)
    else:
        if args.scenario or args.restriction:
            raise UsageError("--scenario/--restriction apply only to --property niwd-upon")
        scenario, scenario_hash = None, None
    options = {"system": args.system, "probe_depth": args.probe_depth,
               "scenario": scenario_hash, "restriction": scenario.name if scenario else None,
               "version": __version__}
    use_cache = not args.no_cache and not args.timing
    cache = ReportCache() if use_cache else None
    key = cache_key(identity["hash"], args.property, options)
    text = cache.load(key, identity["hash"]) if cache else None
    if text is None:
        doc = check_report(theory, args.property, identity, args.system, args.probe_depth, scenario, args.timing)
        text = render_json(doc)
        if cache:
            cache.store(key, text)
    else:
        doc = json.loads(text)
    if args.json:
        sys.stdout.write(text)
    else:
        sys.stdout.write(render_markdown(doc))
    status = EXIT_OK
    if args.verify:
        res = verify_report(theory, doc, scenario)
        print(f"verify: reproduced={_summary_text(res['reproduced'])} typed replays={res['typed_replays']} "
              f"failed={len(res['failed'])}", file=sys.stderr)
        for f in res["failed"]:
            print(f"verify: certificate failed: {f}", file=sys.stderr)
        if not res["ok"]:
            status = EXIT_ERROR
    if args.expect is not None and status == EXIT_OK:
        got = _summary_text(doc["summary"])
        if got != args.expect.lower():
            print(f"expectation mismatch: expected {args.expect}, got {got}", file=sys.stderr)
            status = EXIT_MISMATCH
    return status


def cmd_classify(args) -> int:
    names = args.theories or [name for _, name in CLASSIFICATION]
    if args.all and args.theories:
        raise UsageError("give either --all or a list of theories")
    labels = {name: label for label, name in CLASSIFICATION}
    rows, verdicts = [], {}
    for name in names:
        theory, _ = resolve_theory(name)
        row, vs = classification_row(labels.get(theory.name, theory.name), theory)
        rows.append(row)
        verdicts[theory.name] = vs
    doc = classification_document(rows, verdicts)
    if args.json_out:
        Path(args.json_out).write_text(dumps(doc), encoding="utf-8")
    if args.json:
        sys.stdout.write(dumps(doc))
    else:
        sys.stdout.write(classification_markdown(rows))
    return EXIT_OK


def cmd_run(args) -> int:
    path = resolve_circuit_path(args.file)
    theory = resolve_theory(args.theory)[0] if args.theory else None
    prog, source = _load_program(path, theory)
    if not prog.circuits:
        raise UsageError(f"{path}: declares no circuit")
    names = [args.circuit] if args.circuit else list(prog.circuits)
    out = {}
    for name in names:
        if name not in prog.circuits:
            raise UsageError(f"{path}: no circuit named {name!r}")
        try:
            dist = evaluate(prog.circuits[name], prog.theory)
        except DslError as err:
            raise UsageError(_diagnostic(path, source, err)) from err
        if args.marginalize:
            keep = [v.strip() for v in args.marginalize.split(",") if v.strip()]
            unknown = [v for v in keep if v not in dist.variables]
            if unknown:
                raise UsageError(f"circuit {name!r} has no outcome variable {', '.join(unknown)}")
            dist = dist.marginal(keep)
        out[name] = dist
    if args.json:
        sys.stdout.write(dumps({name: d.to_json() for name, d in out.items()}))
    elif len(out) == 1:
        print(next(iter(out.values())).format(args.decimals))
    else:
        for name, d in out.items():
            print(f"{name}: {d.format(args.decimals)}")
    return EXIT_OK


def cmd_export_theory(args) -> int:
    theory, _ = resolve_theory(args.theory)
    text = dump_theory(theory)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="optlab", description="Exact checks of operational probabilistic theories.")
    p.add_argument("--version", action="version", version=f"optlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="run one property checker and emit a report")
    c.add_argument("theory", help="built-in theory name or theory JSON file")
    c.add_argument("--property", "-p", required=True, choices=PROPERTIES)
    c.add_argument("--system", help="system such as C or C*C (default depends on the property)")
    fmt = c.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="print the JSON report")
    fmt.add_argument("--markdown", action="store_true", help="print a markdown summary (default)")
    c.add_argument("--no-cache", action="store_true", help="always rerun the checkers")
    c.add_argument("--expect", help="expected summary (true/false or a number); mismatch exits 2")
    c.add_argument("--probe-depth", type=int, default=1, metavar="N")
    c.add_argument("--verify", action="store_true", help="rerun the checks and replay certificates")
    c.add_argument("--timing", action="store_true", help="record wall time (bypasses the cache)")
    c.add_argument("--scenario", help="circuit file declaring a restriction (niwd-upon)")
    c.add_argument("--restriction", help="restriction name inside the scenario file")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("classify", help="membership table over several theories")
    k.add_argument("theories", nargs="*")
    k.add_argument("--all", action="store_true", help="the seven reference theories (default)")
    fmt = k.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--markdown", action="store_true")
    k.add_argument("--json-out", metavar="FILE", help="also write the JSON table to FILE")
    k.set_defaults(func=cmd_classify)

    r = sub.add_parser("run", help="evaluate the circuits of a .opt file")
    r.add_argument("file")
    r.add_argument("--theory", help="override the file's theory line")
    r.add_argument("--circuit", help="evaluate only this circuit")
    r.add_argument("--marginalize", metavar="VARS", help="comma-separated outcome variables to keep")
    r.add_argument("--decimals", type=int, help="print decimals instead of exact fractions")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("export-theory", help="write a built-in theory as optlab-theory/1 JSON")
    e.add_argument("theory")
    e.add_argument("--output", "-o")
    e.set_defaults(func=cmd_export_theory)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InconsistencyError as exc:
        print(f"optlab: internal inconsistency: {exc}", file=sys.stderr)
    except (UsageError, ReportError, TheoryFormatError, CacheError) as exc:
        print(f"optlab: error: {exc}", file=sys.stderr)
    except (OSError, KeyError, ValueError) as exc:
        print(f"optlab: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
