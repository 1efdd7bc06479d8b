"""Command line interface.

Commands: check, emit, explain, features, enumerate. Exit code 0 on success,
1 when error diagnostics were reported, 2 on usage or I/O problems.
Diagnostics go to standard error as <file>:<line>:<col>: <severity>[<code>]:
<message> (or as a JSON array with --format json); summaries and results go
to standard output. ANSI color is used only on a terminal and never when
the NO_COLOR environment variable is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .emitter import emit
from .errors import (
    LocalFeaturesError,
    ModelTooLarge,
    ParseError,
    UnknownElement,
)
from .features import enumerate_configurations
from .parser import parse
from .resolver import Diagnostic, ResolvedProduct, explain, resolve
from .spldef import parse_spl_definition

USAGE_ERROR = 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfc",
        description="Check, explain, and derive products of a product line "
                    "with element-local feature bindings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--spl", required=True, metavar="DEFINITION",
                       help="product line definition file")
        p.add_argument("--format", choices=("text", "json"), default="text",
                       help="diagnostic output format (default: text)")

    p_check = sub.add_parser("check", help="resolve and report diagnostics")
    p_check.add_argument("spec", help="product specification file")
    common(p_check)
    p_check.set_defaults(handler=cmd_check)

    p_emit = sub.add_parser("emit", help="write the derivation configuration")
    p_emit.add_argument("spec", help="product specification file")
    common(p_emit)
    p_emit.add_argument("--out", metavar="PATH",
                        help="output path (default: <product>.derivation.json)")
    p_emit.set_defaults(handler=cmd_emit)

    p_explain = sub.add_parser(
        "explain", help="show where an element's effective features come from")
    p_explain.add_argument("spec", help="product specification file")
    p_explain.add_argument("element", help="qualified element name, e.g. data.Hotel")
    common(p_explain)
    p_explain.set_defaults(handler=cmd_explain)

    p_features = sub.add_parser(
        "features", help="list every feature the product includes")
    p_features.add_argument("spec", help="product specification file")
    common(p_features)
    p_features.set_defaults(handler=cmd_features)

    p_enum = sub.add_parser(
        "enumerate", help="list all valid configurations of a feature model")
    p_enum.add_argument("--spl", required=True, metavar="DEFINITION",
                        help="product line definition file")
    p_enum.add_argument("--model", required=True,
                        help="feature model name (the global model or a local one)")
    p_enum.add_argument("--max", type=int, default=20, metavar="N",
                        help="refuse models with more than N features (default: 20)")
    p_enum.set_defaults(handler=cmd_enumerate)

    return parser


# ---------------------------------------------------------------------------
# Diagnostic printing
# ---------------------------------------------------------------------------

def _color_enabled() -> bool:
    return sys.stderr.isatty() and not os.environ.get("NO_COLOR")

_SEVERITY_COLOR = {"error": "\x1b[31m", "warning": "\x1b[33m"}


def print_diagnostics(diagnostics: tuple[Diagnostic, ...], fmt: str) -> None:
    if fmt == "json":
        rows = [{
            "file": d.source,
            "line": d.span.line if d.span else 1,
            "column": d.span.column if d.span else 1,
            "severity": d.severity,
            "code": d.code,
            "message": d.message,
        } for d in diagnostics]
        if rows:
            print(json.dumps(rows, indent=2, ensure_ascii=False), file=sys.stderr)
        return
    color = _color_enabled()
    for d in diagnostics:
        line = d.span.line if d.span else 1
        column = d.span.column if d.span else 1
        severity = d.severity
        if color:
            severity = f"{_SEVERITY_COLOR[d.severity]}{d.severity}\x1b[0m"
        print(f"{d.source}:{line}:{column}: {severity}[{d.code}]: {d.message}",
              file=sys.stderr)


def _parse_failure(exc: ParseError, path: str, fmt: str) -> int:
    message = exc.message
    if exc.expected:
        message += f" (expected {', '.join(exc.expected)})"
    diag = Diagnostic("error", "syntax", message, None, path)
    if fmt == "json":
        print_diagnostics((diag,), fmt)
    else:
        color = _color_enabled()
        severity = f"{_SEVERITY_COLOR['error']}error\x1b[0m" if color else "error"
        print(f"{path}:{exc.line}:{exc.column}: {severity}[syntax]: {message}",
              file=sys.stderr)
    return 1


def _load(args) -> ResolvedProduct | int:
    """Parse and resolve both inputs; an int is an exit code to return."""
    try:
        spec_text = _read(args.spec)
        spl_text = _read(args.spl)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    fmt = getattr(args, "format", "text")
    try:
        spec = parse(spec_text, filename=args.spec)
    except ParseError as exc:
        return _parse_failure(exc, args.spec, fmt)
    try:
        definition = parse_spl_definition(spl_text, filename=args.spl)
    except ParseError as exc:
        return _parse_failure(exc, args.spl, fmt)
    except LocalFeaturesError as exc:
        print_diagnostics((Diagnostic("error", "definition", str(exc), None, args.spl),), fmt)
        return 1
    return resolve(spec, definition)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    resolved = _load(args)
    if isinstance(resolved, int):
        return resolved
    print_diagnostics(resolved.diagnostics, args.format)
    errors = len(resolved.errors)
    warnings = len(resolved.warnings)
    print(f"{errors} errors, {warnings} warnings")
    return 1 if errors else 0


def cmd_emit(args) -> int:
    resolved = _load(args)
    if isinstance(resolved, int):
        return resolved
    print_diagnostics(resolved.diagnostics, args.format)
    if resolved.errors:
        return 1
    text = emit(resolved)
    out = args.out or f"{resolved.spec.product.name}.derivation.json"
    try:
        _write_atomically(out, text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    print(out)
    return 0


def _write_atomically(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".emit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def cmd_explain(args) -> int:
    resolved = _load(args)
    if isinstance(resolved, int):
        return resolved
    print_diagnostics(resolved.diagnostics, args.format)
    try:
        rows = explain(resolved, args.element)
    except UnknownElement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    table = []
    for row in rows:
        origin = f"{row.origin} ({row.detail})" if row.detail else row.origin
        where = "-"
        if row.span is not None:
            where = f"{row.source}:{row.span.line}:{row.span.column}"
        table.append((row.feature, origin, where))
    width_name = max(len("FEATURE"), *(len(t[0]) for t in table)) if table else 7
    width_origin = max(len("ORIGIN"), *(len(t[1]) for t in table)) if table else 6
    print(f"{'FEATURE':<{width_name}}  {'ORIGIN':<{width_origin}}  SOURCE")
    for feature, origin, where in table:
        print(f"{feature:<{width_name}}  {origin:<{width_origin}}  {where}")
    return 0


def cmd_features(args) -> int:
    resolved = _load(args)
    if isinstance(resolved, int):
        return resolved
    print_diagnostics(resolved.diagnostics, args.format)
    if resolved.errors:
        return 1
    for name in resolved.included:
        print(name)
    return 0


def cmd_enumerate(args) -> int:
    try:
        text = _read(args.spl)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        definition = parse_spl_definition(text, filename=args.spl)
    except ParseError as exc:
        return _parse_failure(exc, args.spl, "text")
    except LocalFeaturesError as exc:
        print_diagnostics((Diagnostic("error", "definition", str(exc), None, args.spl),),
                          "text")
        return 1

    functional = definition.functional
    if args.model == functional.global_model.name:
        model = functional.global_model
    elif args.model in functional.locals:
        model = functional.locals[args.model]
    else:
        known = ", ".join([functional.global_model.name, *functional.locals])
        print(f"error: no feature model named {args.model!r} (known: {known})",
              file=sys.stderr)
        return USAGE_ERROR
    try:
        configurations = enumerate_configurations(model, args.max)
    except ModelTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    print(len(configurations))
    for configuration in configurations:
        print(", ".join(sorted(configuration)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
