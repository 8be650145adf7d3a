"""Command line interface.

Exit codes: 0 success, 1 a verified property failed, 2 usage or parse error,
3 semantic error (non-proper subset, invalid field).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import construct
from .complex import LefschetzComplex, build_cubical_grid, key_to_str
from .dynamics import (
    canonical_pair,
    invariant_part,
    saturate,
    validate_index_pair,
)
from .errors import InternalConsistencyError, InvalidFieldError, NotProperError, UnknownCellError
from .homology import poincare
from .morse import (
    basic_sets,
    conley_morse_graph,
    morse_equation,
    morse_index_pair,
    validate_decomposition,
)
from .mvf import MultivectorField, theta_violations

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, EXIT_SEMANTIC = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_USAGE) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed JSON: {exc}", EXIT_USAGE) from None


def _load_complex(args) -> LefschetzComplex:
    if getattr(args, "grid", None) is not None:
        if args.grid < 1:
            raise CliError("--grid needs a positive size", EXIT_USAGE)
        return build_cubical_grid(args.grid, args.coeff)
    if not args.complex:
        raise CliError("give a complex file or --grid N", EXIT_USAGE)
    try:
        return LefschetzComplex.from_json(_read_json(args.complex), args.coeff)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CliError):
            raise
        raise CliError(f"{args.complex}: bad complex: {exc}", EXIT_USAGE) from None


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _theta_from_json(cx: LefschetzComplex, data) -> dict:
    if not isinstance(data, dict) or "theta" not in data:
        raise CliError("field JSON needs a 'theta' entry", EXIT_USAGE)
    try:
        return {cx.id_of(a): cx.id_of(b) for a, b in data["theta"].items()}
    except UnknownCellError as exc:
        raise CliError(f"field refers to unknown cell {exc.args[0]!r}", EXIT_SEMANTIC) from None


def _load_field(cx: LefschetzComplex, path: str) -> MultivectorField:
    data = _read_json(path)
    try:
        return MultivectorField.from_json(cx, data)
    except InvalidFieldError as exc:
        raise CliError(f"invalid field: {exc}", EXIT_SEMANTIC) from None
    except UnknownCellError as exc:
        raise CliError(f"field refers to unknown cell {exc.args[0]!r}", EXIT_SEMANTIC) from None
    except (TypeError, ValueError, AttributeError) as exc:
        raise CliError(f"{path}: bad field: {exc}", EXIT_USAGE) from None


# commands


def cmd_homology(args) -> int:
    cx = _load_complex(args)
    subset = None
    if args.subset is not None:
        try:
            subset = cx.ids(args.subset)
        except UnknownCellError as exc:
            raise CliError(f"unknown cell {exc.args[0]!r}", EXIT_SEMANTIC) from None
    try:
        p = poincare(cx, subset)
    except NotProperError:
        raise CliError("subset is not proper", EXIT_SEMANTIC) from None
    print(p)
    return EXIT_OK


def cmd_cmvf(args) -> int:
    sources = [args.cloud is not None, args.ode_two_circles is not None, args.random is not None]
    if sum(sources) != 1:
        raise CliError("give exactly one of a cloud file, --ode-two-circles N, --random N", EXIT_USAGE)
    if args.random is not None and args.seed is None:
        raise CliError("--random needs --seed", EXIT_USAGE)
    try:
        if args.cloud is not None:
            try:
                text = Path(args.cloud).read_text()
            except OSError as exc:
                raise CliError(f"cannot read {args.cloud}: {exc.strerror}", EXIT_USAGE) from None
            cloud = construct.read_cloud(text)
        elif args.ode_two_circles is not None:
            cloud = construct.sample_ode_two_circles(args.ode_two_circles, *args.domain)
        else:
            cloud = construct.random_cloud_inward_boundary(args.random, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    n = construct.grid_size(cloud)
    cx = build_cubical_grid(n, args.coeff)
    field = construct.cmvf(cloud, args.mu, args.eps, cx)
    _write(json.dumps(field.to_json(), indent=1, sort_keys=True) + "\n", args.output)
    if args.complex_out:
        Path(args.complex_out).write_text(cx.dumps())
    summary = sys.stderr if args.output in (None, "-") else sys.stdout
    print(f"cells: {len(cx)}", file=summary)
    print(f"multivectors: {len(field.multivectors)}", file=summary)
    print(f"strict: {len(field.strict_multivectors())}", file=summary)
    print(f"critical: {len(field.critical_multivectors())}", file=summary)
    return EXIT_OK


def cmd_morse(args) -> int:
    cx = _load_complex(args)
    field = _load_field(cx, args.field)
    dec = basic_sets(field)
    graph = conley_morse_graph(field, dec)
    eq = morse_equation(field, dec)
    report = {
        "morse_sets": [
            {
                "id": r,
                "poincare": str(graph.nodes[r]),
                "cells": [key_to_str(k) for k in cx.keys_of(M)],
            }
            for r, M in enumerate(dec.sets)
        ],
        "edges": [list(e) for e in graph.edges],
        "p_X": str(eq.p_complex),
        "q": str(eq.q_total),
        "residual": str(eq.residual),
        "equation": eq.equation(),
        "steps": eq.to_json(),
    }
    if args.graph:
        Path(args.graph).write_text(graph.to_dot())
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    if args.format == "dot":
        text = graph.to_dot()
    elif args.format == "json":
        text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    else:
        lines = [f"M{r}: {graph.nodes[r]}" for r in sorted(graph.nodes)]
        lines += [f"M{a} -> M{b}" for a, b in graph.edges]
        lines.append(f"p_X: {eq.p_complex}")
        lines.append(f"equation: {eq.equation()}")
        text = "\n".join(lines) + "\n"
    _write(text, args.output)
    return EXIT_OK


def _verify(cx: LefschetzComplex, theta: dict) -> list[str]:
    failures = []
    violations = theta_violations(cx, theta)
    if violations:
        kinds = sorted({k for k, _ in violations})
        return [f"theta {k}" for k in kinds]
    field = MultivectorField(cx, theta)
    X = frozenset(cx.cells)
    S = invariant_part(field, X)
    probes = [X, S, *field.partition()]
    for A in probes:
        inv = invariant_part(field, A)
        if invariant_part(field, inv) != inv:
            failures.append("invariant part idempotence")
            break
    dec = basic_sets(field)
    if not validate_decomposition(field, dec.sets, dec.below).ok:
        failures.append("Morse decomposition axioms")
    for r, M in enumerate(dec.sets):
        for name, P in (("canonical", canonical_pair(field, M)), ("Morse", morse_index_pair(field, dec, [r]))):
            amb = field if name == "canonical" else field.restrict(S)
            if not validate_index_pair(amb, P, M).ok:
                failures.append(f"{name} index pair of M{r}")
                continue
            try:
                Q = saturate(amb, P, M)
            except InternalConsistencyError:
                failures.append(f"saturation of {name} index pair of M{r}")
                continue
            if poincare(cx, P.difference) != poincare(cx, M) or poincare(cx, Q.difference) != poincare(cx, M):
                failures.append(f"Conley index of M{r} via {name} pair")
    try:
        morse_equation(field, dec)
    except InternalConsistencyError as exc:
        failures.append(f"Morse equation: {exc}")
    return failures


def cmd_verify(args) -> int:
    cx = _load_complex(args)
    theta = _theta_from_json(cx, _read_json(args.field))
    failures = _verify(cx, theta)
    for f in failures:
        print(f"FAIL {f}")
    if failures:
        return EXIT_PROPERTY
    print("ok")
    return EXIT_OK


# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--coeff", choices=["mod2", "rational"], default="mod2", help="coefficient field")
    common.add_argument("-o", "--output", help="output path (default stdout)")

    p = _Parser(prog="multivector", description="Combinatorial multivector fields and Conley-Morse graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("homology", parents=[common], help="Poincare polynomial of a complex or subset")
    h.add_argument("complex", nargs="?", help="complex JSON file")
    h.add_argument("--grid", type=int, help="use the cubical grid of size N instead of a file")
    h.add_argument("--subset", nargs="+", metavar="CELL", help="cell ids of a proper subset")
    h.set_defaults(func=cmd_homology)

    c = sub.add_parser("cmvf", parents=[common], help="build a field from a vector cloud")
    c.add_argument("cloud", nargs="?", help="CSV file with lines i,j,vx,vy")
    c.add_argument("--ode-two-circles", type=int, metavar="N", help="sample the two-circle ODE on an N grid")
    c.add_argument("--random", type=int, metavar="N", help="random cloud with inward boundary on an N grid")
    c.add_argument("--seed", type=int, help="seed for --random")
    c.add_argument("--mu", type=float, default=math.pi / 8, help="cone half-angle (default pi/8)")
    c.add_argument("--eps", type=float, default=None, help="zero threshold (default 1e-6 * max norm)")
    c.add_argument("--domain", type=float, nargs=2, default=(-3.0, 3.0), metavar=("LO", "HI"),
                   help="square the ODE grid is mapped onto (default -3 3)")
    c.add_argument("--complex-out", help="also write the grid complex JSON here")
    c.set_defaults(func=cmd_cmvf)

    m = sub.add_parser("morse", parents=[common], help="Morse decomposition and Conley-Morse graph")
    m.add_argument("complex", nargs="?", help="complex JSON file")
    m.add_argument("field", help="field JSON file")
    m.add_argument("--grid", type=int, help="use the cubical grid of size N instead of a file")
    m.add_argument("--graph", help="write the Conley-Morse graph as DOT here")
    m.add_argument("--report", help="write the JSON report here")
    m.add_argument("--format", choices=["dot", "json", "text"], default="text")
    m.set_defaults(func=cmd_morse)

    v = sub.add_parser("verify", parents=[common], help="run the property checks on a field")
    v.add_argument("complex", nargs="?", help="complex JSON file")
    v.add_argument("field", help="field JSON file")
    v.add_argument("--grid", type=int, help="use the cubical grid of size N instead of a file")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
