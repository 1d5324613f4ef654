"""Command-line interface.  Exit status: 0 success, 1 domain failure, 2 bad input."""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import oracle
from .cobordism import CobordismClass, are_cobordant, realize_surface
from .moves import MoveError
from .normal_form import canonical, normalize
from .reeb import (
    DecodeError,
    InvalidGraphError,
    decode,
    encode,
    is_isomorphic,
    sigma,
    to_dot,
    validate,
)
from .surface import (
    ExtractionError,
    OffParseError,
    SurfaceError,
    dump_off,
    dump_values,
    extract_reeb,
    extraction_report,
    load_off,
    load_values,
)


class InputError(Exception):
    pass


class DomainFailure(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _graph(path: str):
    try:
        return decode(_read(path))
    except DecodeError as exc:
        raise InputError(f"{path}: {exc}") from None
    except InvalidGraphError as exc:
        raise InputError(f"{path}: invalid graph: {exc}") from None


def _surface(args):
    try:
        s = load_off(_read(args.surface))
    except OffParseError as exc:
        raise InputError(f"{args.surface}: {exc}") from None
    except SurfaceError as exc:
        raise InputError(f"{args.surface}: not a closed surface: {exc}") from None
    if args.values:
        try:
            f = load_values(_read(args.values), s.vertex_count)
        except OffParseError as exc:
            raise InputError(f"{args.values}: {exc}") from None
    else:
        f = s.default_function()
    return s, f


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_validate(args) -> int:
    if args.graph:
        try:
            g = decode(_read(args.graph), check=False)
        except DecodeError as exc:
            raise InputError(f"{args.graph}: {exc}") from None
        problems = validate(g)
        for p in problems:
            print(f"{args.graph}: {p}", file=sys.stderr)
        if problems:
            return 2
        print("valid")
        return 0
    s, f = _surface(args)
    try:
        extract_reeb(s, f)
    except ExtractionError as exc:
        print(f"{args.surface}: {exc}", file=sys.stderr)
        return 2
    print("valid")
    return 0


def cmd_extract(args) -> int:
    s, f = _surface(args)
    try:
        ex = extract_reeb(s, f)
    except ExtractionError as exc:
        raise InputError(f"{args.surface}: {exc}") from None
    _write(args.out, encode(ex.graph))
    if args.dot:
        _write(args.dot, to_dot(ex.graph))
    report = extraction_report(s, f, ex)
    if args.report:
        _write(args.report, json.dumps(report, indent=1, sort_keys=True) + "\n")
    _print_json(report["sigma"])
    return 0


def cmd_sigma(args) -> int:
    s = sigma(_graph(args.graph))
    _print_json({"t": s.t, "d": s.d})
    return 0


def cmd_normalize(args) -> int:
    g = _graph(args.graph)
    result, trace = normalize(g)
    if args.self_check:
        problems = validate(result)
        if problems or not is_isomorphic(result, canonical(*sigma(g).as_tuple())):
            print("self-check failed: result is not the canonical graph", file=sys.stderr)
            return 2
        try:
            trace.replay()
        except MoveError as exc:
            print(f"self-check failed: {exc}", file=sys.stderr)
            return 2
    _write(args.out, encode(result))
    if args.trace:
        _write(args.trace, trace.dumps())
    _print_json({"moves": len(trace.moves), "steps": len(trace.steps)})
    return 0


def cmd_cobordant(args) -> int:
    a, b = _graph(args.a), _graph(args.b)
    same, cert = are_cobordant(a, b)
    print("cobordant" if same else "not cobordant")
    if same and args.certificate:
        out = Path(args.certificate)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InputError(f"{out}: {exc.strerror or exc}") from None
        _write(str(out / "first.trace.json"), cert.first.dumps())
        _write(str(out / "second.trace.json"), cert.second.dumps())
        _write(str(out / "canonical.json"), encode(cert.canonical))
    if args.expect_equal and not same:
        return 1
    return 0


def _class(args) -> CobordismClass:
    if args.d not in (0, 1):
        raise InputError("--d must be 0 or 1")
    return CobordismClass(args.t, args.d)


def cmd_canonical(args) -> int:
    c = _class(args)
    g = canonical(c.t, c.d)
    if args.out:
        _write(args.out, encode(g))
    else:
        sys.stdout.write(encode(g))
    if args.dot:
        _write(args.dot, to_dot(g))
    return 0


def cmd_realize(args) -> int:
    c = _class(args)
    s, f = realize_surface(c)
    _write(args.surface_out, dump_off(s, f))
    _write(args.values_out, dump_values(f))
    _print_json(c.to_json())
    return 0


def cmd_oracle(args) -> int:
    print(f"seed {args.seed}")
    rng = random.Random(args.seed)
    k = args.max_vertices
    if args.mode == "enumerate":
        report = oracle.completeness_report(k)
        _print_json(report)
        return 0 if report["ok"] else 2
    if args.mode == "invariance":
        bad = 0
        for _ in range(args.samples):
            g = oracle.random_graph(rng, k)
            for line in oracle.invariance_failures(g):
                bad += 1
                print(f"sigma changed: {line} in {encode(g).strip()}", file=sys.stderr)
        _print_json({"graphs": args.samples, "failures": bad})
        return 0 if bad == 0 else 2
    # bfs: pair random graphs of equal sigma and search for a connecting path
    found = failed = 0
    for _ in range(args.samples):
        g = oracle.random_graph(rng, k)
        target = canonical(*sigma(g).as_tuple())
        path = oracle.bfs_path(g, target, max(k, len(target)) + 2)
        if path is None:
            failed += 1
            print(f"no path from {encode(g).strip()}", file=sys.stderr)
        else:
            found += 1
    _print_json({"pairs": args.samples, "connected": found, "unresolved": failed})
    return 0 if failed == 0 else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reebcob", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a graph document or a surface with a function")
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--surface")
    v.add_argument("--values")
    v.set_defaults(run=cmd_validate)

    e = sub.add_parser("extract", help="Reeb graph of a function on a surface")
    e.add_argument("--surface", required=True)
    e.add_argument("--values")
    e.add_argument("--out", required=True)
    e.add_argument("--dot")
    e.add_argument("--report")
    e.set_defaults(run=cmd_extract)

    s = sub.add_parser("sigma", help="print the invariant (t, d) of a graph")
    s.add_argument("--graph", required=True)
    s.set_defaults(run=cmd_sigma)

    n = sub.add_parser("normalize", help="rewrite a graph to its canonical form")
    n.add_argument("--graph", required=True)
    n.add_argument("--out", required=True)
    n.add_argument("--trace")
    n.add_argument("--self-check", action="store_true")
    n.set_defaults(run=cmd_normalize)

    c = sub.add_parser("cobordant", help="decide whether two graphs are cobordant")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--certificate", metavar="DIR")
    c.add_argument("--expect-equal", action="store_true")
    c.set_defaults(run=cmd_cobordant)

    k = sub.add_parser("canonical", help="canonical graph of a class")
    k.add_argument("--t", type=int, required=True)
    k.add_argument("--d", type=int, required=True)
    k.add_argument("--out")
    k.add_argument("--dot")
    k.set_defaults(run=cmd_canonical)

    r = sub.add_parser("realize", help="surface and function realizing a class")
    r.add_argument("--t", type=int, required=True)
    r.add_argument("--d", type=int, required=True)
    r.add_argument("--surface-out", required=True)
    r.add_argument("--values-out", required=True)
    r.set_defaults(run=cmd_realize)

    o = sub.add_parser("oracle", help="brute-force self checks")
    o.add_argument("mode", choices=["enumerate", "bfs", "invariance"])
    o.add_argument("--max-vertices", type=int, required=True)
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--samples", type=int, default=100)
    o.set_defaults(run=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvalidGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
