"""Command line front end: ``circorder <subcommand> ...``.

Exit codes: 0 ok, 1 invariant violation, 2 malformed input, 3 resource bound.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import random
import sys
from fractions import Fraction

from . import automorphisms as am
from . import flow, profinite, tower
from .core import FiniteCircularOrder, check_axioms, parse_relation
from .errors import CircOrderError, MalformedInput, ResourceBoundExceeded
from .rational import format_point, parse_point

EXIT_OK, EXIT_VIOLATION, EXIT_MALFORMED, EXIT_RESOURCE = 0, 1, 2, 3


class Violation(Exception):
    """Raised by a subcommand whose check found a counterexample."""


def _points(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    return [parse_point(s) for s in text.split(",")]


def _rationals(text: str) -> list[Fraction]:
    pts = _points(text)
    for p in pts:
        if not isinstance(p, Fraction):
            raise MalformedInput(f"{p} must be rational here")
    return pts


def _pairs(text: str) -> list[tuple]:
    out = []
    for item in text.split(","):
        if ":" not in item:
            raise MalformedInput(f"pair {item!r} is not of the form a:b")
        a, b = item.split(":", 1)
        out.append((parse_point(a), parse_point(b)))
    return out


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc


def _grid(n: int) -> list[Fraction]:
    return [Fraction(i, n) for i in range(n)]


# -- subcommands ---------------------------------------------------------------------


def cmd_axioms(args) -> str:
    try:
        data = json.loads(_read(args.input))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    ground, triples = parse_relation(data, close_rotations=not args.raw)
    report = check_axioms(ground, triples)
    if args.format == "json":
        text = json.dumps({"ok": report.ok, "axiom": report.axiom, "witness": report.witness})
    else:
        text = str(report)
    if not report.ok:
        raise Violation(text)
    if args.format == "dot":
        text = FiniteCircularOrder(ground, triples).successor_dot()
    return text


def cmd_extend(args) -> str:
    pairs = _pairs(args.pairs)
    if args.thompson:
        g = am.thompson_extend(pairs)
    elif args.fix is not None:
        g = am.extend_fixing(parse_point(args.fix), pairs)
    else:
        g = am.extend_partial_iso(am.PartialIso.from_pairs(pairs))
    for a, b in pairs:
        if g(a) != b:
            raise Violation(f"extension sends {format_point(a)} to {format_point(g(a))}, not {format_point(b)}")
    evals = {format_point(x): format_point(g(x)) for x in _points(args.eval or "")}
    if args.format == "json":
        return json.dumps({"pieces": g.to_json(), "eval": evals}, indent=2)
    lines = [f"[{s}, ...): x -> {m}*x + {c}" for s, m, c in g.to_json()]
    lines += [f"g({x}) = {y}" for x, y in evals.items()]
    return "\n".join(lines)


def cmd_quotient(args) -> str:
    F = _points(args.cycle)
    chain = [_points(c) for c in args.chain.split(";")] if args.chain else None
    if args.format == "json":
        q = profinite.quotient(F)
        return json.dumps({"cycle": [format_point(t) for t in F], "cells": [c.to_json() for c in q.cells]}, indent=2)
    return profinite.quotient_dot(F, chain)


def cmd_cosets(args) -> str:
    F = _rationals(args.cycle)
    if len(F) > args.depth:
        raise ResourceBoundExceeded(f"|F| = {len(F)} exceeds --depth {args.depth}")
    found = profinite.double_cosets(F)
    if args.probe:
        rng = random.Random(args.seed)
        print(f"probing {args.probe} random elements, seed {args.seed}", file=args.log)
        known = {p for p, _ in found}
        for _ in range(args.probe):
            g = _random_element(rng, args.grid)
            if profinite.pattern_of(F, g) not in known:
                raise Violation(f"element {g.to_json()} has an unlisted pattern")
    return json.dumps([dict(p.to_json(), realizer=g.to_json()) for p, g in found], indent=2)


def _random_element(rng: random.Random, grid: int) -> am.PLCircleAutomorphism:
    k = rng.randint(1, 4)
    xs = sorted(rng.sample(range(grid), k))
    ys = sorted(rng.sample(range(grid), k))
    shift = rng.randrange(k)
    ys = ys[shift:] + ys[:shift]
    return am.extend_partial_iso(am.PartialIso([Fraction(x, grid) for x in xs], [Fraction(y, grid) for y in ys]))


def cmd_shrink(args) -> str:
    b, c, z = parse_point(args.b), parse_point(args.c), parse_point(args.z)
    steps = flow.shrink_set(b, c, z, args.depth)
    F = _rationals(args.cells) if args.cells else None
    if not all(s.contained() for s in steps):
        raise Violation("an image left its target interval")
    return flow.shrink_trace_csv(steps, F).rstrip("\n")


def cmd_push(args) -> str:
    atoms = []
    for item in args.atoms.split(","):
        p, _, w = item.partition("@")
        atoms.append((parse_point(p), Fraction(w) if w else Fraction(1)))
    total = sum(w for _, w in atoms)
    mu = flow.FinSuppMeasure([(p, w / total) for p, w in atoms])
    steps = flow.push_measure(mu, parse_point(args.z), args.depth)
    return flow.push_trace_csv(steps).rstrip("\n")


def cmd_orbit(args) -> str:
    x = flow.SplitPoint.parse(args.point)
    report = flow.minimality_probe(x, _rationals(args.cycle), Fraction(1, args.grid))
    text = flow.coverage_json(report)
    if not report.complete:
        raise Violation(text)
    return text


def cmd_field(args) -> str:
    t = tower.Tower(args.depth)
    if args.triple:
        pts = [tower.CirclePointK(t.parse(s)) for s in args.triple]
        return json.dumps(tower.circ_triple_k(*pts)) if args.format == "json" else str(tower.circ_triple_k(*pts)).lower()
    if args.expr is None:
        raise MalformedInput("field needs an expression or --triple")
    x = t.parse(args.expr)
    out = {"value": str(x), "sign": {-1: "negative", 0: "zero", 1: "positive"}[x.sign()], "finite": x.is_finite()}
    if x.is_finite():
        out["floor"] = x.floor()
        out["mod1"] = str(x.mod1().rep)
    if args.format == "json":
        return json.dumps(out, indent=2)
    return "\n".join(f"{k}: {str(v).lower() if isinstance(v, bool) else v}" for k, v in out.items())


def cmd_split(args) -> str:
    points = [flow.SplitPoint.parse(s) for s in args.points.split(",")]
    grid = _grid(args.grid)
    rows = []
    for x in points:
        order = flow.phi(x).sort(grid)
        rows.append({"point": str(x), "order": [format_point(q) for q in order]})
    if len(points) == 2 and points[0] != points[1]:
        a, b = flow.distinguishing_pair(points[0], points[1])
        rows.append({"distinguishing_pair": [format_point(a), format_point(b)]})
    if args.format == "json":
        return json.dumps(rows, indent=2)
    return "\n".join(
        f"{r['point']}: " + " < ".join(r["order"]) if "point" in r else "distinguished by " + ", ".join(r["distinguishing_pair"])
        for r in rows
    )


# -- parser ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    # a fresh parent per subcommand: parents share Action objects, so one
    # subcommand's set_defaults would otherwise leak into the others
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=None, help="depth / size bound")
    common.add_argument("--grid", type=int, default=None, help="grid denominator or resolution")
    common.add_argument("--format", choices=["json", "dot", "csv", "text"], default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circorder", description="Circular orders and their automorphism groups.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("axioms", parents=[_common()], help="check a JSON ternary relation")
    s.add_argument("input", nargs="?", default="-")
    s.add_argument("--raw", action="store_true", help="do not close listed triples under rotation")
    s.set_defaults(func=cmd_axioms, fmt="text")

    s = sub.add_parser("extend", parents=[_common()], help="extend a finite partial isomorphism")
    s.add_argument("pairs", help="a1:b1,a2:b2,...")
    s.add_argument("--thompson", action="store_true")
    s.add_argument("--fix", default=None, help="point the extension must fix")
    s.add_argument("--eval", default=None, help="points to evaluate")
    s.set_defaults(func=cmd_extend, fmt="text")

    s = sub.add_parser("quotient", parents=[_common()], help="X_F and bonding maps as DOT")
    s.add_argument("cycle")
    s.add_argument("--chain", default=None, help="cycles separated by ';' (coarsest first)")
    s.set_defaults(func=cmd_quotient, fmt="dot")

    s = sub.add_parser("cosets", parents=[_common()], help="enumerate double-coset patterns")
    s.add_argument("cycle")
    s.add_argument("--probe", type=int, default=0, help="random elements to classify")
    s.set_defaults(func=cmd_cosets, fmt="json", depth=3, grid=24)

    s = sub.add_parser("shrink", parents=[_common()], help="extreme proximality trace (CSV)")
    s.add_argument("--b", required=True)
    s.add_argument("--c", required=True)
    s.add_argument("--z", required=True)
    s.add_argument("--cells", default=None, help="cycle F for cell occupancy")
    s.set_defaults(func=cmd_shrink, fmt="csv", depth=4)

    s = sub.add_parser("push", parents=[_common()], help="strong proximality trace (CSV)")
    s.add_argument("--atoms", required=True, help="p1@w1,p2@w2,... (weights normalized)")
    s.add_argument("--z", required=True)
    s.set_defaults(func=cmd_push, fmt="csv", depth=6)

    s = sub.add_parser("orbit", parents=[_common()], help="minimality coverage of X_F")
    s.add_argument("point", help="split point such as 1/3-, 0+ or sqrt(2)-1")
    s.add_argument("cycle")
    s.set_defaults(func=cmd_orbit, fmt="json", grid=1024)

    s = sub.add_parser("field", parents=[_common()], help="sign/finite/floor/mod1 of a tower element")
    s.add_argument("expr", nargs="?", default=None)
    s.add_argument("--triple", nargs=3, default=None, metavar="X")
    s.set_defaults(func=cmd_field, fmt="text", depth=tower.DEFAULT_DEPTH)

    s = sub.add_parser("split", parents=[_common()], help="Phi: split point to linear order on a grid")
    s.add_argument("points", help="comma-separated split points")
    s.set_defaults(func=cmd_split, fmt="text", grid=8)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    args.format = args.format or args.fmt
    args.log = stderr
    for name in ("depth", "grid"):
        if getattr(args, name) is not None and getattr(args, name) <= 0:
            print(f"error: --{name} must be positive", file=stderr)
            return EXIT_MALFORMED
    code, text = EXIT_OK, ""
    try:
        text = args.func(args)
    except Violation as exc:
        code, text = EXIT_VIOLATION, str(exc)
    except ResourceBoundExceeded as exc:
        print(f"resource bound exceeded: {exc}", file=stderr)
        return EXIT_RESOURCE
    except (CircOrderError, ZeroDivisionError, ValueError) as exc:
        print(f"malformed input ({type(exc).__name__}): {exc}", file=stderr)
        return EXIT_MALFORMED
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stdout)
    return code


def main() -> None:
    sys.exit(run())
