"""Command-line front end: ``btlab {ring,dist,ball,act,trace,catalog,verify}``.

Inputs are JSON files, inline JSON, or builtin names written ``@name``.
Exit status is 0 on success, 1 on a failed verification or computation
error, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import builtins as B
from . import checks
from .cyclic_algebra import CyclicAlgebraSpec, algebra_context
from .errors import (
    BtlabError,
    CapExceedsPrecision,
    IndexOutOfRange,
    RegimeMismatch,
    SpecFormatError,
    UnknownCheck,
    WrongShape,
)
from .local_groups import FAMILIES, make_group
from .local_tree import build_ball, check_tree, to_dot, to_json
from .proximity import catalog_distances, catalog_report, convergence_trace, krasner_distance
from .quad_pair import QuadPair
from .trunc_ring import LocalFieldSpec, make_ring

USAGE_ERRORS = (SpecFormatError, UnknownCheck, WrongShape, CapExceedsPrecision, RegimeMismatch, IndexOutOfRange)


class UsageError(Exception):
    pass


def load_json(arg: str):
    """Builtin name, inline JSON, or a UTF-8 JSON file."""
    if arg.startswith("@"):
        return arg
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        try:
            with open(arg, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {arg}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{arg}: invalid JSON ({exc.msg})") from exc


def load_point(arg: str):
    return B.from_json(load_json(arg))


def load_group(arg: str, radius=None):
    obj = load_json(arg)
    if not isinstance(obj, dict) or "family" not in obj or "carrier" not in obj:
        raise SpecFormatError('group JSON needs "family" and "carrier"')
    family = obj["family"]
    if family not in FAMILIES:
        raise SpecFormatError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")
    rho = obj.get("radius", radius)
    if rho is None:
        raise SpecFormatError("group radius missing")
    if not isinstance(rho, int) or isinstance(rho, bool) or rho < 0:
        raise SpecFormatError(f"bad radius {rho!r}")
    return make_group(family, B.from_json(obj["carrier"]), rho)


def _digit_ring(G):
    return G.algebra.digit_ring() if G.family == "SL2D" else G.ring


def parse_matrix(G, text: str):
    """Row-major list of digit vectors (an integer entry is read as an integer of the ring)."""
    obj = load_json(text)
    R = _digit_ring(G)
    if not isinstance(obj, list) or len(obj) != G.n * G.n:
        raise WrongShape(f"expected {G.n * G.n} entries in row-major order")
    codes = []
    for entry in obj:
        if isinstance(entry, bool):
            raise WrongShape("booleans are not matrix entries")
        if isinstance(entry, int):
            codes.append(_int_code(G, entry))
        elif isinstance(entry, list) and all(isinstance(d, int) and not isinstance(d, bool) for d in entry):
            if len(entry) > R.radius or any(d < 0 or d >= R.Q for d in entry):
                raise WrongShape(f"digit vector {entry} does not fit the ring")
            codes.append(R.from_digits(entry))
        else:
            raise WrongShape(f"cannot read matrix entry {entry!r}")
    return [codes[i * G.n : (i + 1) * G.n] for i in range(G.n)]


def _int_code(G, k: int) -> int:
    """Code of the integer k, as a sum of copies of one in the scalars."""
    S = G.S
    step = S.one if k >= 0 else int(S.neg[S.one])
    code = S.zero
    for _ in range(abs(k) % (S.N * 8)):
        code = int(S.add[code, step])
    return code


def parse_vertex(text: str):
    try:
        x, k = text.split(":")
        return int(x), int(k)
    except ValueError as exc:
        raise UsageError(f"vertex must look like level:index, got {text!r}") from exc


def emit(obj, fmt="json"):
    if fmt == "json":
        print(json.dumps(obj, sort_keys=True))
    else:
        for key in sorted(obj):
            print(f"{key}: {json.dumps(obj[key], sort_keys=True)}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_ring(args) -> int:
    point = load_point(args.spec)
    if isinstance(point, LocalFieldSpec):
        r = args.radius if args.radius is not None else 1
        R = make_ring(point, r)
        units = sum(1 for a in range(R.N) if R.val(a) == 0)
        out = {
            "kind": "field",
            "radius": r,
            "cardinality": R.N,
            "residue_size": R.Q,
            "characteristic": R.characteristic(),
            "units": units,
            "uniformizer_digits": R.digits(R.unif),
            "precision": point.max_radius,
        }
    elif isinstance(point, QuadPair):
        r = args.radius if args.radius is not None else 1
        ctx = point.conj_context(r)
        R = ctx.ring
        fixed = sum(1 for a in range(R.N) if int(ctx.table[a]) == a)
        out = {
            "kind": point.kind,
            "radius": r,
            "cardinality": R.N,
            "conjugation_fixed": fixed,
            "i0": None if point.i0 == float("inf") else int(point.i0),
            "gamma": str(point.gamma) if point.kind == "ramified_dyadic" else None,
        }
    else:
        assert isinstance(point, CyclicAlgebraSpec)
        r = args.radius if args.radius is not None else point.degree
        A = algebra_context(point, r)
        out = {"kind": "algebra", "level": r, "degree": A.d, "hasse": A.h, "cardinality": A.N}
    emit(out, args.format)
    return 0


def cmd_dist(args) -> int:
    d = krasner_distance(load_point(args.a), load_point(args.b), args.cap)
    emit(d.to_json(), args.format)
    return 0


def cmd_ball(args) -> int:
    G = load_group(args.group, args.radius)
    ball = build_ball(G, args.radius)
    if args.format == "dot":
        sys.stdout.write(to_dot(ball))
    elif args.format == "json":
        print(to_json(ball))
    else:
        info = check_tree(ball)
        print(f"family: {G.family}")
        print(f"group order: {G.order()}")
        print(f"sphere sizes: {info['sphere_sizes']}")
        for x, hist in ball.degree_histogram().items():
            print(f"degrees at level {x}: {dict(sorted(hist.items()))}")
        print(f"tree: {info['tree']}")
    return 0


def cmd_act(args) -> int:
    G = load_group(args.group)
    g = G.coerce(parse_matrix(G, args.matrix))
    if not G.contains(g):
        print("error: matrix is not in the group", file=sys.stderr)
        return 1
    ball = build_ball(G)
    x, k = parse_vertex(args.vertex)
    if not 0 <= x <= ball.radius or not 0 <= k < len(ball.reps[x]):
        raise UsageError(f"vertex {args.vertex} is not in the ball")
    y, m = ball.act(g, (x, k))
    emit({"vertex": f"{x}:{k}", "image": f"{y}:{m}"}, args.format)
    return 0


def cmd_trace(args) -> int:
    seq = load_json(args.seq)
    if not isinstance(seq, list):
        raise SpecFormatError("sequence JSON must be a list of points")
    points = [B.from_json(p) for p in seq]
    limit = load_point(args.limit)
    rows = convergence_trace(points, limit, args.cap, args.family, verify_balls=not args.no_balls)
    emit({"rows": rows}, args.format)
    bad = [r for r in rows if r["verified"] is False]
    return 1 if bad else 0


def cmd_catalog(args) -> int:
    pts = load_json(args.points)
    if not isinstance(pts, list) or len(pts) < 2:
        raise SpecFormatError("catalog JSON must be a list of at least two points")
    matrix = catalog_distances([B.from_json(p) for p in pts], args.cap)
    report = catalog_report(matrix)
    report["cap"] = matrix[0][0].cap
    emit(report, args.format)
    return 0


def cmd_verify(args) -> int:
    if args.check == "list":
        for cid in checks.check_ids():
            print(f"{cid}: {checks.REGISTRY[cid][0]}")
        return 0
    ids = checks.check_ids() if args.check == "all" else [args.check]
    results = [checks.run_check(c) for c in ids]
    if args.format == "json":
        print(json.dumps([r.to_json() for r in results], sort_keys=True, default=str))
    else:
        for r in results:
            print(r.line())
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} checks passed")
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # suppressed default so a value given before the subcommand is not reset by it
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="enumeration budget (sets BTLAB_BUDGET)")

    p = _Parser(prog="btlab", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ring", help="describe a truncated ring", parents=[common])
    s.add_argument("spec")
    s.add_argument("--radius", type=int)
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(func=cmd_ring)

    s = sub.add_parser("dist", help="Krasner agreement of two fields, pairs or algebras", parents=[common])
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--cap", type=int)
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("ball", help="build the ball of a local model", parents=[common])
    s.add_argument("group")
    s.add_argument("--radius", type=int)
    s.add_argument("--format", choices=("dot", "json", "text"), default="text")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("act", help="image of a vertex under a group element", parents=[common])
    s.add_argument("group")
    s.add_argument("--matrix", required=True, help="row-major list of digit vectors")
    s.add_argument("--vertex", required=True, help="level:index")
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(func=cmd_act)

    s = sub.add_parser("trace", help="agreement of a sequence with its limit", parents=[common])
    s.add_argument("seq")
    s.add_argument("--limit", required=True)
    s.add_argument("--cap", type=int)
    s.add_argument("--family")
    s.add_argument("--no-balls", action="store_true", help="skip the transported ball check")
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("catalog", help="pairwise agreement over a list of points", parents=[common])
    s.add_argument("points")
    s.add_argument("--cap", type=int)
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("verify", help="run a named check, 'all', or 'list'", parents=[common])
    s.add_argument("check")
    s.add_argument("--format", choices=("json", "text"), default="text")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    saved = os.environ.get("BTLAB_BUDGET")
    try:
        args = parser.parse_args(argv)
        budget = getattr(args, "budget", None)
        if budget is not None:
            if budget < 1:
                raise UsageError("--budget must be positive")
            os.environ["BTLAB_BUDGET"] = str(budget)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except BtlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    finally:
        # the budget override lasts for one invocation only
        if saved is None:
            os.environ.pop("BTLAB_BUDGET", None)
        else:
            os.environ["BTLAB_BUDGET"] = saved

if __name__ == "__main__":
    sys.exit(main())
