"""Command-line driver.  Reports go to stdout as JSON, diagnostics to stderr.

Exit codes: 0 success or true, 1 mathematically false, 2 usage or parse
error, 3 size guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys

from . import io
from .algebra import algebra_report
from .classify import classify
from .cohomology import (
    cf_pairs,
    ct_triples,
    gh2,
    gh2_A_k,
    gh2_k_V,
    h2_action,
    h2_lambda,
    h2_nab,
    metabelian_h2,
)
from .crossed import (
    crossed_product,
    decompose,
    derived_quotient_extension,
    extension_from_projection,
    oracle_agrees,
    validate_crossed_system,
)
from .errors import FourAlgError, InvalidCrossedSystem, ParseError, SizeGuard, UnsupportedOverRationals
from .exactfield import Field, Matrix
from .morphgal import galois_group, verify_galois_isomorphism

log = logging.getLogger("fouralg")

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class _Falsity(Exception):
    """A command computed a mathematical 'no' after printing its report."""


def _emit(obj):
    sys.stdout.write(io.dumps(obj) + "\n")


def _field_arg(p):
    if p is None:
        return None
    try:
        return Field.Q() if p == 0 else Field.Fp(p)
    except ValueError as exc:
        raise ParseError(str(exc), "--p") from exc


def _inline_or_file(text: str, what: str):
    """JSON given inline or as a path to a file."""
    s = text.strip()
    if s[:1] in "[{":
        return io.loads(s, f"--{what}")
    return io.load_json(s)


# -- commands -----------------------------------------------------------------

def cmd_validate(args):
    A = io.load_algebra(args.algebra, _field_arg(args.p))
    rep = algebra_report(A)
    _emit(rep)
    if not rep["is_four_algebra"]:
        raise _Falsity


def cmd_crossed(args):
    F = _field_arg(args.p)
    if args.action == "decompose":
        E = io.load_algebra(args.file, F)
        if args.derived:
            ext = derived_quotient_extension(E)
        else:
            if args.pi is None:
                raise ParseError("decompose needs --pi or --derived", "arguments")
            pi = io.matrix_from_json(E.field, _inline_or_file(args.pi, "pi"), "--pi")
            s = io.matrix_from_json(E.field, _inline_or_file(args.s, "s"), "--s") if args.s else None
            ext = extension_from_projection(E, pi, s)
        cs = decompose(ext)
        _emit({"crossed_system": io.crossed_to_json(cs), "pi": io.matrix_to_json(ext.pi),
               "s": io.matrix_to_json(ext.s)})
        return
    cs = io.load_crossed(args.file, F)
    if args.action == "validate":
        rep = validate_crossed_system(cs)
        _emit(rep.as_dict())
        if not rep.ok:
            raise _Falsity
    elif args.action == "product":
        _emit(io.algebra_to_json(crossed_product(cs)))
    elif args.action == "oracle":
        agree = oracle_agrees(cs)
        _emit({"validates": validate_crossed_system(cs).ok, "agree": agree})
        if not agree:
            raise _Falsity


def _load_A(args):
    return io.load_algebra(args.A, _field_arg(args.p))


def cmd_cohomology(args):
    kw = {"force": args.force}
    what = args.what
    if what == "gh2":
        _emit(io.classset_to_json(gh2(_load_A(args), args.vdim, threads=args.threads, **kw)))
    elif what == "h2nab":
        A = _load_A(args)
        V = io.load_algebra(args.V, A.field)
        _emit(io.classset_to_json(h2_nab(A, V, **kw)))
    elif what == "h2action":
        A = _load_A(args)
        act = io.dense_from_json(A.field, _inline_or_file(args.act, "act"), (A.dim, args.vdim, args.vdim), "--act")
        _emit(io.quotient_to_json(h2_action(A, args.vdim, act, **kw)))
    elif what == "h2lambda":
        A = _load_A(args)
        lam = io.vector_from_json(A.field, _inline_or_file(args.lam, "lam"), "--lam")
        _emit(io.quotient_to_json(h2_lambda(A, lam, **kw)))
    elif what == "cf":
        A = _load_A(args)
        pairs = cf_pairs(A, **kw)
        out = io.classset_to_json(gh2_A_k(A, **kw))
        out["cf_size"] = len(pairs)
        _emit(out)
    elif what == "ct":
        if args.V:
            V = io.load_algebra(args.V, _field_arg(args.p))
            triples = ct_triples(V, **kw)
            _emit({"multV": io.algebra_to_json(V), "count": len(triples),
                   "pairs": [{"theta": io.matrix_to_json(Matrix(V.field, t.theta)), "F": io.vector_to_json(V.field, t.F)}
                             for t in triples]})
        else:
            if args.p is None or args.vdim is None:
                raise ParseError("ct needs --V, or --vdim with --p", "arguments")
            _emit(io.classset_to_json(gh2_k_V(args.vdim, _field_arg(args.p), **kw)))
    elif what == "metabelian":
        F = _field_arg(args.p) or Field.Q()
        n, m = args.adim, args.vdim
        act = io.dense_from_json(F, _inline_or_file(args.act, "act"), (n, m, m), "--act") if args.act else F.zeros((n, m, m))
        _emit(io.quotient_to_json(metabelian_h2(n, m, act, F, **kw)))


def cmd_galois(args):
    cs = io.load_crossed(args.file, _field_arg(args.p))
    if not validate_crossed_system(cs).ok:
        raise InvalidCrossedSystem(validate_crossed_system(cs))
    G = galois_group(cs, force=args.force)
    out = {"order": G.order, "elements": [io.pair_to_json(g) for g in G.elements],
           "cayley_table": G.cayley_table(), "group_axioms": G.check_group()}
    ok = all(out["group_axioms"].values())
    if args.verify_iso:
        rep = verify_galois_isomorphism(cs, force=args.force, group=G)
        out["isomorphism"] = {k: v for k, v in rep.items() if k != "group_axioms"}
        ok = ok and rep["ok"]
    _emit(out)
    if not ok:
        raise _Falsity


def cmd_classify(args):
    _field_arg(args.p)
    rep = classify(args.dim, args.p, args.method, force=args.force)
    _emit(io.classification_to_json(rep))


# -- parser -------------------------------------------------------------------

def _globals(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--force", action="store_true", default=d(False), help="override size guards")
    parser.add_argument("--threads", type=int, default=d(1), help="worker threads for enumerations")
    parser.add_argument("--seed", type=int, default=d(None), help="seed for sampled checks")
    parser.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)
    parser = argparse.ArgumentParser(prog="fouralg", description="4-algebras, crossed products and their cohomology over Q and F_p.")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="axiom report for an algebra file")
    p.add_argument("algebra")
    p.add_argument("--p", type=int, help="read scalars in F_p instead of the declared field")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("crossed", parents=[common], help="crossed-system operations")
    p.add_argument("action", choices=["validate", "product", "decompose", "oracle"])
    p.add_argument("file", help="crossed-system file (algebra file for decompose)")
    p.add_argument("--pi", help="projection matrix E -> A (JSON rows, inline or file)")
    p.add_argument("--s", help="linear section A -> E (JSON rows, inline or file)")
    p.add_argument("--derived", action="store_true", help="decompose along E -> E/E'")
    p.add_argument("--p", type=int)
    p.set_defaults(func=cmd_crossed)

    p = sub.add_parser("cohomology", parents=[common], help="classifying objects")
    p.add_argument("what", choices=["gh2", "h2nab", "h2action", "h2lambda", "cf", "ct", "metabelian"])
    p.add_argument("--A", help="algebra file for A")
    p.add_argument("--V", help="algebra file for (V, multV)")
    p.add_argument("--vdim", type=int)
    p.add_argument("--adim", type=int, help="dim A for metabelian")
    p.add_argument("--act", help="dense act tensor n x m x m (JSON, inline or file)")
    p.add_argument("--lam", help="functional lambda (JSON list)")
    p.add_argument("--p", type=int, help="prime (0 for Q where allowed)")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("galois", parents=[common], help="Galois group of V # A over V")
    p.add_argument("file")
    p.add_argument("--verify-iso", action="store_true")
    p.add_argument("--p", type=int)
    p.set_defaults(func=cmd_galois)

    p = sub.add_parser("classify", parents=[common], help="isomorphism classes over F_p")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--method", choices=["brute", "twisted", "naive"], default="brute")
    p.set_defaults(func=cmd_classify)
    return parser


_REQUIRED = {"gh2": ("A", "vdim"), "h2nab": ("A", "V"), "h2action": ("A", "vdim", "act"),
             "h2lambda": ("A", "lam"), "cf": ("A",), "metabelian": ("adim", "vdim")}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.seed is not None:
        random.seed(args.seed)
    if args.command == "cohomology":
        missing = [k for k in _REQUIRED.get(args.what, ()) if getattr(args, k) is None]
        if missing:
            parser.error(f"cohomology {args.what} needs " + ", ".join("--" + k for k in missing))
    if args.force:
        log.warning("size guards disabled by --force")
    try:
        args.func(args)
    except _Falsity:
        return EXIT_FALSE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedOverRationals as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuard as exc:
        print(json.dumps({"error": "size guard", "what": exc.what, "cost": exc.cost, "budget": exc.budget}),
              file=sys.stderr)
        return EXIT_GUARD
    except InvalidCrossedSystem as exc:
        print(json.dumps({"error": "invalid crossed system", "report": exc.report.as_dict()}), file=sys.stderr)
        return EXIT_FALSE
    except (FourAlgError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
