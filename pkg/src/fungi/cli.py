"""Command line: check, run, audit and solve.

Exit codes: 0 success, 1 check/audit failure (or a malformed input), 2 usage.
Diagnostics go to stderr as ``file:line:col: error: message``.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import replace

from . import derivation
from . import indices as I
from . import names as N
from . import relations as R
from . import syntax as S
from . import types as T
from .parser import ParseError, parse_obligation, parse_program

OK, FAIL, USAGE = 0, 1, 2

_NAMES = (N.Leaf, N.Bin, N.Sym, N.Num)
_TERMS = (N.NLit, N.NBin, N.NVar, N.NLam, N.NApp)


class Usage(Exception):
    pass


def _read(path):
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    try:
        with open(path, encoding="utf-8") as f:
            return f.read(), path
    except OSError as exc:
        raise Usage("cannot read %s: %s" % (path, exc.strerror))


def _diag(span, msg, file):
    where = str(span) if span is not None else "%s:1:1" % file
    print("%s: error: %s" % (where, msg), file=sys.stderr)


def _report(exc, file):
    _diag(getattr(exc, "span", None), str(exc), file)
    ob = getattr(exc, "obligation", None)
    if ob:
        print("  obligation: %s" % _show_obligation(ob), file=sys.stderr)


def _show_obligation(ob):
    if isinstance(ob, tuple) and len(ob) == 3:
        op = {"apart": "##", "equiv": "==", "subset": "<="}.get(ob[0], ob[0])
        return "%s %s %s" % (show(ob[1]), op, show(ob[2]))
    return show(ob)


# ---------------------------------------------------------------- printing

def show(x):
    """Printable text (or nested JSON data) for any artifact value."""
    from .dynamics import Data, DynIn, DynOut, Susp
    from .printer import show_term_any
    if x is None:
        return None
    if isinstance(x, str):
        return x
    if isinstance(x, DynIn):
        return {"store": x.store, "ns": N.show_term(x.ns), "node": N.show_name(x.node),
                "e": show(x.e)}
    if isinstance(x, DynOut):
        return {"store": x.store, "t": show(x.t)}
    if isinstance(x, Data):
        return show(x.v)
    if isinstance(x, Susp):
        return "susp %s in %s" % (show(x.e), N.show_term(x.scope))
    if isinstance(x, _NAMES):
        return N.show_name(x)
    if isinstance(x, _TERMS):
        return N.show_term(x)
    if I.is_index(x):
        return I.show(x)
    if isinstance(x, S.VALUES + S.EXPRS + (S.Arm,)):
        return show_term_any(x)
    if isinstance(x, tuple):
        return [show(y) for y in x]
    try:
        return T.show_any_type(x)
    except (TypeError, AttributeError):
        return str(x)


def _names(xs):
    return sorted((N.show_name(x) for x in xs))


def _emit(path, doc):
    if path:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=1, ensure_ascii=False)
            f.write("\n")


# ---------------------------------------------------------------- subcommands

def _parse(args):
    text, file = _read(args.file)
    return parse_program(text, file), file


def _check(program, args, record=False):
    from .typecheck import check_program
    return check_program(program, record, args.search_depth, args.star_depth)


def cmd_check(args):
    try:
        program, file = _parse(args)
        chk, env = _check(program, args, record=bool(args.emit_derivation))
    except (ParseError, T.TypeError_) as exc:
        _report(exc, args.file)
        return FAIL
    _emit(args.emit_derivation, derivation.document("typing", chk.rec.roots, show))
    for f in env.def_types:
        print("ok def %s" % f)
    if program.main is not None:
        print("ok main")
    return OK


def _hash(args):
    from .dynamics import HASHES
    return HASHES[args.hash]


def _randomized(program, seed):
    """Replace numeral literals in cell values by seeded random numerals."""
    if seed is None:
        return program
    rng = random.Random(seed)

    def nat(v):
        if isinstance(v, S.NatV):
            return S.NatV(rng.randrange(10), span=v.span)
        return S._map_children(v, nat)

    decls = tuple(replace(d, v=nat(d.v)) if isinstance(d, S.CellDecl) else d for d in program.decls)
    return S.Program(decls, program.main)


def _run(program, args):
    from .dynamics import run_program
    from .typecheck import build_env
    return run_program(program, build_env(program), hash_bit=_hash(args))


def cmd_run(args):
    from .dynamics import Stuck
    try:
        program, file = _parse(args)
        if program.main is None:
            raise Usage("%s has no main expression" % file)
        run = _run(_randomized(program, args.seed), args)
    except ParseError as exc:
        _report(exc, args.file)
        return FAIL
    except Stuck as exc:
        _report(exc, args.file)
        return FAIL
    _emit(args.emit_derivation, _run_document(run))
    print("terminal: %s" % show(run.terminal))
    print("store:")
    for p, entry in run.store.cells.items():
        print("  %s = %s" % (N.show_name(p), show(entry)))
    print("log:")
    for ev in run.store.events:
        print("  %s %s" % (ev.kind, N.show_name(ev.loc)))
    return OK


def _run_document(run):
    doc = derivation.document("evaluation", [run.deriv], show)
    doc["store"] = [{"kind": ev.kind, "loc": N.show_name(ev.loc), "entry": show(ev.entry)}
                    for ev in run.store.events]
    return doc


def cmd_audit(args):
    from .audit import subject_reduction_check
    from .dynamics import Stuck
    try:
        program, file = _parse(args)
    except ParseError as exc:
        _report(exc, args.file)
        return FAIL
    try:
        _check(program, args)
    except T.TypeError_ as exc:
        print("IMPRECISE")
        print("static: check failed")
        _report(exc, file)
        if program.main is None:
            _fuzz(program, args)
        return FAIL
    if program.main is None:
        # definitions only: look for an input on which they collide
        found = _fuzz(program, args)
        print("PRECISE" if found is None else "IMPRECISE")
        return OK if found is None else FAIL
    try:
        run = _run(_randomized(program, args.seed), args)
    except Stuck as exc:
        _report(exc, file)
        return FAIL
    _emit(args.emit_derivation, _run_document(run))
    eff_type = run.env.expand_type(program.main.t)
    res = subject_reduction_check(run, eff_type)
    rep = res.report
    print("PRECISE" if rep.precise and res.ok else "IMPRECISE")
    declared = program.main.t
    if isinstance(declared, T.WithEff):
        print("static writes: %s" % I.show(declared.eff.w))
        print("static reads: %s" % I.show(declared.eff.r))
    print("dynamic writes: %s" % ", ".join(_names(rep.writes)))
    print("dynamic reads: %s" % ", ".join(_names(rep.reads)))
    if res.counterexamples:
        print("diff:")
        for c in res.counterexamples:
            print("  %s" % c)
    else:
        print("diff: none")
    overwrites = run.store.overwrites()
    for ev in overwrites:
        print("overwrite: %s" % N.show_name(ev.loc))
    return OK if rep.precise and res.ok and not overwrites else FAIL


def _fuzz(program, args):
    """Adversarial 2-element inputs for a file defining `dedup`; prints a finding."""
    from .corpus import adversarial_search
    if "dedup" not in program.defs():
        return None
    text, _ = _read(args.file)
    order = None
    if args.seed is not None:
        order = random.Random(args.seed)
    found = adversarial_search(None, defs_text=text, hash_bit=_hash(args), shuffle=order)
    if found is None:
        print("dynamic: no collision over all 2-element inputs")
    else:
        print("dynamic: %s" % found)
    return found


def cmd_solve(args):
    text, file = _read(args.file)
    roots = []
    status = OK
    for k, line in enumerate(text.splitlines(), 1):
        src = line.strip()
        if not src or src.startswith("--"):
            continue
        try:
            o = parse_obligation(line, file, k)
        except ParseError as exc:
            _report(exc, file)
            status = FAIL
            continue
        ob = R.Obligation(R.relctx_of_sorts(o.sorts), o.kind, o.lhs, o.rhs, o.sort, o.props)
        res = R.decide(ob, search_depth=args.search_depth, star_depth=args.star_depth,
                       oracle_depth=args.oracle_depth, sorts=o.sorts)
        print(str(res))
        roots.append(derivation.Deriv(
            "solve", str(ob), res.status,
            [derivation.Deriv(r) for r in getattr(res, "trace", ())]))
    _emit(args.emit_derivation, derivation.document("solver", roots, show))
    return status


# ---------------------------------------------------------------- entry point

def parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--search-depth", type=int, default=R.DEFAULT_SEARCH_DEPTH)
    common.add_argument("--star-depth", type=int, default=R.DEFAULT_STAR_DEPTH)
    common.add_argument("--oracle-depth", type=int, default=R.DEFAULT_ORACLE_DEPTH)
    common.add_argument("--emit-derivation", metavar="PATH")
    common.add_argument("--seed", type=int, help="randomize run inputs")
    common.add_argument("--hash", choices=("mult", "example"), default="mult",
                        help="hash used by the hash_bit primitive")
    p = argparse.ArgumentParser(prog="fungi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    for name, fn, helptext in (("check", cmd_check, "type-check a program"),
                               ("run", cmd_run, "evaluate main and dump the store"),
                               ("audit", cmd_audit, "check, run and audit effects"),
                               ("solve", cmd_solve, "decide obligations, one per line")):
        sp = sub.add_parser(name, help=helptext, parents=[common])
        if name == "solve":
            sp.add_argument("file", nargs="?", default="-")
        else:
            sp.add_argument("file")
        sp.set_defaults(fn=fn)
    return p


def main(argv=None):
    p = parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    for flag in ("search_depth", "star_depth", "oracle_depth"):
        if getattr(args, flag) < 0:
            print("fungi: error: --%s must be non-negative" % flag.replace("_", "-"), file=sys.stderr)
            return USAGE
    try:
        return args.fn(args)
    except Usage as exc:
        print("fungi: error: %s" % exc, file=sys.stderr)
        return USAGE
    finally:
        T.configure(R.DEFAULT_SEARCH_DEPTH, R.DEFAULT_STAR_DEPTH)


if __name__ == "__main__":
    sys.exit(main())
