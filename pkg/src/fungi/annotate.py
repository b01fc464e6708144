"""Erasure and re-annotation of bidirectionally typed programs.

An annotated term is split into its erasure and a site table: for each
position of the erased tree (a path of child indices) the annotation layers
that were stripped there.  `annotate` puts them back, so
``annotate(erase(t), annotations(t)) == t`` and ``erase(annotate(u, s)) == u``.

Annotations are expected only where a redex needs them: at declaration
roots, at quantifier eliminations (instantiating a definition before it is
forced), on the index parts of data introductions and eliminations, and as
``(v : A)`` / ``(e : E)`` around an introduction form that is immediately
eliminated.  `discipline_violations` lists sites that break this.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from . import names as N
from . import syntax as S

_WRAPPERS = (S.Anno, S.VInst, S.EAnno, S.EInstIdx, S.EInstTy)
_INTROS = (S.Lam, S.Ret, S.PairV, S.Inj, S.Pack, S.Con, S.Thunk, S.ThunkV, S.RefV,
           S.UnitV, S.NameV, S.NameFnV, S.NatV)


@dataclass(frozen=True)
class Site:
    """Annotation layers at one position, outermost first, plus stripped index parts."""
    layers: tuple = ()
    local: tuple = None


def _peel(node):
    layers = []
    while isinstance(node, _WRAPPERS):
        if isinstance(node, S.Anno):
            layers.append(("anno", node.t))
            node = node.v
        elif isinstance(node, S.VInst):
            layers.append(("vinst", node.i))
            node = node.v
        elif isinstance(node, S.EAnno):
            layers.append(("eanno", node.t))
            node = node.e
        elif isinstance(node, S.EInstIdx):
            layers.append(("inst", node.i))
            node = node.e
        else:
            layers.append(("inst_ty", node.t))
            node = node.e
    return tuple(layers), node


def _local(node):
    if isinstance(node, S.Con) and node.idx:
        return ("con", node.idx)
    if isinstance(node, S.Arm) and node.idx:
        return ("arm", node.idx)
    if isinstance(node, S.Pack) and node.i is not None:
        return ("pack", node.i)
    return None


def annotations(node):
    """The site table of an annotated term, keyed by paths in its erasure."""
    table = {}

    def go(x, path):
        layers, x = _peel(x)
        local = _local(x)
        if layers or local:
            table[path] = Site(layers, local)
        for k, c in enumerate(S.children(x)):
            go(c, path + (k,))

    go(node, ())
    return table


def annotate(node, table):
    """Re-insert the layers of a site table into an erased term."""

    def go(x, path):
        counter = iter(range(len(S.children(x))))
        x = S._map_children(x, lambda c: go(c, path + (next(counter),)))
        site = table.get(path)
        if site is None:
            return x
        if site.local is not None:
            kind, val = site.local
            if kind == "pack":
                x = replace(x, i=val)
            else:
                x = replace(x, idx=val)
        for kind, val in reversed(site.layers):
            x = _wrap(kind, val, x)
        return x

    return go(node, ())


def _wrap(kind, val, x):
    if kind == "anno":
        return S.Anno(x, val, span=x.span)
    if kind == "vinst":
        return S.VInst(x, val, span=x.span)
    if kind == "eanno":
        return S.EAnno(x, val, span=x.span)
    if kind == "inst":
        return S.EInstIdx(x, val, span=x.span)
    return S.EInstTy(x, val, span=x.span)


def _principal(parent):
    """The child position a parent eliminates, or None."""
    if isinstance(parent, (S.App, S.Force, S.Split, S.Case, S.If, S.Match, S.Unpack, S.Get)):
        return 0
    return None


def discipline_violations(erased, table):
    """Sites whose annotations are not required by a redex."""
    out = []

    def go(x, path, parent, pos):
        site = table.get(path)
        if site is not None and not _allowed(x, site, parent, pos, path):
            out.append(path)
        for k, c in enumerate(S.children(x)):
            go(c, path + (k,), x, k)

    go(erased, (), None, None)
    return out


def _allowed(x, site, parent, pos, path):
    if site.local is not None and not isinstance(x, (S.Con, S.Arm, S.Pack)):
        return False
    for kind, _ in site.layers:
        if kind in ("inst", "inst_ty", "vinst"):
            # quantifier elimination: the instantiated term is forced or applied
            if not isinstance(x, (S.Force, S.Var, S.DefV)):
                return False
        elif path == ():
            continue
        elif not (isinstance(x, _INTROS) and pos is not None and pos == _principal(parent)):
            return False
    return True


# ---------------------------------------------------------------- programs

@dataclass(frozen=True)
class ProgramAnnotations:
    """Declaration-root types and per-declaration site tables."""
    roots: dict
    sites: dict


def _key(d):
    if isinstance(d, S.DefDecl):
        return "def " + d.name
    if isinstance(d, S.CellDecl):
        return "cell " + N.show_name(d.loc)
    return "main"


def _body(d):
    return d.v if isinstance(d, S.CellDecl) else d.e


def _with_body(d, body, t):
    if isinstance(d, S.CellDecl):
        return replace(d, v=body, t=t)
    return replace(d, e=body, t=t)


def _bodied(program):
    out = [d for d in program.decls if isinstance(d, (S.DefDecl, S.CellDecl))]
    if program.main is not None:
        out.append(program.main)
    return out


def program_annotations(program):
    roots, sites = {}, {}
    for d in _bodied(program):
        roots[_key(d)] = d.t
        sites[_key(d)] = annotations(_body(d))
    return ProgramAnnotations(roots, sites)


def erase_program(program):
    """Drop declaration types and erase every body."""
    return _rebuild(program, lambda d: _with_body(d, S.erase(_body(d)), None))


def annotate_program(program, ann):
    return _rebuild(program, lambda d: _with_body(
        d, annotate(_body(d), ann.sites.get(_key(d), {})), ann.roots.get(_key(d))))


def _rebuild(program, f):
    decls = tuple(f(d) if isinstance(d, (S.DefDecl, S.CellDecl)) else d for d in program.decls)
    main = f(program.main) if program.main is not None else None
    return S.Program(decls, main)


def program_violations(program):
    """Annotation sites of a program that no redex requires, as (decl, path)."""
    out = []
    for d in _bodied(program):
        body = _body(d)
        for path in discipline_violations(S.erase(body), annotations(body)):
            out.append((_key(d), path))
    return out


def synthesize_program(program):
    """Synthesize each definition and main as ``(e : E)``; returns {key: type}.

    Raises CheckError if some declaration fails.
    """
    from . import types as T
    from .context import IdxVar
    from .typecheck import Checker, build_env, check_datatypes
    env = build_env(program)
    chk = Checker(env)
    ctx = env.base_ctx()
    check_datatypes(env, ctx)
    out = {}
    for f, body in env.def_bodies.items():
        inner = ctx.add(IdxVar(T.NS, N.NM_FN))
        out["def " + f] = chk.synth_comp(inner, N.NVar(T.NS), S.EAnno(body, env.def_types[f].e))
    if program.main is not None:
        t = env.expand_type(program.main.t)
        out["main"] = chk.synth_comp(ctx, N.IDENTITY, S.EAnno(env.expand_node(program.main.e), t))
    return out
