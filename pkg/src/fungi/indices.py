"""Index terms: name-set expressions, their sorts, reduction and normal forms.

Name-sorted index variables are represented as name-term variables, so an
index term never contains a bare Var of sort Nm; name terms enter the index
language through singletons, maps, and the IName embedding.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import names as N
from .names import (NM, NLam, NLit, NVar, NApp, NBin, NmArrow, SortError,
                    free_vars as nfree, is_name_sort)


# ---------------------------------------------------------------- sorts

@dataclass(frozen=True)
class NmSet:
    def __str__(self):
        return "NmSet"


@dataclass(frozen=True)
class UnitSort:
    def __str__(self):
        return "Unit"


@dataclass(frozen=True)
class Product:
    s1: object
    s2: object

    def __str__(self):
        return "(%s x %s)" % (self.s1, self.s2)


@dataclass(frozen=True)
class IdxArrow:
    s1: object
    s2: object

    def __str__(self):
        d = str(self.s1)
        if isinstance(self.s1, (IdxArrow, NmArrow)):
            d = "(" + d + ")"
        return d + " => " + str(self.s2)


NMSET = NmSet()
UNIT_SORT = UnitSort()


def show_sort(s):
    if isinstance(s, NmArrow):
        return str(s)
    return str(s)


def arrow_sort(dom, cod):
    """Nm -> Nm is a name sort; every other arrow is an index arrow."""
    if is_name_sort(dom) and is_name_sort(cod):
        return NmArrow(dom, cod)
    return IdxArrow(dom, cod)


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class IVar:
    a: str


@dataclass(frozen=True)
class ISingle:
    m: object


@dataclass(frozen=True)
class IEmpty:
    pass


@dataclass(frozen=True)
class ISep:
    x: object
    y: object


@dataclass(frozen=True)
class IUnion:
    x: object
    y: object


@dataclass(frozen=True)
class IUnit:
    pass


@dataclass(frozen=True)
class IPair:
    i1: object
    i2: object


@dataclass(frozen=True)
class IProj:
    side: int
    i: object


@dataclass(frozen=True)
class ILam:
    a: str
    sort: object
    body: object


@dataclass(frozen=True)
class IApp:
    fn: object
    arg: object


@dataclass(frozen=True)
class IMap:
    m: object
    x: object


@dataclass(frozen=True)
class IFlatMap:
    fn: object
    x: object


@dataclass(frozen=True)
class IStar:
    fn: object
    x: object


@dataclass(frozen=True)
class IName:
    """A name term used at index level (sort Nm or Nm -> Nm)."""
    m: object


EMPTY = IEmpty()
INDEX_TYPES = (IVar, ISingle, IEmpty, ISep, IUnion, IUnit, IPair, IProj, ILam,
               IApp, IMap, IFlatMap, IStar, IName)


def is_index(x):
    return isinstance(x, INDEX_TYPES)


# ---------------------------------------------------------------- printing

def show(i, prec=0):
    """Concrete syntax. prec: 0 top, 1 union operand, 2 application operand."""
    t = N.show_term
    if isinstance(i, IVar):
        return i.a
    if isinstance(i, IEmpty):
        return "0"
    if isinstance(i, IUnit):
        return "unit"
    if isinstance(i, ISingle):
        return "{" + t(i.m) + "}"
    if isinstance(i, IName):
        return "<" + t(i.m) + ">"
    if isinstance(i, (ISep, IUnion)):
        op = " % " if isinstance(i, ISep) else " + "
        s = show(i.x, 1) + op + show(i.y, 2)
        return "(" + s + ")" if prec > 1 else s
    if isinstance(i, IPair):
        return "(" + show(i.i1) + ", " + show(i.i2) + ")"
    if isinstance(i, IProj):
        s = "prj%d %s" % (i.side, show(i.i, 3))
        return "(" + s + ")" if prec > 2 else s
    if isinstance(i, ILam):
        ann = "" if i.sort is None else ":" + show_sort_syntax(i.sort)
        s = "#" + i.a + ann + ". " + show(i.body)
        return "(" + s + ")" if prec > 0 else s
    if isinstance(i, IApp):
        s = show(i.fn, 2) + " " + show(i.arg, 3)
        return "(" + s + ")" if prec > 2 else s
    if isinstance(i, IMap):
        return _fn_head(t(i.m, 2), i.m) + "[[" + show(i.x) + "]]"
    if isinstance(i, IFlatMap):
        pw = as_pointwise(i)
        if pw is not None:
            s = show(pw[0], 2) + " @@ " + show(pw[1], 2)
            return "(" + s + ")" if prec > 1 else s
        return _idx_head(i.fn) + "[[" + show(i.x) + "]]"
    if isinstance(i, IStar):
        return _idx_head(i.fn) + "*[[" + show(i.x) + "]]"
    raise TypeError(i)


def _fn_head(s, m):
    if isinstance(m, (NVar,)) or s.startswith("("):
        return s
    return "(" + s + ")"


def _idx_head(fn):
    s = show(fn, 3)
    if isinstance(fn, (IVar, IName)) or s.startswith("("):
        return s
    return "(" + s + ")"


def show_sort_syntax(s):
    if isinstance(s, NmArrow):
        d = show_sort_syntax(s.dom)
        if isinstance(s.dom, (NmArrow, IdxArrow)):
            d = "(" + d + ")"
        return d + " -> " + show_sort_syntax(s.cod)
    if isinstance(s, IdxArrow):
        d = show_sort_syntax(s.s1)
        if isinstance(s.s1, (NmArrow, IdxArrow)):
            d = "(" + d + ")"
        return d + " -> " + show_sort_syntax(s.s2)
    if isinstance(s, Product):
        return "(" + show_sort_syntax(s.s1) + " x " + show_sort_syntax(s.s2) + ")"
    return str(s)


# ---------------------------------------------------------------- variables

def free_vars(i):
    """Free variables of an index (a fresh set; the result is cached on the node)."""
    return set(_fvs(i))


def _fvs(i):
    fv = i.__dict__.get("_fv")
    if fv is None:
        fv = frozenset(_free_vars(i))
        i.__dict__["_fv"] = fv
    return fv


def _free_vars(i):
    if isinstance(i, IVar):
        return {i.a}
    if isinstance(i, (ISingle, IName)):
        return nfree(i.m)
    if isinstance(i, (IEmpty, IUnit)):
        return set()
    if isinstance(i, (ISep, IUnion)):
        return free_vars(i.x) | free_vars(i.y)
    if isinstance(i, IPair):
        return free_vars(i.i1) | free_vars(i.i2)
    if isinstance(i, IProj):
        return free_vars(i.i)
    if isinstance(i, ILam):
        return free_vars(i.body) - {i.a}
    if isinstance(i, IApp):
        return free_vars(i.fn) | free_vars(i.arg)
    if isinstance(i, IMap):
        return nfree(i.m) | free_vars(i.x)
    if isinstance(i, (IFlatMap, IStar)):
        return free_vars(i.fn) | free_vars(i.x)
    raise TypeError(i)


def _name_env(env):
    """Project an index substitution onto name terms."""
    out = {}
    for k, v in env.items():
        if isinstance(v, IName):
            out[k] = v.m
        elif isinstance(v, IVar):
            out[k] = NVar(v.a)
    return out


def subst(i, env):
    """Capture-avoiding substitution; env maps variables to index terms.

    Name-sorted variables must be mapped to IName(m) (or IVar for renaming).
    """
    if not env:
        return i
    fv = _fvs(i)
    if not any(k in fv for k in env):
        return i
    nenv = _name_env(env)
    if isinstance(i, IVar):
        v = env.get(i.a)
        if v is None:
            return i
        return v
    if isinstance(i, ISingle):
        return ISingle(N.subst_many(i.m, nenv))
    if isinstance(i, IName):
        return IName(N.subst_many(i.m, nenv))
    if isinstance(i, (IEmpty, IUnit)):
        return i
    if isinstance(i, ISep):
        return ISep(subst(i.x, env), subst(i.y, env))
    if isinstance(i, IUnion):
        return IUnion(subst(i.x, env), subst(i.y, env))
    if isinstance(i, IPair):
        return IPair(subst(i.i1, env), subst(i.i2, env))
    if isinstance(i, IProj):
        return IProj(i.side, subst(i.i, env))
    if isinstance(i, IApp):
        return IApp(subst(i.fn, env), subst(i.arg, env))
    if isinstance(i, IMap):
        return IMap(N.subst_many(i.m, nenv), subst(i.x, env))
    if isinstance(i, IFlatMap):
        return IFlatMap(subst(i.fn, env), subst(i.x, env))
    if isinstance(i, IStar):
        return IStar(subst(i.fn, env), subst(i.x, env))
    if isinstance(i, ILam):
        inner = {k: v for k, v in env.items() if k != i.a}
        if not inner:
            return i
        fv = set()
        body_fv = free_vars(i.body)
        for k, v in inner.items():
            if k in body_fv:
                fv |= free_vars(v) if is_index(v) else nfree(v)
        if i.a in fv:
            b = N.fresh(i.a, fv | body_fv | set(inner))
            ren = IVar(b) if not _is_name_binder(i) else IName(NVar(b))
            body = subst(i.body, {i.a: ren})
            return ILam(b, i.sort, subst(body, inner))
        return ILam(i.a, i.sort, subst(i.body, inner))
    raise TypeError(i)


def _is_name_binder(lam):
    return lam.sort is None or is_name_sort(lam.sort)


# ---------------------------------------------------------------- sorting

class IndexSortError(SortError):
    pass


class ApartnessObligationFailed(IndexSortError):
    """A separating union whose operands could not be shown apart."""

    def __init__(self, x, y, verdict=None, ctx=None):
        self.x, self.y, self.verdict, self.ctx = x, y, verdict, ctx
        super().__init__("apartness obligation failed: %s ## %s : NmSet" % (show(x), show(y)))


@dataclass
class SortCtx:
    """Variable sorts plus the propositions in scope (for sort-sep-union)."""
    sorts: dict = field(default_factory=dict)
    props: tuple = ()
    defs: object = None

    def extend(self, a, s):
        d = dict(self.sorts)
        d[a] = s
        return SortCtx(d, self.props, self.defs)

    def assume(self, p):
        return SortCtx(self.sorts, self.props + (p,), self.defs)


def _as_sortctx(ctx):
    if isinstance(ctx, SortCtx):
        return ctx
    if ctx is None:
        return SortCtx()
    if isinstance(ctx, dict):
        return SortCtx(dict(ctx))
    if hasattr(ctx, "sort_ctx"):
        return ctx.sort_ctx()
    raise TypeError(ctx)


def sort_index(ctx, i, expected=None, apart=None):
    """Sort of index i (rules sort-var through sort-star).

    `apart(sctx, x, y)` decides the sort-sep-union premise; by default the
    decision procedures of the relations module are used.
    """
    sctx = _as_sortctx(ctx)
    return _sort(sctx, i, expected, apart or _default_apart)


def _default_apart(sctx, x, y):
    from . import relations
    return relations.sepunion_premise(sctx, x, y)


def _name_ctx(sctx):
    return {k: v for k, v in sctx.sorts.items() if is_name_sort(v)}


def _check_set(sctx, i, apart):
    s = _sort(sctx, i, NMSET, apart)
    if s != NMSET:
        raise IndexSortError("expected NmSet, found %s for %s" % (s, show(i)))


def _sort(sctx, i, expected, apart):
    if isinstance(i, IVar):
        if i.a not in sctx.sorts:
            raise IndexSortError("unbound index variable %s" % i.a)
        s = sctx.sorts[i.a]
        if is_name_sort(s):
            return s
        return _expect(s, expected, i)
    if isinstance(i, IName):
        nctx = _name_ctx(sctx)
        if expected is not None and is_name_sort(expected):
            N.check_name_sort(nctx, i.m, expected)
            return expected
        return _expect(N.sort_name_term(nctx, i.m), expected, i)
    if isinstance(i, IEmpty):
        return _expect(NMSET, expected, i)
    if isinstance(i, IUnit):
        return _expect(UNIT_SORT, expected, i)
    if isinstance(i, ISingle):
        N.check_name_sort(_name_ctx(sctx), i.m, NM)
        return _expect(NMSET, expected, i)
    if isinstance(i, (ISep, IUnion)):
        _check_set(sctx, i.x, apart)
        _check_set(sctx, i.y, apart)
        if isinstance(i, ISep):
            verdict = apart(sctx, i.x, i.y)
            if not _proven(verdict):
                raise ApartnessObligationFailed(i.x, i.y, verdict, sctx)
        return _expect(NMSET, expected, i)
    if isinstance(i, IPair):
        e1 = e2 = None
        if isinstance(expected, Product):
            e1, e2 = expected.s1, expected.s2
        return _expect(Product(_sort(sctx, i.i1, e1, apart), _sort(sctx, i.i2, e2, apart)), expected, i)
    if isinstance(i, IProj):
        s = _sort(sctx, i.i, None, apart)
        if not isinstance(s, Product):
            raise IndexSortError("projection from non-product sort %s" % s)
        return _expect(s.s1 if i.side == 1 else s.s2, expected, i)
    if isinstance(i, ILam):
        dom = i.sort
        cod_expected = None
        if isinstance(expected, (IdxArrow, NmArrow)):
            edom = expected.s1 if isinstance(expected, IdxArrow) else expected.dom
            ecod = expected.s2 if isinstance(expected, IdxArrow) else expected.cod
            if dom is None:
                dom = edom
            elif dom != edom:
                raise IndexSortError("lambda domain %s does not match %s" % (dom, edom))
            cod_expected = ecod
        if dom is None:
            dom = NM
        cod = _sort(sctx.extend(i.a, dom), i.body, cod_expected, apart)
        return _expect(arrow_sort(dom, cod), expected, i)
    if isinstance(i, IApp):
        f = _sort(sctx, i.fn, None, apart)
        if isinstance(f, IdxArrow):
            _sort(sctx, i.arg, f.s1, apart)
            return _expect(f.s2, expected, i)
        if isinstance(f, NmArrow):
            _sort(sctx, i.arg, f.dom, apart)
            return _expect(f.cod, expected, i)
        raise IndexSortError("application of non-function of sort %s" % f)
    if isinstance(i, IMap):
        N.check_name_sort(_name_ctx(sctx), i.m, N.NM_FN)
        _check_set(sctx, i.x, apart)
        return _expect(NMSET, expected, i)
    if isinstance(i, (IFlatMap, IStar)):
        f = _sort(sctx, i.fn, None, apart)
        ok = (f == IdxArrow(NM, NMSET)) or (isinstance(i, IStar) and f == N.NM_FN)
        if not ok:
            what = "flat-map" if isinstance(i, IFlatMap) else "star"
            raise IndexSortError("%s function has sort %s, expected Nm => NmSet" % (what, f))
        _check_set(sctx, i.x, apart)
        return _expect(NMSET, expected, i)
    raise IndexSortError("not an index: %r" % (i,))


def _expect(s, expected, i):
    if expected is not None and s != expected:
        raise IndexSortError("index %s has sort %s, expected %s" % (show(i), s, expected))
    return s


def _proven(v):
    if isinstance(v, bool):
        return v
    return getattr(v, "proven", False)


# ---------------------------------------------------------------- reduction

NO_REDEX = None


def as_index_fn(fn):
    """Coerce a name function used with star or flat-map to Nm => NmSet."""
    if isinstance(fn, IName):
        a = N.fresh("a", nfree(fn.m))
        return ILam(a, NM, ISingle(NApp(fn.m, NVar(a))))
    return fn


def _arg_for(lam, arg):
    if _is_name_binder(lam) and isinstance(arg, IVar) and lam.sort is not None and is_name_sort(lam.sort):
        return IName(NVar(arg.a))
    return arg


def reduce_index(i, injective=None):
    """One head step, or NO_REDEX.  Returns (rule name, result) or NO_REDEX."""
    inj = injective or N.is_injective_fn
    if isinstance(i, IProj) and isinstance(i.i, IPair):
        return ("reduce-proj", i.i.i1 if i.side == 1 else i.i.i2)
    if isinstance(i, IApp) and isinstance(i.fn, ILam):
        return ("reduce-app", subst(i.fn.body, {i.fn.a: _arg_for(i.fn, i.arg)}))
    if isinstance(i, IApp) and isinstance(i.fn, IName) and isinstance(i.arg, IName):
        return ("reduce-app", IName(N.normalize(NApp(i.fn.m, i.arg.m))))
    if isinstance(i, IMap):
        if isinstance(i.x, IEmpty):
            return ("reduce-map-empty", EMPTY)
        if isinstance(i.x, ISingle):
            return ("reduce-map-single", ISingle(N.normalize(NApp(i.m, i.x.m))))
        if isinstance(i.x, ISep):
            if inj(i.m):
                return ("reduce-map-sep", ISep(IMap(i.m, i.x.x), IMap(i.m, i.x.y)))
            return ("reduce-map-union", IUnion(IMap(i.m, i.x.x), IMap(i.m, i.x.y)))
        if isinstance(i.x, IUnion):
            return ("reduce-map-union", IUnion(IMap(i.m, i.x.x), IMap(i.m, i.x.y)))
    if isinstance(i, IFlatMap):
        fn = i.fn
        if isinstance(fn, IName):
            return ("flatmap-name", IMap(fn.m, i.x))
        if isinstance(i.x, IEmpty):
            return ("flatmap-empty", EMPTY)
        if isinstance(i.x, ISingle):
            return ("flatmap-single", IApp(fn, IName(i.x.m)))
        if isinstance(i.x, (ISep, IUnion)):
            return ("flatmap-union", IUnion(IFlatMap(fn, i.x.x), IFlatMap(fn, i.x.y)))
    return NO_REDEX


def kleene_outer(i):
    """reduce-kleene-outer as stated: M*[[j]] --> M[[M*[[j]]]] (never auto-fired)."""
    if not isinstance(i, IStar):
        return NO_REDEX
    fn = i.fn
    if isinstance(fn, IName):
        return IMap(fn.m, i)
    return IFlatMap(fn, i)


def kleene_inner(i):
    """reduce-kleene-inner as stated: M*[[j]] --> M*[[M[[j]]]] (never auto-fired)."""
    if not isinstance(i, IStar):
        return NO_REDEX
    fn = i.fn
    step = IMap(fn.m, i.x) if isinstance(fn, IName) else IFlatMap(fn, i.x)
    return IStar(fn, step)


def unfold_star(i):
    """Extension-preserving unfolding used by bounded queries: F*[[X]] = X + F*[[F[[X]]]]."""
    if not isinstance(i, IStar):
        return NO_REDEX
    return IUnion(i.x, kleene_inner(i))


def normalize_index(i, star_depth=3, defs=None, trace=None):
    """Normal form under the congruence closure of the non-Kleene reductions.

    Star nodes are preserved symbolically.  `star_depth` is accepted for
    interface symmetry with membership and the oracle, which unfold stars.
    """
    if defs is not None:
        i = defs.expand_index(i)
    if trace is not None:
        return _normalize(i, trace)
    nf = i.__dict__.get("_nf")
    if nf is None:
        nf = _normalize(i, None)
        i.__dict__["_nf"] = nf
        nf.__dict__["_nf"] = nf
    return nf


def _normalize(i, trace):
    while True:
        i = _norm_children(i, trace)
        r = reduce_index(i)
        if r is NO_REDEX:
            return i
        if trace is not None:
            trace.append(r[0])
        i = r[1]


def _norm_children(i, trace):
    if isinstance(i, ISingle):
        return ISingle(N.normalize(i.m))
    if isinstance(i, IName):
        return IName(N.normalize(i.m))
    if isinstance(i, ISep):
        return ISep(_normalize(i.x, trace), _normalize(i.y, trace))
    if isinstance(i, IUnion):
        return IUnion(_normalize(i.x, trace), _normalize(i.y, trace))
    if isinstance(i, IPair):
        return IPair(_normalize(i.i1, trace), _normalize(i.i2, trace))
    if isinstance(i, IProj):
        return IProj(i.side, _normalize(i.i, trace))
    if isinstance(i, ILam):
        return ILam(i.a, i.sort, _normalize(i.body, trace))
    if isinstance(i, IApp):
        return IApp(_normalize(i.fn, trace), _normalize(i.arg, trace))
    if isinstance(i, IMap):
        return IMap(N.normalize(i.m), _normalize(i.x, trace))
    if isinstance(i, IFlatMap):
        return IFlatMap(_normalize(i.fn, trace), _normalize(i.x, trace))
    if isinstance(i, IStar):
        return IStar(_normalize(i.fn, trace), _normalize(i.x, trace))
    return i


def is_normal(i):
    return normalize_index(i) == i


def name_literals(i, acc=None):
    """Atoms (Sym/Num/Leaf) occurring in literal names inside an index."""
    acc = set() if acc is None else acc
    if isinstance(i, (ISingle, IName)):
        _term_atoms(i.m, acc)
    elif isinstance(i, IMap):
        _term_atoms(i.m, acc)
        name_literals(i.x, acc)
    elif isinstance(i, (ISep, IUnion)):
        name_literals(i.x, acc)
        name_literals(i.y, acc)
    elif isinstance(i, IPair):
        name_literals(i.i1, acc)
        name_literals(i.i2, acc)
    elif isinstance(i, IProj):
        name_literals(i.i, acc)
    elif isinstance(i, ILam):
        name_literals(i.body, acc)
    elif isinstance(i, IApp):
        name_literals(i.fn, acc)
        name_literals(i.arg, acc)
    elif isinstance(i, (IFlatMap, IStar)):
        name_literals(i.fn, acc)
        name_literals(i.x, acc)
    return acc


def _term_atoms(m, acc):
    if isinstance(m, NLit):
        N.name_atoms(m.n, acc)
    elif isinstance(m, NBin):
        _term_atoms(m.m1, acc)
        _term_atoms(m.m2, acc)
    elif isinstance(m, NLam):
        _term_atoms(m.body, acc)
    elif isinstance(m, NApp):
        _term_atoms(m.fn, acc)
        _term_atoms(m.arg, acc)


# ---------------------------------------------------------------- set algebra helpers

def union_all(parts, sep=False):
    parts = [p for p in parts if not isinstance(p, IEmpty)]
    if not parts:
        return EMPTY
    out = parts[0]
    for p in parts[1:]:
        out = ISep(out, p) if sep else IUnion(out, p)
    return out


def pointwise(x, y):
    """X @@ Y: every <a, b> with a in X and b in Y."""
    fv = free_vars(x) | free_vars(y)
    a = _plain_fresh("a", fv)
    b = _plain_fresh("b", fv | {a})
    return IFlatMap(ILam(a, NM, IMap(NLam(b, NBin(NVar(a), NVar(b))), y)), x)


def _plain_fresh(base, avoid):
    k = 0
    cand = base
    while cand in avoid:
        k += 1
        cand = "%s%d" % (base, k)
    return cand


def as_pointwise(i):
    """(X, Y) when i has the shape produced by pointwise, else None."""
    if not (isinstance(i, IFlatMap) and isinstance(i.fn, ILam) and is_name_sort(i.fn.sort or NM)):
        return None
    body = i.fn.body
    if not (isinstance(body, IMap) and isinstance(body.m, NLam)):
        return None
    lam = body.m
    if lam.body == NBin(NVar(i.fn.a), NVar(lam.a)) and i.fn.a not in free_vars(body.x) and i.fn.sort is not None:
        return i.x, body.x
    return None


def member(ctx, m, x, star_depth=3, search_depth=64):
    """Three-valued membership of name term m in set x."""
    from . import relations
    return relations.member(ctx, m, x, star_depth=star_depth, search_depth=search_depth)
