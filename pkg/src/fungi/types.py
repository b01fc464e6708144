"""Kinds, value/computation types, effects, well-formedness and subtyping."""
from __future__ import annotations

from dataclasses import dataclass

from . import indices as I
from . import names as N
from . import relations as R
from .context import (TT, Apart, Conj, Equiv, IdxVar, PropEntry, Tt, TyVar,
                      conjuncts, prop_free_vars, prop_subst, show_prop)
from .indices import EMPTY, IdxArrow, NMSET, Product, UnitSort
from .names import NM, NmArrow, SortError


class TypeError_(Exception):
    """A static error; `obligation` holds the blocking sub-goal when there is one."""

    def __init__(self, msg, obligation=None, span=None):
        super().__init__(msg)
        self.obligation = obligation
        self.span = span


class KindError(TypeError_):
    pass


class SubtypeError(TypeError_):
    pass


class EffectSeqError(TypeError_):
    """Sequencing undefined: kind is 'writes-overlap' or 'read-then-write'."""

    def __init__(self, kind, left, right, msg=None):
        what = "write/write overlap" if kind == "writes-overlap" else "read-before-write violation"
        super().__init__(msg or "%s: %s ## %s not derivable" % (what, I.show(left), I.show(right)),
                         ("apart", left, right))
        self.kind = kind
        self.left, self.right = left, right


# ---------------------------------------------------------------- kinds

@dataclass(frozen=True)
class KType:
    def __str__(self):
        return "Type"


@dataclass(frozen=True)
class KTypeArrow:
    k: object

    def __str__(self):
        return "Type => " + str(self.k)


@dataclass(frozen=True)
class KIndexArrow:
    sort: object
    k: object

    def __str__(self):
        s = I.show_sort_syntax(self.sort)
        if isinstance(self.sort, (NmArrow, IdxArrow)):
            s = "(" + s + ")"
        return s + " => " + str(self.k)


TYPE = KType()


# ---------------------------------------------------------------- value types

@dataclass(frozen=True)
class TVar:
    a: str


@dataclass(frozen=True)
class TCon:
    d: str


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class Sum:
    a: object
    b: object


@dataclass(frozen=True)
class Prod:
    a: object
    b: object


@dataclass(frozen=True)
class RefT:
    i: object
    a: object


@dataclass(frozen=True)
class ThkT:
    i: object
    e: object


@dataclass(frozen=True)
class IdxApp:
    a: object
    i: object


@dataclass(frozen=True)
class TypeApp:
    a: object
    b: object


@dataclass(frozen=True)
class NmT:
    i: object


@dataclass(frozen=True)
class NmFnT:
    m: object


@dataclass(frozen=True)
class AllIdx:
    a: str
    sort: object
    p: object
    t: object


@dataclass(frozen=True)
class ExistsIdx:
    a: str
    sort: object
    p: object
    t: object


UNIT = UnitT()
BOOL = Sum(UNIT, UNIT)


# ---------------------------------------------------------------- computation types

@dataclass(frozen=True)
class Lift:
    a: object


@dataclass(frozen=True)
class Arrow:
    a: object
    e: object


@dataclass(frozen=True)
class Effect:
    w: object = EMPTY
    r: object = EMPTY


PURE = Effect()


@dataclass(frozen=True)
class WithEff:
    c: object
    eff: object


@dataclass(frozen=True)
class AllType:
    a: str
    k: object
    e: object


@dataclass(frozen=True)
class AllIdxE:
    a: str
    sort: object
    p: object
    e: object


@dataclass(frozen=True)
class CtorSig:
    """forall quants. args -> result, for a datatype constructor."""
    quants: tuple
    args: tuple
    result: object


NS = "ns"
VALUE_TYPES = (TVar, TCon, UnitT, Sum, Prod, RefT, ThkT, IdxApp, TypeApp, NmT, NmFnT, AllIdx, ExistsIdx)
EFF_TYPES = (WithEff, AllType, AllIdxE)


# ---------------------------------------------------------------- printing

def show_type(t, prec=0):
    """prec: 0 top, 1 sum operand, 2 product operand, 3 application head/argument."""
    if isinstance(t, (TVar,)):
        return t.a
    if isinstance(t, TCon):
        return t.d
    if isinstance(t, UnitT):
        return "Unit"
    if t == BOOL:
        return "Bool"
    if isinstance(t, Sum):
        s = show_type(t.a, 2) + " + " + show_type(t.b, 1)
        return _paren(s, prec > 1)
    if isinstance(t, Prod):
        s = show_type(t.a, 3) + " x " + show_type(t.b, 2)
        return _paren(s, prec > 2)
    if isinstance(t, RefT):
        s = "Ref[" + I.show(t.i) + "] " + show_type(t.a, 4)
        return _paren(s, prec > 2)
    if isinstance(t, ThkT):
        s = "Thk[" + I.show(t.i) + "] " + show_eff_type(t.e, 1)
        return _paren(s, prec > 2)
    if isinstance(t, NmT):
        return "Nm[" + I.show(t.i) + "]"
    if isinstance(t, NmFnT):
        return "(Nm -> Nm)[" + N.show_term(t.m) + "]"
    if isinstance(t, IdxApp):
        return show_type(t.a, 3) + "[[" + I.show(t.i) + "]]"
    if isinstance(t, TypeApp):
        s = show_type(t.a, 3) + " (" + show_type(t.b) + ")"
        return _paren(s, prec > 3)
    if isinstance(t, (AllIdx, ExistsIdx)):
        q = "forall" if isinstance(t, AllIdx) else "exists"
        s = "%s %s:%s%s. %s" % (q, t.a, show_sort(t.sort), _show_guard(t.p), show_type(t.t))
        return _paren(s, prec > 0)
    raise TypeError("not a value type: %r" % (t,))


def _show_guard(p):
    return "" if isinstance(p, Tt) else " | " + show_prop(p)


def show_sort(s):
    s = I.show_sort_syntax(s)
    return "(" + s + ")" if "->" in s else s


def _paren(s, b):
    return "(" + s + ")" if b else s


def show_comp(c, prec=0):
    if isinstance(c, Lift):
        return _paren("F " + show_type(c.a, 4), prec > 0)
    if isinstance(c, Arrow):
        return _paren(show_type(c.a, 3) + " -> " + show_eff_type(c.e), prec > 0)
    raise TypeError("not a computation type: %r" % (c,))


def show_effect(e):
    return "<" + I.show(e.w) + "; " + I.show(e.r) + ">"


def show_eff_type(e, prec=0):
    if isinstance(e, WithEff):
        if e.eff == PURE:
            return show_comp(e.c, prec)
        return _paren(show_comp(e.c, 1) + " |> " + show_effect(e.eff), prec > 0)
    if isinstance(e, AllType):
        return _paren("forall %s:%s. %s" % (e.a, e.k, show_eff_type(e.e)), prec > 0)
    if isinstance(e, AllIdxE):
        return _paren("forall %s:%s%s. %s" % (e.a, show_sort(e.sort), _show_guard(e.p), show_eff_type(e.e)),
                      prec > 0)
    raise TypeError("not a type-with-effects: %r" % (e,))


def show_ctor_sig(sig):
    parts = []
    for a, sort, p in sig.quants:
        parts.append("forall %s:%s%s. " % (a, show_sort(sort), _show_guard(p)))
    body = " -> ".join([show_type(t, 3) for t in sig.args] + [show_type(sig.result, 3)])
    return "".join(parts) + body


def show_any_type(t):
    if isinstance(t, VALUE_TYPES):
        return show_type(t)
    if isinstance(t, EFF_TYPES):
        return show_eff_type(t)
    return show_comp(t)


# ---------------------------------------------------------------- free variables and substitution

def free_idx_vars(t):
    if isinstance(t, (TVar, TCon, UnitT)):
        return set()
    if isinstance(t, (Sum, Prod)):
        return free_idx_vars(t.a) | free_idx_vars(t.b)
    if isinstance(t, RefT):
        return I.free_vars(t.i) | free_idx_vars(t.a)
    if isinstance(t, ThkT):
        return I.free_vars(t.i) | free_idx_vars(t.e)
    if isinstance(t, NmT):
        return I.free_vars(t.i)
    if isinstance(t, NmFnT):
        return N.free_vars(t.m)
    if isinstance(t, IdxApp):
        return free_idx_vars(t.a) | I.free_vars(t.i)
    if isinstance(t, TypeApp):
        return free_idx_vars(t.a) | free_idx_vars(t.b)
    if isinstance(t, (AllIdx, ExistsIdx)):
        return (prop_free_vars(t.p) | free_idx_vars(t.t)) - {t.a}
    if isinstance(t, Lift):
        return free_idx_vars(t.a)
    if isinstance(t, Arrow):
        return free_idx_vars(t.a) | free_idx_vars(t.e)
    if isinstance(t, WithEff):
        return free_idx_vars(t.c) | I.free_vars(t.eff.w) | I.free_vars(t.eff.r)
    if isinstance(t, AllType):
        return free_idx_vars(t.e)
    if isinstance(t, AllIdxE):
        return (prop_free_vars(t.p) | free_idx_vars(t.e)) - {t.a}
    raise TypeError(t)


def _env_fv(env):
    out = set()
    for v in env.values():
        out |= I.free_vars(v) if I.is_index(v) else N.free_vars(v)
    return out


def _binder_value(a, sort):
    return I.IName(N.NVar(a)) if N.is_name_sort(sort) else I.IVar(a)


def subst_idx(t, env):
    """Substitute index variables (name-sorted ones map to IName) throughout a type."""
    if not env:
        return t
    s = lambda x: subst_idx(x, env)
    if isinstance(t, (TVar, TCon, UnitT)):
        return t
    if isinstance(t, Sum):
        return Sum(s(t.a), s(t.b))
    if isinstance(t, Prod):
        return Prod(s(t.a), s(t.b))
    if isinstance(t, RefT):
        return RefT(I.subst(t.i, env), s(t.a))
    if isinstance(t, ThkT):
        return ThkT(I.subst(t.i, env), s(t.e))
    if isinstance(t, NmT):
        return NmT(I.subst(t.i, env))
    if isinstance(t, NmFnT):
        return NmFnT(N.subst_many(t.m, I._name_env(env)))
    if isinstance(t, IdxApp):
        return IdxApp(s(t.a), I.subst(t.i, env))
    if isinstance(t, TypeApp):
        return TypeApp(s(t.a), s(t.b))
    if isinstance(t, Lift):
        return Lift(s(t.a))
    if isinstance(t, Arrow):
        return Arrow(s(t.a), s(t.e))
    if isinstance(t, WithEff):
        return WithEff(s(t.c), Effect(I.subst(t.eff.w, env), I.subst(t.eff.r, env)))
    if isinstance(t, AllType):
        return AllType(t.a, t.k, s(t.e))
    if isinstance(t, (AllIdx, ExistsIdx, AllIdxE)):
        body = t.t if isinstance(t, (AllIdx, ExistsIdx)) else t.e
        inner = {k: v for k, v in env.items() if k != t.a}
        if not inner:
            return t
        a, p = t.a, t.p
        if a in _env_fv(inner):
            b = N.fresh(a, _env_fv(inner) | free_idx_vars(body) | prop_free_vars(p) | set(inner))
            ren = {a: _binder_value(b, t.sort)}
            body = subst_idx(body, ren)
            p = prop_subst(p, ren)
            a = b
        return type(t)(a, t.sort, prop_subst(p, inner), subst_idx(body, inner))
    raise TypeError(t)


def subst_tvar(t, a, b):
    """Substitute value type b for type variable a."""
    s = lambda x: subst_tvar(x, a, b)
    if isinstance(t, TVar):
        return b if t.a == a else t
    if isinstance(t, (TCon, UnitT, NmT, NmFnT)):
        return t
    if isinstance(t, (Sum, Prod, TypeApp)):
        return type(t)(s(t.a), s(t.b))
    if isinstance(t, RefT):
        return RefT(t.i, s(t.a))
    if isinstance(t, ThkT):
        return ThkT(t.i, s(t.e))
    if isinstance(t, IdxApp):
        return IdxApp(s(t.a), t.i)
    if isinstance(t, (AllIdx, ExistsIdx)):
        return type(t)(t.a, t.sort, t.p, s(t.t))
    if isinstance(t, Lift):
        return Lift(s(t.a))
    if isinstance(t, Arrow):
        return Arrow(s(t.a), s(t.e))
    if isinstance(t, WithEff):
        return WithEff(s(t.c), t.eff)
    if isinstance(t, AllType):
        return t if t.a == a else AllType(t.a, t.k, s(t.e))
    if isinstance(t, AllIdxE):
        return AllIdxE(t.a, t.sort, t.p, s(t.e))
    raise TypeError(t)


def map_indices(t, f, fn_name=None):
    """Apply f to every index (and fn_name to every name term) in a type."""
    g = fn_name or (lambda m: m)
    s = lambda x: map_indices(x, f, fn_name)
    if isinstance(t, (TVar, TCon, UnitT)):
        return t
    if isinstance(t, (Sum, Prod, TypeApp)):
        return type(t)(s(t.a), s(t.b))
    if isinstance(t, RefT):
        return RefT(f(t.i), s(t.a))
    if isinstance(t, ThkT):
        return ThkT(f(t.i), s(t.e))
    if isinstance(t, NmT):
        return NmT(f(t.i))
    if isinstance(t, NmFnT):
        return NmFnT(g(t.m))
    if isinstance(t, IdxApp):
        return IdxApp(s(t.a), f(t.i))
    if isinstance(t, (AllIdx, ExistsIdx)):
        return type(t)(t.a, t.sort, _map_prop(t.p, f), s(t.t))
    if isinstance(t, Lift):
        return Lift(s(t.a))
    if isinstance(t, Arrow):
        return Arrow(s(t.a), s(t.e))
    if isinstance(t, WithEff):
        return WithEff(s(t.c), Effect(f(t.eff.w), f(t.eff.r)))
    if isinstance(t, AllType):
        return AllType(t.a, t.k, s(t.e))
    if isinstance(t, AllIdxE):
        return AllIdxE(t.a, t.sort, _map_prop(t.p, f), s(t.e))
    raise TypeError(t)


def _map_prop(p, f):
    if isinstance(p, Tt):
        return p
    if isinstance(p, Conj):
        return Conj(_map_prop(p.p1, f), _map_prop(p.p2, f))
    return type(p)(f(p.i), f(p.j), p.sort)


def normalize_type(t):
    return map_indices(t, I.normalize_index, N.normalize)


def instantiate_ns(e, m):
    """Eliminate a leading namespace quantifier with the current namespace m."""
    while isinstance(e, AllIdxE) and e.a == NS:
        e = subst_idx(e.e, {NS: I.IName(m)})
    return e


# ---------------------------------------------------------------- solver access

_SOLVERS = {}


def solver(ctx):
    key = (tuple(sorted(ctx.index_sorts().items(), key=lambda kv: kv[0])), ctx.props(), id(ctx.defs))
    s = _SOLVERS.get(key)
    if s is None:
        if len(_SOLVERS) > 512:
            _SOLVERS.clear()
        s = R.solver_for(ctx.sort_ctx(), search_depth=SETTINGS["search_depth"], star_depth=SETTINGS["star_depth"])
        _SOLVERS[key] = s
    return s


SETTINGS = {"search_depth": R.DEFAULT_SEARCH_DEPTH, "star_depth": R.DEFAULT_STAR_DEPTH}


def configure(search_depth=None, star_depth=None):
    if search_depth is not None:
        SETTINGS["search_depth"] = search_depth
    if star_depth is not None:
        SETTINGS["star_depth"] = star_depth
    _SOLVERS.clear()


def sets_apart(ctx, x, y):
    s = solver(ctx)
    return s.sets_apart(s.atoms(x), s.atoms(y)) is not None


def subset(ctx, x, y):
    """X included in Y, decided over canonical forms."""
    if isinstance(x, I.IEmpty):
        return True
    return solver(ctx).subset(x, y) is not None


def prop_holds(ctx, p):
    """Entailment of a proposition from the extracted context (search only)."""
    s = solver(ctx)
    for q in conjuncts(p):
        ob = R.Obligation(R.relctx_of_sorts(s.sorts), R.APART if isinstance(q, Apart) else R.EQUIV,
                          q.i, q.j, q.sort)
        if s.decide(ob) is None:
            return False
    return True


# ---------------------------------------------------------------- kinding and well-formedness

def sort_of(ctx, i, expected=None):
    try:
        return I.sort_index(ctx.sort_ctx(), i, expected)
    except I.ApartnessObligationFailed as exc:
        raise KindError(str(exc), ("apart", exc.x, exc.y))
    except SortError as exc:
        raise KindError(str(exc))


def wf_prop(ctx, p):
    for q in conjuncts(p):
        s = sort_of(ctx, q.i, q.sort if not N.is_name_sort(q.sort) else None)
        sort_of(ctx, q.j, s)
        if s != q.sort and not (N.is_name_sort(s) and N.is_name_sort(q.sort)):
            raise KindError("proposition sides have sort %s, annotated %s" % (s, q.sort))


def kind_check(ctx, t):
    if isinstance(t, TVar):
        k = ctx.lookup_tyvar(t.a)
        if k is None:
            raise KindError("unbound type variable %s" % t.a)
        return k
    if isinstance(t, TCon):
        k = ctx.lookup_tycon(t.d)
        if k is None:
            raise KindError("unbound type constructor %s" % t.d)
        return k
    if isinstance(t, UnitT):
        return TYPE
    if isinstance(t, (Sum, Prod)):
        for c in (t.a, t.b):
            if kind_check(ctx, c) != TYPE:
                raise KindError("component %s is not of kind Type" % show_type(c))
        return TYPE
    if isinstance(t, NmT):
        sort_of(ctx, t.i, NMSET)
        return TYPE
    if isinstance(t, NmFnT):
        try:
            N.check_name_sort(ctx.sort_ctx().sorts, t.m, N.NM_FN)
        except SortError as exc:
            raise KindError(str(exc))
        return TYPE
    if isinstance(t, RefT):
        sort_of(ctx, t.i, NMSET)
        if kind_check(ctx, t.a) != TYPE:
            raise KindError("Ref contents must have kind Type")
        return TYPE
    if isinstance(t, ThkT):
        sort_of(ctx, t.i, NMSET)
        wf_eff_type(ctx, t.e)
        return TYPE
    if isinstance(t, TypeApp):
        k = kind_check(ctx, t.a)
        if not isinstance(k, KTypeArrow):
            raise KindError("type application of %s at kind %s" % (show_type(t.a), k))
        if kind_check(ctx, t.b) != TYPE:
            raise KindError("type argument must have kind Type")
        return k.k
    if isinstance(t, IdxApp):
        k = kind_check(ctx, t.a)
        if not isinstance(k, KIndexArrow):
            raise KindError("index application of %s at kind %s" % (show_type(t.a), k))
        sort_of(ctx, t.i, None if N.is_name_sort(k.sort) else k.sort)
        return k.k
    if isinstance(t, (AllIdx, ExistsIdx)):
        inner = ctx.add(IdxVar(t.a, t.sort))
        wf_prop(inner, t.p)
        if kind_check(inner, t.t) != TYPE:
            raise KindError("quantified body must have kind Type")
        return TYPE
    raise KindError("not a value type: %r" % (t,))


def wf_comp(ctx, c):
    if isinstance(c, Lift):
        if kind_check(ctx, c.a) != TYPE:
            raise KindError("F of a non-Type")
        return
    if isinstance(c, Arrow):
        if kind_check(ctx, c.a) != TYPE:
            raise KindError("function domain must have kind Type")
        wf_eff_type(ctx, c.e)
        return
    raise KindError("not a computation type: %r" % (c,))


def wf_effect(ctx, eff):
    sort_of(ctx, eff.w, NMSET)
    sort_of(ctx, eff.r, NMSET)


def wf_eff_type(ctx, e):
    if isinstance(e, WithEff):
        wf_comp(ctx, e.c)
        wf_effect(ctx, e.eff)
        return
    if isinstance(e, AllType):
        wf_eff_type(ctx.add(TyVar(e.a, e.k)), e.e)
        return
    if isinstance(e, AllIdxE):
        inner = ctx.add(IdxVar(e.a, e.sort))
        wf_prop(inner, e.p)
        wf_eff_type(inner.add(PropEntry(e.p)), e.e)
        return
    raise KindError("not a type-with-effects: %r" % (e,))


# ---------------------------------------------------------------- effect algebra

def union(x, y):
    if isinstance(x, I.IEmpty):
        return y
    if isinstance(y, I.IEmpty):
        return x
    if x == y:
        return x
    return I.IUnion(x, y)


def effect_seq(ctx, e1, e2):
    """<W1;R1> then <W2;R2>: defined when W1 ## W2 and R1 ## W2."""
    if not sets_apart(ctx, e1.w, e2.w):
        raise EffectSeqError("writes-overlap", e1.w, e2.w)
    if not sets_apart(ctx, e1.r, e2.w):
        raise EffectSeqError("read-then-write", e1.r, e2.w)
    return Effect(union(e1.w, e2.w), union(e1.r, e2.r))


def effect_coalesce(ctx, e, eff):
    """(C |> e2) coalesced with e1 is C |> (e1 then e2); quantifiers pass through."""
    if isinstance(e, WithEff):
        return WithEff(e.c, effect_seq(ctx, eff, e.eff))
    if isinstance(e, AllType):
        return AllType(e.a, e.k, effect_coalesce(ctx.add(TyVar(e.a, e.k)), e.e, eff))
    if isinstance(e, AllIdxE):
        inner = ctx.add(IdxVar(e.a, e.sort)).add(PropEntry(e.p))
        return AllIdxE(e.a, e.sort, e.p, effect_coalesce(inner, e.e, eff))
    raise TypeError_("cannot coalesce effects into %r" % (e,))


def effect_subsumes(ctx, e1, e2):
    """Each component of e1 is included in the corresponding component of e2."""
    return subset(ctx, e1.w, e2.w) and subset(ctx, e1.r, e2.r)


# ---------------------------------------------------------------- subtyping

def _fail(msg, ob=None):
    raise SubtypeError(msg, ob)


def subtype_value(ctx, a, b):
    if a == b:
        return True
    if isinstance(b, AllIdx):
        inner = ctx.add(IdxVar(b.a, b.sort)).add(PropEntry(b.p))
        return subtype_value(inner, a, b.t)
    if isinstance(a, AllIdx):
        return _all_left(ctx, a, b, a.t, subtype_value, lambda t, env: subst_idx(t, env))
    if isinstance(a, NmT) and isinstance(b, NmT):
        if subset(ctx, a.i, b.i):
            return True
        _fail("name set %s not included in %s" % (I.show(a.i), I.show(b.i)), ("subset", a.i, b.i))
    if isinstance(a, (Prod, Sum)) and type(a) is type(b):
        return subtype_value(ctx, a.a, b.a) and subtype_value(ctx, a.b, b.b)
    if isinstance(a, RefT) and isinstance(b, RefT):
        if not subset(ctx, a.i, b.i):
            _fail("pointer set %s not included in %s" % (I.show(a.i), I.show(b.i)), ("subset", a.i, b.i))
        return subtype_value(ctx, a.a, b.a)
    if isinstance(a, ThkT) and isinstance(b, ThkT):
        if not subset(ctx, a.i, b.i):
            _fail("pointer set %s not included in %s" % (I.show(a.i), I.show(b.i)), ("subset", a.i, b.i))
        return subtype_eff(ctx, a.e, b.e)
    if isinstance(a, NmFnT) and isinstance(b, NmFnT):
        if N.name_convertible(a.m, b.m):
            return True
        _fail("name functions %s and %s are not convertible" % (N.show_term(a.m), N.show_term(b.m)))
    if isinstance(a, ExistsIdx) and isinstance(b, ExistsIdx):
        inner = ctx.add(IdxVar(a.a, a.sort)).add(PropEntry(a.p))
        ren = {b.a: _binder_value(a.a, a.sort)}
        if not prop_holds(inner, prop_subst(b.p, ren)):
            _fail("existential guard not entailed", ("prop", b.p))
        return subtype_value(inner, a.t, subst_idx(b.t, ren))
    if isinstance(a, IdxApp) and isinstance(b, IdxApp):
        return _idx_app_sub(ctx, a, b)
    if isinstance(a, TypeApp) and isinstance(b, TypeApp):
        if _types_equal(ctx, a, b):
            return True
    if _types_equal(ctx, a, b):
        return True
    _fail("%s is not a subtype of %s" % (show_type(a), show_type(b)))


def _spine(t):
    args = []
    while isinstance(t, IdxApp):
        args.append(t.i)
        t = t.a
    return t, list(reversed(args))


def _idx_app_sub(ctx, a, b):
    """Datatype applications: covariant in name-set arguments, invariant otherwise."""
    ha, xa = _spine(a)
    hb, xb = _spine(b)
    if ha != hb or len(xa) != len(xb):
        _fail("%s is not a subtype of %s" % (show_type(a), show_type(b)))
    k = kind_check(ctx, ha)
    for i, j in zip(xa, xb):
        sort = k.sort if isinstance(k, KIndexArrow) else NMSET
        k = k.k if isinstance(k, KIndexArrow) else k
        if sort == NMSET:
            if not subset(ctx, i, j):
                _fail("index %s not included in %s" % (I.show(i), I.show(j)), ("subset", i, j))
        elif not _idx_equal(ctx, i, j, sort):
            _fail("index %s not equivalent to %s" % (I.show(i), I.show(j)))
    return True


def _idx_equal(ctx, i, j, sort):
    s = solver(ctx)
    ob = R.Obligation(R.relctx_of_sorts(s.sorts), R.EQUIV, i, j, sort)
    return s.decide(ob) is not None


def _types_equal(ctx, a, b):
    return normalize_type(a) == normalize_type(b)


def _candidates(ctx, sort, goal):
    """Index instantiation candidates: variables of the sort plus indices in the goal."""
    out = []
    for v, s in ctx.index_sorts().items():
        if s == sort:
            out.append(_binder_value(v, s))
    for i in _indices_in(goal):
        if sort == NMSET and i not in out:
            out.append(i)
    return out


def _indices_in(t):
    acc = []
    map_indices(t, lambda i: (acc.append(i), i)[1])
    return acc


def _all_left(ctx, a, b, body, rel, sub):
    last = None
    for cand in _candidates(ctx, a.sort, b):
        env = {a.a: cand}
        if not prop_holds(ctx, prop_subst(a.p, env)):
            continue
        try:
            return rel(ctx, sub(body, env), b)
        except SubtypeError as exc:
            last = exc
    raise last or SubtypeError("no instantiation of %s found" % a.a)


def subtype_comp(ctx, c, d):
    if isinstance(c, Lift) and isinstance(d, Lift):
        return subtype_value(ctx, c.a, d.a)
    if isinstance(c, Arrow) and isinstance(d, Arrow):
        subtype_value(ctx, d.a, c.a)
        return subtype_eff(ctx, c.e, d.e)
    _fail("%s is not a subtype of %s" % (show_comp(c), show_comp(d)))


def subtype_eff(ctx, e1, e2):
    if e1 == e2:
        return True
    if isinstance(e2, AllIdxE):
        inner = ctx.add(IdxVar(e2.a, e2.sort)).add(PropEntry(e2.p))
        return subtype_eff(inner, e1, e2.e)
    if isinstance(e1, AllIdxE):
        return _all_left(ctx, e1, e2, e1.e, subtype_eff, subst_idx)
    if isinstance(e1, AllType) and isinstance(e2, AllType):
        inner = ctx.add(TyVar(e1.a, e1.k))
        return subtype_eff(inner, e1.e, subst_tvar(e2.e, e2.a, TVar(e1.a)))
    if isinstance(e1, WithEff) and isinstance(e2, WithEff):
        subtype_comp(ctx, e1.c, e2.c)
        if effect_subsumes(ctx, e1.eff, e2.eff):
            return True
        _fail("effect %s not subsumed by %s" % (show_effect(e1.eff), show_effect(e2.eff)),
              ("subsume", e1.eff, e2.eff))
    _fail("%s is not a subtype of %s" % (show_eff_type(e1), show_eff_type(e2)))


def is_subtype(ctx, a, b):
    try:
        if isinstance(a, VALUE_TYPES):
            return subtype_value(ctx, a, b)
        if isinstance(a, EFF_TYPES):
            return subtype_eff(ctx, a, b)
        return subtype_comp(ctx, a, b)
    except (SubtypeError, KindError):
        return False
