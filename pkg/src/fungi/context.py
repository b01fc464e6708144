"""Propositions and typing contexts shared by the checker and the solver."""
from __future__ import annotations

from dataclasses import dataclass

from . import indices as I
from .names import is_name_sort


@dataclass(frozen=True)
class Tt:
    def __str__(self):
        return "tt"


@dataclass(frozen=True)
class Conj:
    p1: object
    p2: object

    def __str__(self):
        return "%s && %s" % (show_prop(self.p1, 1), show_prop(self.p2, 1))


@dataclass(frozen=True)
class Apart:
    i: object
    j: object
    sort: object

    def __str__(self):
        return show_prop(self)


@dataclass(frozen=True)
class Equiv:
    i: object
    j: object
    sort: object

    def __str__(self):
        return show_prop(self)


TT = Tt()


def show_prop(p, prec=0):
    if isinstance(p, Tt):
        return "tt"
    if isinstance(p, Conj):
        s = show_prop(p.p1, 1) + " && " + show_prop(p.p2, 0)
        return "(" + s + ")" if prec else s
    op = " ## " if isinstance(p, Apart) else " == "
    s = I.show(p.i, 1) + op + I.show(p.j, 1) + " : " + I.show_sort_syntax(p.sort)
    return "(" + s + ")" if prec else s


def conjuncts(p):
    if isinstance(p, Conj):
        return conjuncts(p.p1) + conjuncts(p.p2)
    if isinstance(p, Tt):
        return []
    return [p]


def conj(ps):
    out = TT
    for p in ps:
        out = p if isinstance(out, Tt) else Conj(out, p)
    return out


def prop_subst(p, env):
    if isinstance(p, Tt):
        return p
    if isinstance(p, Conj):
        return Conj(prop_subst(p.p1, env), prop_subst(p.p2, env))
    return type(p)(_isubst(p.i, env), _isubst(p.j, env), p.sort)


def _isubst(i, env):
    return I.subst(i, env)


def prop_free_vars(p):
    if isinstance(p, Tt):
        return set()
    if isinstance(p, Conj):
        return prop_free_vars(p.p1) | prop_free_vars(p.p2)
    return I.free_vars(p.i) | I.free_vars(p.j)


# ---------------------------------------------------------------- typing contexts

@dataclass(frozen=True)
class IdxVar:
    a: str
    sort: object


@dataclass(frozen=True)
class TyVar:
    a: str
    kind: object


@dataclass(frozen=True)
class TyCon:
    d: str
    kind: object


@dataclass(frozen=True)
class LocRef:
    n: object
    ty: object


@dataclass(frozen=True)
class LocThunk:
    n: object
    ty: object


@dataclass(frozen=True)
class ValVar:
    x: str
    ty: object


@dataclass(frozen=True)
class PropEntry:
    p: object


@dataclass(frozen=True)
class TypingCtx:
    """An ordered, immutable typing context."""
    entries: tuple = ()
    defs: object = None

    def add(self, e):
        return TypingCtx(self.entries + (e,), self.defs)

    def add_all(self, es):
        return TypingCtx(self.entries + tuple(es), self.defs)

    def lookup_var(self, x):
        for e in reversed(self.entries):
            if isinstance(e, ValVar) and e.x == x:
                return e.ty
        return None

    def lookup_loc(self, n):
        for e in reversed(self.entries):
            if isinstance(e, (LocRef, LocThunk)) and e.n == n:
                return e
        return None

    def lookup_tycon(self, d):
        for e in reversed(self.entries):
            if isinstance(e, TyCon) and e.d == d:
                return e.kind
        return None

    def lookup_tyvar(self, a):
        for e in reversed(self.entries):
            if isinstance(e, TyVar) and e.a == a:
                return e.kind
        return None

    def index_sorts(self):
        out = {}
        for e in self.entries:
            if isinstance(e, IdxVar):
                out[e.a] = e.sort
        return out

    def props(self):
        out = []
        for e in self.entries:
            if isinstance(e, PropEntry):
                out.extend(conjuncts(e.p))
        return tuple(out)

    def sort_ctx(self):
        return I.SortCtx(self.index_sorts(), self.props(), self.defs)

    def index_names(self):
        return {a for a, s in self.index_sorts().items() if is_name_sort(s)}
