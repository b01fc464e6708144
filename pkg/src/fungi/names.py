"""Literal names and the simply-typed name-term calculus.

Names are finite binary trees over terminal atoms.  Name terms are a small
lambda calculus whose values are literal names and name functions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union


# ---------------------------------------------------------------- names

@dataclass(frozen=True)
class Leaf:
    def __str__(self):
        return "()"


@dataclass(frozen=True)
class Bin:
    left: "Name"
    right: "Name"

    def __str__(self):
        return show_name(self)


@dataclass(frozen=True)
class Sym:
    text: str

    def __str__(self):
        return "'" + self.text


@dataclass(frozen=True)
class Num:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("Num atoms are natural numbers")

    def __str__(self):
        return str(self.value)


Name = Union[Leaf, Bin, Sym, Num]
LEAF = Leaf()


def show_name(n, nested=False):
    if isinstance(n, Bin):
        s = show_name(n.left, True) + " * " + show_name(n.right, False)
        return "(" + s + ")" if nested else s
    return str(n)


def name_size(n):
    """Number of Bin nodes."""
    if isinstance(n, Bin):
        return 1 + name_size(n.left) + name_size(n.right)
    return 0


def name_depth(n):
    if isinstance(n, Bin):
        return 1 + max(name_depth(n.left), name_depth(n.right))
    return 0


def name_atoms(n, acc=None):
    acc = set() if acc is None else acc
    if isinstance(n, Bin):
        name_atoms(n.left, acc)
        name_atoms(n.right, acc)
    else:
        acc.add(n)
    return acc


def is_subname(small, big):
    """True when `small` occurs as a subtree of `big` (including equality)."""
    if small == big:
        return True
    if isinstance(big, Bin):
        return is_subname(small, big.left) or is_subname(small, big.right)
    return False


def unary(k):
    """The unary numeral scheme: Zero = leaf, Succ x = <leaf, x>."""
    n = LEAF
    for _ in range(k):
        n = Bin(LEAF, n)
    return n


# ---------------------------------------------------------------- sorts

@dataclass(frozen=True)
class Nm:
    def __str__(self):
        return "Nm"


@dataclass(frozen=True)
class NmArrow:
    dom: object
    cod: object

    def __str__(self):
        d = str(self.dom)
        if isinstance(self.dom, NmArrow):
            d = "(" + d + ")"
        return d + " -> " + str(self.cod)


NM = Nm()
NM_FN = NmArrow(NM, NM)


def is_name_sort(s):
    return isinstance(s, Nm) or (isinstance(s, NmArrow) and is_name_sort(s.dom) and is_name_sort(s.cod))


# ---------------------------------------------------------------- name terms

@dataclass(frozen=True)
class NLit:
    n: object

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class NBin:
    m1: object
    m2: object

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class NVar:
    a: str

    def __str__(self):
        return self.a


@dataclass(frozen=True)
class NLam:
    a: str
    body: object

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class NApp:
    fn: object
    arg: object

    def __str__(self):
        return show_term(self)


NameTerm = Union[NLit, NBin, NVar, NLam, NApp]


def show_term(m, prec=0):
    """Concrete syntax.  prec: 0 top, 1 operand of '*', 2 application argument."""
    if isinstance(m, NLit):
        s = show_name(m.n)
        return "(" + s + ")" if isinstance(m.n, Bin) and prec > 0 else s
    if isinstance(m, NVar):
        return m.a
    if isinstance(m, NBin):
        s = show_term(m.m1, 1) + " * " + show_term(m.m2, 0 if prec == 0 else 1)
        return "(" + s + ")" if prec > 0 else s
    if isinstance(m, NLam):
        s = "#" + m.a + ". " + show_term(m.body, 0)
        return "(" + s + ")" if prec > 0 else s
    if isinstance(m, NApp):
        s = show_term(m.fn, 1) + " " + show_term(m.arg, 2)
        return "(" + s + ")" if prec > 1 else s
    raise TypeError(m)


def lit(n):
    return NLit(n)


def sym(text):
    return NLit(Sym(text))


LEAF_T = NLit(LEAF)


class SortError(Exception):
    pass


class StuckTerm(Exception):
    """Evaluation got stuck; only reachable on ill-sorted input."""


class FuelExhausted(Exception):
    """Internal error: the defensive step bound was exceeded."""


DEFAULT_FUEL = 10 ** 6


def free_vars(m):
    if isinstance(m, NVar):
        return {m.a}
    if isinstance(m, NLit):
        return set()
    if isinstance(m, NBin):
        return free_vars(m.m1) | free_vars(m.m2)
    if isinstance(m, NLam):
        return free_vars(m.body) - {m.a}
    if isinstance(m, NApp):
        return free_vars(m.fn) | free_vars(m.arg)
    raise TypeError(m)


_fresh = itertools.count()


def fresh(base, avoid):
    base = base.split("~")[0]
    while True:
        cand = "%s~%d" % (base, next(_fresh))
        if cand not in avoid:
            return cand


def subst(m, a, v):
    """Capture-avoiding m[v/a]."""
    return subst_many(m, {a: v})


def subst_many(m, env):
    if not env:
        return m
    if isinstance(m, NVar):
        return env.get(m.a, m)
    if isinstance(m, NLit):
        return m
    if isinstance(m, NBin):
        return NBin(subst_many(m.m1, env), subst_many(m.m2, env))
    if isinstance(m, NApp):
        return NApp(subst_many(m.fn, env), subst_many(m.arg, env))
    if isinstance(m, NLam):
        inner = {k: v for k, v in env.items() if k != m.a}
        if not inner:
            return m
        fv = set()
        for k, v in inner.items():
            if k in free_vars(m.body):
                fv |= free_vars(v)
        if m.a in fv:
            b = fresh(m.a, fv | free_vars(m.body) | set(inner))
            body = subst_many(m.body, {m.a: NVar(b)})
            return NLam(b, subst_many(body, inner))
        return NLam(m.a, subst_many(m.body, inner))
    raise TypeError(m)


def sort_name_term(ctx, m):
    """Sort of m under ctx (rules M-const, M-var, M-bin, M-abs, M-app).

    Binders are unannotated, so the domain of each lambda is found by
    first-order unification over sorts; domains left unconstrained default to
    Nm, the only first-order name sort.
    """
    sub = {}
    s = _infer(ctx, m, sub)
    return _resolve(s, sub)


def check_name_sort(ctx, m, s):
    sub = {}
    got = _infer(ctx, m, sub)
    if not _unify(got, s, sub):
        raise SortError("expected sort %s, found %s" % (s, _resolve(got, sub)))


@dataclass(frozen=True)
class _Meta:
    k: int


_metas = itertools.count()


def _walk(s, sub):
    while isinstance(s, _Meta) and s in sub:
        s = sub[s]
    return s


def _resolve(s, sub):
    s = _walk(s, sub)
    if isinstance(s, _Meta):
        return NM
    if isinstance(s, NmArrow):
        return NmArrow(_resolve(s.dom, sub), _resolve(s.cod, sub))
    return s


def _occurs(v, s, sub):
    s = _walk(s, sub)
    if s == v:
        return True
    if isinstance(s, NmArrow):
        return _occurs(v, s.dom, sub) or _occurs(v, s.cod, sub)
    return False


def _unify(a, b, sub):
    a, b = _walk(a, sub), _walk(b, sub)
    if a == b:
        return True
    if isinstance(a, _Meta):
        if _occurs(a, b, sub):
            return False
        sub[a] = b
        return True
    if isinstance(b, _Meta):
        return _unify(b, a, sub)
    if isinstance(a, NmArrow) and isinstance(b, NmArrow):
        return _unify(a.dom, b.dom, sub) and _unify(a.cod, b.cod, sub)
    return False


def _infer(ctx, m, sub):
    if isinstance(m, NLit):
        return NM
    if isinstance(m, NVar):
        if m.a not in ctx:
            raise SortError("unbound name variable %s" % m.a)
        s = ctx[m.a]
        if not (is_name_sort(s) or isinstance(s, _Meta)):
            raise SortError("variable %s has non-name sort %s" % (m.a, s))
        return s
    if isinstance(m, NBin):
        for part in (m.m1, m.m2):
            s = _infer(ctx, part, sub)
            if not _unify(s, NM, sub):
                raise SortError("operand of * has sort %s, expected Nm" % _resolve(s, sub))
        return NM
    if isinstance(m, NLam):
        d = _Meta(next(_metas))
        inner = dict(ctx)
        inner[m.a] = d
        return NmArrow(d, _infer(inner, m.body, sub))
    if isinstance(m, NApp):
        f = _infer(ctx, m.fn, sub)
        x = _infer(ctx, m.arg, sub)
        r = _Meta(next(_metas))
        if not _unify(f, NmArrow(x, r), sub):
            fr = _resolve(f, sub)
            if not isinstance(fr, NmArrow):
                raise SortError("application of non-function of sort %s" % fr)
            raise SortError("argument sort %s does not match %s" % (_resolve(x, sub), fr.dom))
        return r
    raise SortError("not a name term: %r" % (m,))


class _Fuel:
    def __init__(self, n):
        self.left = n

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted("name-term evaluation exceeded its step bound")


def eval_name_term(m, fuel=DEFAULT_FUEL):
    """Big-step evaluation of a closed name term to a value (NLit or NLam)."""
    return _eval(m, _Fuel(fuel))


def _eval(m, fuel):
    fuel.tick()
    if isinstance(m, (NLit, NLam)):
        return m
    if isinstance(m, NBin):
        v1, v2 = _eval(m.m1, fuel), _eval(m.m2, fuel)
        if not (isinstance(v1, NLit) and isinstance(v2, NLit)):
            raise StuckTerm("* applied to a name function")
        return NLit(Bin(v1.n, v2.n))
    if isinstance(m, NApp):
        f = _eval(m.fn, fuel)
        if not isinstance(f, NLam):
            raise StuckTerm("application of a literal name")
        v = _eval(m.arg, fuel)
        return _eval(subst(f.body, f.a, v), fuel)
    if isinstance(m, NVar):
        raise StuckTerm("free variable %s" % m.a)
    raise StuckTerm("not a name term: %r" % (m,))


def eval_name(m):
    """Evaluate a closed Nm-sorted term to its literal Name."""
    v = eval_name_term(m)
    if not isinstance(v, NLit):
        raise StuckTerm("expected a literal name, got a function")
    return v.n


def normalize(m, fuel=None):
    """Full beta-normal form of a possibly open term; closed Bins fold to literals."""
    return _norm(m, _Fuel(DEFAULT_FUEL if fuel is None else fuel))


def _norm(m, fuel):
    fuel.tick()
    if isinstance(m, (NLit, NVar)):
        return m
    if isinstance(m, NBin):
        a, b = _norm(m.m1, fuel), _norm(m.m2, fuel)
        if isinstance(a, NLit) and isinstance(b, NLit):
            return NLit(Bin(a.n, b.n))
        return NBin(a, b)
    if isinstance(m, NLam):
        return NLam(m.a, _norm(m.body, fuel))
    if isinstance(m, NApp):
        f = _norm(m.fn, fuel)
        if isinstance(f, NLam):
            return _norm(subst(f.body, f.a, _norm(m.arg, fuel)), fuel)
        return NApp(f, _norm(m.arg, fuel))
    raise TypeError(m)


def alpha_eq(m1, m2, env1=None, env2=None, depth=0):
    env1 = env1 or {}
    env2 = env2 or {}
    if isinstance(m1, NVar) and isinstance(m2, NVar):
        b1, b2 = env1.get(m1.a), env2.get(m2.a)
        if b1 is None and b2 is None:
            return m1.a == m2.a
        return b1 == b2
    if isinstance(m1, NLit) and isinstance(m2, NLit):
        return m1.n == m2.n
    if isinstance(m1, NBin) and isinstance(m2, NBin):
        return alpha_eq(m1.m1, m2.m1, env1, env2, depth) and alpha_eq(m1.m2, m2.m2, env1, env2, depth)
    if isinstance(m1, NApp) and isinstance(m2, NApp):
        return alpha_eq(m1.fn, m2.fn, env1, env2, depth) and alpha_eq(m1.arg, m2.arg, env1, env2, depth)
    if isinstance(m1, NLam) and isinstance(m2, NLam):
        e1 = dict(env1)
        e2 = dict(env2)
        e1[m1.a] = depth
        e2[m2.a] = depth
        return alpha_eq(m1.body, m2.body, e1, e2, depth + 1)
    # a folded literal Bin against an open NBin never matches: normal forms fold closed Bins
    return False


def canon(m):
    """A hashable alpha-invariant key for a normal-form term."""
    return _canon(m, {}, 0)


def _canon(m, env, depth):
    if isinstance(m, NVar):
        return ("b", env[m.a]) if m.a in env else ("v", m.a)
    if isinstance(m, NLit):
        return ("l", m.n)
    if isinstance(m, NBin):
        return ("*", _canon(m.m1, env, depth), _canon(m.m2, env, depth))
    if isinstance(m, NApp):
        return ("@", _canon(m.fn, env, depth), _canon(m.arg, env, depth))
    if isinstance(m, NLam):
        e = dict(env)
        e[m.a] = depth
        return ("#", _canon(m.body, e, depth + 1))
    raise TypeError(m)


def name_convertible(m1, m2, ctx=None):
    """True iff m1 and m2 have alpha-equivalent beta-normal forms."""
    if ctx is not None:
        s1, s2 = sort_name_term(ctx, m1), sort_name_term(ctx, m2)
        if s1 != s2:
            raise SortError("sort mismatch: %s vs %s" % (s1, s2))
    return alpha_eq(normalize(m1), normalize(m2))


def unfold_lit(m):
    """View a literal Bin as an NBin of literals (for structural matching)."""
    if isinstance(m, NLit) and isinstance(m.n, Bin):
        return NBin(NLit(m.n.left), NLit(m.n.right))
    return m


def compose(m1, m2):
    """Name-function composition m1 o m2 in normal form."""
    fv = free_vars(m1) | free_vars(m2)
    a = fresh("a", fv)
    return normalize(NLam(a, NApp(m1, NApp(m2, NVar(a)))))


IDENTITY = NLam("a", NVar("a"))


def is_injective_fn(m):
    """Conservative syntactic injectivity test for a Nm -> Nm function.

    Holds when the normal form is lambda a. C[a] where C is built from Bin with
    `a` occurring exactly once and every other position a closed literal, or
    when the head is the reserved namespace variable applied injectively.
    """
    m = normalize(m)
    if isinstance(m, NVar):
        return m.a in INJECTIVE_VARS
    if not isinstance(m, NLam):
        return False
    return _inj_body(m.body, m.a)


INJECTIVE_VARS = {"ns"}


def _inj_body(b, a):
    if isinstance(b, NVar):
        return b.a == a
    if isinstance(b, NBin):
        l, r = free_vars(b.m1), free_vars(b.m2)
        if a in l and not r:
            return _inj_body(b.m1, a)
        if a in r and not l:
            return _inj_body(b.m2, a)
        return False
    if isinstance(b, NApp) and isinstance(b.fn, NVar) and b.fn.a in INJECTIVE_VARS:
        return _inj_body(b.arg, a)
    return False
