"""Big-step evaluation with a named store, a namespace and a current node.

The evaluator never consults types to make a step.  Annotations are carried
along, and the index quantifiers of a definition are instantiated when it is
forced, so that stored values and suspended expressions stay ground and can
be re-typed afterwards (see `store_typing_check`).
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace

from . import indices as I
from . import names as N
from . import syntax as S
from . import types as T
from .context import LocRef, LocThunk
from .derivation import Deriv

ROOT_NODE = N.Sym("comp")


class Stuck(Exception):
    """Evaluation reached a state no rule applies to."""

    def __init__(self, msg, span=None):
        super().__init__(msg)
        self.span = span


# ---------------------------------------------------------------- hashing

def hash_mult(k, i):
    """Bit i of the multiplicative hash (k * 2654435761 mod 2^32)."""
    return (k * 2654435761) % (1 << 32) >> i & 1


# Four-bit codes for the elements of the worked example.  The code of 3 is the
# complement of the code of 1, and the codes were picked (first distinct
# assignment found by exhaustive search) so that the runs on [3,4,3,9] and
# [1,4,3,9] differ only in the n1/n2 trie paths and the output cells.  Other
# keys fall back to the multiplicative hash.
EXAMPLE_CODES = {1: 0b0000, 3: 0b1111, 4: 0b0010, 9: 0b0001}


def hash_example(k, i):
    if k in EXAMPLE_CODES and i < 4:
        return EXAMPLE_CODES[k] >> i & 1
    return hash_mult(k, i)


HASHES = {"mult": hash_mult, "example": hash_example}


# ---------------------------------------------------------------- stores

@dataclass(frozen=True)
class Data:
    v: object


@dataclass(frozen=True)
class Susp:
    e: object
    scope: object


@dataclass(frozen=True)
class Event:
    kind: str  # "Extend" or "Overwrite"
    loc: object
    entry: object


class Store:
    """Map from names to store entries with an append-only write log.

    Iteration order is first-write order.  A store state is identified by
    the length of its log, so `at(k)` rebuilds any earlier state.
    """

    def __init__(self):
        self.cells = {}
        self.events = []

    def write(self, p, entry):
        kind = "Overwrite" if p in self.cells else "Extend"
        self.cells[p] = entry
        self.events.append(Event(kind, p, entry))
        return kind

    def __getitem__(self, p):
        return self.cells[p]

    def __contains__(self, p):
        return p in self.cells

    def __len__(self):
        return len(self.cells)

    @property
    def version(self):
        return len(self.events)

    def at(self, k):
        s = Store()
        for ev in self.events[:k]:
            s.write(ev.loc, ev.entry)
        return s

    def overwrites(self):
        return [ev for ev in self.events if ev.kind == "Overwrite"]


# ---------------------------------------------------------------- derivations

class DynIn:
    """Judgment inputs: store state, namespace, current node, closed expression.

    The evaluator works with environments; the closed expression is built
    from the recorded open term and its bindings only when it is read.
    """

    __slots__ = ("store", "ns", "node", "_e", "_env")

    def __init__(self, store, ns, node, e, env=None):
        self.store, self.ns, self.node = store, ns, node
        self._e, self._env = e, env

    @property
    def e(self):
        if self._env is not None:
            self._e = close(self._e, *self._env)
            self._env = None
        return self._e

    def __repr__(self):
        return "DynIn(store=%d, ns=%r, node=%r, e=%r)" % (self.store, self.ns, self.node, self.e)


class DynOut:
    __slots__ = ("store", "_t")

    def __init__(self, store, t):
        self.store, self._t = store, t

    @property
    def t(self):
        if isinstance(self._t, Clo):
            self._t = self._t.term()
        return self._t

    def __repr__(self):
        return "DynOut(store=%d, t=%r)" % (self.store, self.t)


@dataclass
class DynDeriv(Deriv):
    loc: object = None


@dataclass(frozen=True)
class Clo:
    """A function terminal together with the bindings of its free variables."""
    lam: object
    venv: dict
    ienv: dict

    def term(self):
        return close(self.lam, self.venv, self.ienv)


def close(node, venv, ienv):
    """Apply value and index bindings to a term."""
    if venv:
        fv = S.free_vars(node)
        for x, v in venv.items():
            if x in fv:
                node = S.subst(node, x, v)
    if ienv:
        node = subst_idx_node(node, ienv)
    return node


# ---------------------------------------------------------------- index instantiation

def free_index_vars(node):
    """Index (and name-term) variables free in the annotations of a term; cached."""
    d = node.__dict__
    if "_ifv" in d:
        return d["_ifv"]
    if isinstance(node, (S.Anno, S.EAnno, S.EInstTy)):
        out = T.free_idx_vars(node.t)
    elif isinstance(node, (S.VInst, S.EInstIdx)):
        out = I.free_vars(node.i)
    elif isinstance(node, S.Pack):
        out = set() if node.i is None else I.free_vars(node.i)
    elif isinstance(node, S.Con):
        out = set().union(*(I.free_vars(i) for i in node.idx))
    elif isinstance(node, S.NameFnV):
        out = N.free_vars(node.m)
    else:
        out = set()
    for c in S.children(node):
        out = out | free_index_vars(c)
    if isinstance(node, S.Arm):
        out = out - set(node.idx)
    elif isinstance(node, S.Unpack):
        out = out - {node.a}
    d["_ifv"] = out = frozenset(out)
    return out


def subst_idx_node(node, env):
    """Substitute ground indices for index variables inside annotations of a term."""
    if not env:
        return node
    if isinstance(node, (S.Var, S.UnitV, S.NatV, S.NameV, S.RefV, S.ThunkV, S.DefV)):
        return node
    fv = free_index_vars(node)
    if not any(k in fv for k in env):
        return node
    env = {k: v for k, v in env.items() if k in fv}
    nenv = I._name_env(env)
    if isinstance(node, (S.Anno, S.EAnno, S.EInstTy)):
        t = T.subst_idx(node.t, env)
        if isinstance(node, S.Anno):
            return replace(node, v=subst_idx_node(node.v, env), t=t)
        return replace(node, e=subst_idx_node(node.e, env), t=t)
    if isinstance(node, S.VInst):
        return replace(node, v=subst_idx_node(node.v, env), i=I.subst(node.i, env))
    if isinstance(node, S.EInstIdx):
        return replace(node, e=subst_idx_node(node.e, env), i=I.subst(node.i, env))
    if isinstance(node, S.Pack):
        i = None if node.i is None else I.subst(node.i, env)
        return replace(node, i=i, v=subst_idx_node(node.v, env))
    if isinstance(node, S.Con):
        return replace(node, idx=tuple(I.subst(i, env) for i in node.idx),
                       args=tuple(subst_idx_node(a, env) for a in node.args))
    if isinstance(node, S.NameFnV):
        return replace(node, m=N.subst_many(node.m, nenv))
    if isinstance(node, S.Arm):
        inner = {k: v for k, v in env.items() if k not in node.idx}
        return replace(node, e=subst_idx_node(node.e, inner))
    if isinstance(node, S.Unpack):
        inner = {k: v for k, v in env.items() if k != node.a}
        return replace(node, v=subst_idx_node(node.v, env), e=subst_idx_node(node.e, inner))
    return S._map_children(node, lambda c: subst_idx_node(c, env))


def _quantifiers(t):
    out = []
    while isinstance(t, T.AllIdxE):
        out.append((t.a, t.sort))
        t = t.e
    return out


def _ground(i, sort):
    if N.is_name_sort(sort) and isinstance(i, I.ISingle):
        return I.IName(i.m)
    return i


# ---------------------------------------------------------------- evaluation

class Evaluator:
    def __init__(self, env, hash_bit=hash_mult, store=None, bodies=None):
        self.env = env
        self.hash_bit = hash_bit
        self.store = store if store is not None else Store()
        self.bodies = bodies if bodies is not None else closed_bodies(env)

    def eval(self, ns, node, e, venv=None, ienv=None):
        """Evaluate e under value/index bindings; returns (terminal, derivation).

        The terminal is Ret(v) with v closed, or a Clo for a function.
        """
        venv = venv or {}
        ienv = ienv or {}
        while isinstance(e, (S.EAnno, S.EInstTy)) or (isinstance(e, S.EInstIdx) and not self._inst_of_def(e, venv)):
            e = e.e
        d = DynDeriv("dyn-term", DynIn(self.store.version, ns, node, e, (venv, ienv) if venv or ienv else None))
        t = self._step(ns, node, e, d, venv, ienv)
        d.output = DynOut(self.store.version, t)
        return t, d

    def _sub(self, d, ns, node, e, venv, ienv):
        t, c = self.eval(ns, node, e, venv, ienv)
        d.children.append(c)
        return t

    def _val(self, v, venv, ienv):
        v = _strip(v)
        if isinstance(v, S.Var):
            if v.x not in venv:
                raise Stuck("unbound variable %s" % v.x, v.span)
            return venv[v.x]
        return close(v, venv, ienv)

    def _step(self, ns, node, e, d, venv, ienv):
        val = lambda v: self._val(v, venv, ienv)
        if isinstance(e, S.Ret):
            return S.Ret(val(e.v))
        if isinstance(e, S.Lam):
            return Clo(e, venv, ienv)
        if isinstance(e, S.Let):
            d.rule = "dyn-let"
            t = self._sub(d, ns, node, e.e1, venv, ienv)
            v = _returned(t, e)
            return self._sub(d, ns, node, e.e2, {**venv, e.x: v}, ienv)
        if isinstance(e, S.App):
            d.rule = "dyn-app"
            t = self._sub(d, ns, node, e.e, venv, ienv)
            if not isinstance(t, Clo):
                raise Stuck("application of a non-function %s" % _show(t), e.span)
            arg = val(e.v)
            return self._sub(d, ns, node, t.lam.e, {**t.venv, t.lam.x: arg}, t.ienv)
        if isinstance(e, S.Split):
            d.rule = "dyn-split"
            v = val(e.v)
            if not isinstance(v, S.PairV):
                raise Stuck("split of a non-pair %s" % _show(v), e.span)
            return self._sub(d, ns, node, e.e, {**venv, e.x1: v.v1, e.x2: v.v2}, ienv)
        if isinstance(e, S.Case):
            d.rule = "dyn-case"
            v = val(e.v)
            if not isinstance(v, S.Inj):
                raise Stuck("case of a non-injection %s" % _show(v), e.span)
            if v.i == 1:
                return self._sub(d, ns, node, e.e1, {**venv, e.x1: v.v}, ienv)
            return self._sub(d, ns, node, e.e2, {**venv, e.x2: v.v}, ienv)
        if isinstance(e, S.If):
            d.rule = "dyn-case"
            v = val(e.v)
            if not isinstance(v, S.Inj):
                raise Stuck("if on a non-boolean %s" % _show(v), e.span)
            return self._sub(d, ns, node, e.e1 if v.i == 1 else e.e2, venv, ienv)
        if isinstance(e, S.Match):
            d.rule = "dyn-case"
            body, venv2, ienv2 = self._arm(e, val(e.v), venv, ienv)
            return self._sub(d, ns, node, body, venv2, ienv2)
        if isinstance(e, S.Unpack):
            d.rule = "dyn-unpack"
            v = val(e.v)
            if not isinstance(v, S.Pack):
                raise Stuck("unpack of a non-package %s" % _show(v), e.span)
            ienv2 = ienv if v.i is None else {**ienv, e.a: v.i}
            return self._sub(d, ns, node, e.e, {**venv, e.x: v.v}, ienv2)
        if isinstance(e, S.Scope):
            d.rule = "dyn-scope"
            f = val(e.v)
            if not isinstance(f, S.NameFnV):
                raise Stuck("scope with a non-function %s" % _show(f), e.span)
            return self._sub(d, N.compose(ns, f.m), node, e.e, venv, ienv)
        if isinstance(e, S.NameApp):
            d.rule = "dyn-name-app"
            f, n = val(e.vm), val(e.v)
            if not (isinstance(f, S.NameFnV) and isinstance(n, S.NameV)):
                raise Stuck("name application of %s to %s" % (_show(f), _show(n)), e.span)
            return S.Ret(S.NameV(N.eval_name(N.NApp(f.m, N.NLit(n.n)))))
        if isinstance(e, S.NmBin):
            d.rule = "dyn-name-bin"
            a, b = val(e.v1), val(e.v2)
            if not (isinstance(a, S.NameV) and isinstance(b, S.NameV)):
                raise Stuck("name pair of %s and %s" % (_show(a), _show(b)), e.span)
            return S.Ret(S.NameV(N.Bin(a.n, b.n)))
        if isinstance(e, S.Prim):
            d.rule = "dyn-prim"
            return S.Ret(self._prim(e, [val(a) for a in e.args]))
        if isinstance(e, S.Ref):
            d.rule = "dyn-ref"
            p = self._alloc_name(ns, val(e.v1), e)
            d.loc = p
            self.store.write(p, Data(val(e.v2)))
            return S.Ret(S.RefV(p))
        if isinstance(e, S.Thunk):
            d.rule = "dyn-thunk"
            p = self._alloc_name(ns, val(e.v), e)
            d.loc = p
            self.store.write(p, Susp(close(e.e, venv, ienv), ns))
            return S.Ret(S.ThunkV(p))
        if isinstance(e, S.Get):
            d.rule = "dyn-get"
            r = val(e.v)
            if not isinstance(r, S.RefV):
                raise Stuck("get of a non-reference %s" % _show(r), e.span)
            entry = self.store.cells.get(r.n)
            if not isinstance(entry, Data):
                raise Stuck("get of unbound location %s" % N.show_name(r.n), e.span)
            d.loc = r.n
            return S.Ret(entry.v)
        if isinstance(e, S.Force):
            d.rule = "dyn-force"
            return self._force(d, ns, node, val(e.v), [], e)
        if isinstance(e, S.EInstIdx):
            d.rule = "dyn-force"
            insts = []
            while isinstance(e, (S.EInstIdx, S.EInstTy, S.EAnno)):
                if isinstance(e, S.EInstIdx):
                    insts.insert(0, I.subst(e.i, ienv) if ienv else e.i)
                e = e.e
            return self._force(d, ns, node, val(e.v), insts, e)
        raise Stuck("no rule for %s" % type(e).__name__, getattr(e, "span", None))

    def _inst_of_def(self, e, venv):
        while isinstance(e, (S.EInstIdx, S.EInstTy, S.EAnno)):
            e = e.e
        if not isinstance(e, S.Force):
            return False
        v = _strip(e.v)
        if isinstance(v, S.Var):
            v = venv.get(v.x)
        return isinstance(v, S.DefV)

    def _force(self, d, ns, node, v, insts, e):
        if isinstance(v, S.DefV):
            # definitions are fix-thunks: their body runs in the caller's namespace
            qs = _quantifiers(self.env.def_types[v.f])
            ienv = {qs[0][0]: I.IName(ns)}
            for (a, sort), i in zip(qs[1:], insts):
                ienv[a] = _ground(i, sort)
            return self._sub(d, ns, node, self.bodies[v.f], {}, ienv)
        if not isinstance(v, S.ThunkV):
            raise Stuck("force of a non-thunk %s" % _show(v), e.span)
        entry = self.store.cells.get(v.n)
        if not isinstance(entry, Susp):
            raise Stuck("force of unbound thunk %s" % N.show_name(v.n), e.span)
        d.loc = v.n
        return self._sub(d, entry.scope, v.n, entry.e, {}, {})

    def _alloc_name(self, ns, n, e):
        if not isinstance(n, S.NameV):
            raise Stuck("allocation with a non-name %s" % _show(n), e.span)
        return N.eval_name(N.NApp(ns, N.NLit(n.n)))

    def _arm(self, e, v, venv, ienv):
        if not isinstance(v, S.Con):
            raise Stuck("match on a non-constructor %s" % _show(v), e.span)
        for arm in e.arms:
            if arm.c != v.c:
                continue
            if arm.idx and v.idx:
                _, sig = self.env.ctors[v.c]
                ienv = {**ienv, **{a: _ground(i, q[1]) for a, i, q in zip(arm.idx, v.idx, sig.quants)}}
            venv = {**venv, **{x: _strip(a) for x, a in zip(arm.xs, v.args)}}
            return arm.e, venv, ienv
        raise Stuck("no arm for constructor %s" % v.c, e.span)

    def _prim(self, e, args):
        if not all(isinstance(a, S.NatV) for a in args):
            raise Stuck("%s applied to non-numerals" % e.op, e.span)
        a, b = (x.k for x in args)
        if e.op == "add":
            return S.NatV(a + b)
        if e.op == "sub":
            return S.NatV(max(0, a - b))
        if e.op == "eq":
            return S.bool_v(a == b)
        if e.op == "lt":
            return S.bool_v(a < b)
        if e.op == "hash_bit":
            return S.bool_v(bool(self.hash_bit(a, b)))
        raise Stuck("unknown primitive %s" % e.op, e.span)


def closed_bodies(env):
    return {f: close_defs(b, env) for f, b in env.def_bodies.items()}


def terminal(t):
    """A returned terminal as a closed term."""
    return t.term() if isinstance(t, Clo) else t


def _strip(v):
    """Peel value annotations; they never affect a step."""
    while isinstance(v, (S.Anno, S.VInst)):
        v = v.v
    return v


def _returned(t, e):
    if not isinstance(t, S.Ret):
        raise Stuck("let-bound computation returned a function", e.span)
    return t.v


def _show(x):
    from .printer import show_term_any
    try:
        return show_term_any(x)
    except TypeError:
        return repr(x)


def close_defs(node, env):
    """Replace free references to top-level definitions by definition values."""
    for f in env.def_bodies:
        node = S.subst(node, f, S.DefV(f))
    return node


# ---------------------------------------------------------------- runs

@dataclass
class RunResult:
    store: Store
    terminal: object
    deriv: DynDeriv
    seeded: int = 0
    env: object = field(default=None, repr=False)

    @property
    def overwrites(self):
        return self.store.overwrites()


def seed_store(env):
    store = Store()
    for c in env.cells:
        if isinstance(c.t, T.EFF_TYPES):
            store.write(c.loc, Susp(close_defs(c.v, env), N.IDENTITY))
        else:
            store.write(c.loc, Data(close_defs(c.v, env)))
    return store


def run_program(program, env=None, hash_bit=hash_mult):
    """Seed the declared cells, then evaluate main under the identity namespace."""
    from .typecheck import build_env
    if env is None:
        env = build_env(program)
    if program.main is None:
        raise Stuck("program has no main expression")
    store = seed_store(env)
    seeded = store.version
    ev = Evaluator(env, hash_bit, store)
    main = close_defs(env.expand_node(program.main.e), env)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 100000))
    try:
        t, d = ev.eval(N.IDENTITY, ROOT_NODE, main)
    finally:
        sys.setrecursionlimit(limit)
    return RunResult(store, terminal(t), d, seeded, env)


def eval_expr(e, store=None, ns=N.IDENTITY, node=ROOT_NODE, env=None, hash_bit=hash_mult):
    """Evaluate a closed expression; returns (store, terminal, derivation)."""
    from .typecheck import Env
    ev = Evaluator(env or Env(), hash_bit, store)
    t, d = ev.eval(ns, node, e)
    return ev.store, terminal(t), d


def replay(run, d, env=None, hash_bit=hash_mult):
    """Re-evaluate the input of a recorded derivation on a rebuilt store."""
    store = run.store.at(d.input.store)
    ev = Evaluator(env or run.env, hash_bit, store)
    t, _ = ev.eval(d.input.ns, d.input.node, d.input.e)
    return store, terminal(t)


# ---------------------------------------------------------------- store typing

@dataclass
class StoreTyping:
    ctx: object
    violations: list


def store_typing_check(store, ctx):
    """Check every entry against the location's type in ctx; returns violations."""
    from .typecheck import Checker
    chk = Checker(ctx.defs)
    bad = []
    for p, entry in store.cells.items():
        decl = ctx.lookup_loc(p)
        if decl is None:
            bad.append((p, "location has no type"))
            continue
        try:
            if isinstance(entry, Data):
                if not isinstance(decl, LocRef):
                    raise T.TypeError_("reference cell typed as a thunk")
                chk.check_value(ctx, entry.v, decl.ty)
            else:
                if not isinstance(decl, LocThunk):
                    raise T.TypeError_("thunk cell typed as a reference")
                chk.check_comp(ctx, entry.scope, entry.e, decl.ty)
        except T.TypeError_ as exc:
            bad.append((p, str(exc)))
    return bad


def grow_store_typing(store, ctx, start=0):
    """Extend ctx with synthesized types for the cells first written at or after `start`.

    Cells are visited in first-write order, so each one is typed under the
    locations written before it.
    """
    from .typecheck import Checker
    chk = Checker(ctx.defs)
    bad = []
    for ev in store.events[start:]:
        if ev.kind != "Extend":
            continue
        entry = store.cells[ev.loc]
        try:
            if isinstance(entry, Data):
                ctx = ctx.add(LocRef(ev.loc, chk.synth_value(ctx, entry.v)))
            else:
                ctx = ctx.add(LocThunk(ev.loc, chk.synth_comp(ctx, entry.scope, entry.e)))
        except T.TypeError_ as exc:
            bad.append((ev.loc, str(exc)))
    return StoreTyping(ctx, bad)
