"""Bidirectional type-and-effect checking.

Judgments: value synthesis and checking, and computation synthesis and
checking under a current namespace M.  Checking of computations is
algorithmic: the computation type is pushed inward while effects are
synthesized bottom-up, sequenced at let, joined at branches, and finally
subsumed by the target effect.
"""
from __future__ import annotations

from dataclasses import replace

from . import indices as I
from . import names as N
from . import syntax as S
from . import types as T
from .context import (TT, Apart, Equiv, IdxVar, LocRef, LocThunk, PropEntry, TyCon, TypingCtx, ValVar,
                      conj, conjuncts, prop_subst)
from .derivation import Recorder
from .indices import EMPTY, NMSET
from .names import NM, NM_FN
from .types import (BOOL, PURE, UNIT, AllIdx, AllIdxE, AllType, Arrow, CtorSig, Effect, ExistsIdx, IdxApp,
                    KIndexArrow, Lift, NmFnT, NmT, Prod, RefT, Sum, TCon, ThkT, TypeError_, WithEff)

NAT = TCon("Nat")
PRIM_TYPES = {"add": NAT, "sub": NAT, "eq": BOOL, "lt": BOOL, "hash_bit": BOOL}


class CheckError(TypeError_):
    pass


def _err(msg, node=None, ob=None):
    raise CheckError(msg, ob, getattr(node, "span", None))


# ---------------------------------------------------------------- declarations

class Env:
    """Elaborated top-level declarations.

    Definitions of name and index terms and type aliases are expanded away,
    so the core checker and the solver never see them.
    """

    def __init__(self):
        self.terms = {}
        self.aliases = {}
        self.datatypes = {}
        self.ctors = {}
        self.def_types = {}
        self.def_bodies = {}
        self.cells = []
        self._expanded = {}

    # expansion of definitions
    def expand_index(self, i):
        hit = self._expanded.get(id(i))
        if hit is not None and hit[0] is i:
            return hit[1]
        out = self._expand_index(i)
        self._expanded[id(i)] = (i, out)
        return out

    def _expand_index(self, i):
        for _ in range(64):
            hit = {k: v for k, v in self.terms.items() if k in I.free_vars(i)}
            if not hit:
                return i
            i = I.subst(i, hit)
        raise CheckError("definitions do not terminate while expanding %s" % I.show(i))

    def expand_term(self, m):
        for _ in range(64):
            hit = {k: v.m for k, v in self.terms.items() if isinstance(v, I.IName) and k in N.free_vars(m)}
            if not hit:
                return m
            m = N.subst_many(m, hit)
        raise CheckError("definitions do not terminate while expanding %s" % N.show_term(m))

    def expand_prop(self, p):
        return T._map_prop(p, self.expand_index)

    def expand_type(self, t):
        t = T.map_indices(t, self.expand_index, self.expand_term)
        return self._aliases(t)

    def _aliases(self, t):
        head, args = T._spine(t)
        if isinstance(head, TCon) and head.d in self.aliases:
            params, body = self.aliases[head.d]
            if len(args) != len(params):
                raise CheckError("alias %s expects %d index arguments" % (head.d, len(params)))
            return self._aliases(T.subst_idx(body, dict(zip(params, args))))
        a = self._aliases
        if isinstance(t, (Sum, Prod, T.TypeApp)):
            return type(t)(a(t.a), a(t.b))
        if isinstance(t, RefT):
            return RefT(t.i, a(t.a))
        if isinstance(t, ThkT):
            return ThkT(t.i, a(t.e))
        if isinstance(t, IdxApp):
            return IdxApp(a(t.a), t.i)
        if isinstance(t, (AllIdx, ExistsIdx)):
            return type(t)(t.a, t.sort, t.p, a(t.t))
        if isinstance(t, Lift):
            return Lift(a(t.a))
        if isinstance(t, Arrow):
            return Arrow(a(t.a), a(t.e))
        if isinstance(t, WithEff):
            return WithEff(a(t.c), t.eff)
        if isinstance(t, AllType):
            return AllType(t.a, t.k, a(t.e))
        if isinstance(t, AllIdxE):
            return AllIdxE(t.a, t.sort, t.p, a(t.e))
        return t

    def expand_sig(self, sig):
        quants = tuple((a, s, self.expand_prop(p)) for a, s, p in sig.quants)
        return CtorSig(quants, tuple(self.expand_type(t) for t in sig.args), self.expand_type(sig.result))

    def expand_node(self, node):
        """Expand definitions inside the types, indices and name terms of a term."""
        if isinstance(node, (S.Anno, S.EAnno, S.EInstTy)):
            inner = node.v if isinstance(node, S.Anno) else node.e
            new = self.expand_node(inner)
            t = self.expand_type(node.t)
            return replace(node, v=new, t=t) if isinstance(node, S.Anno) else replace(node, e=new, t=t)
        if isinstance(node, (S.VInst, S.EInstIdx)):
            inner = node.v if isinstance(node, S.VInst) else node.e
            new = self.expand_node(inner)
            i = self.expand_index(node.i)
            return replace(node, v=new, i=i) if isinstance(node, S.VInst) else replace(node, e=new, i=i)
        if isinstance(node, S.Pack):
            return replace(node, i=None if node.i is None else self.expand_index(node.i),
                           v=self.expand_node(node.v))
        if isinstance(node, S.Con):
            return replace(node, idx=tuple(self.expand_index(i) for i in node.idx),
                           args=tuple(self.expand_node(a) for a in node.args))
        if isinstance(node, S.NameFnV):
            return replace(node, m=self.expand_term(node.m))
        return S._map_children(node, self.expand_node)

    def base_ctx(self):
        entries = [TyCon("Nat", T.TYPE)]
        entries += [TyCon(d, k) for d, (k, _) in self.datatypes.items()]
        entries += [ValVar(f, ThkT(EMPTY, e)) for f, e in self.def_types.items()]
        for c in self.cells:
            entries.append(LocThunk(c.loc, c.t) if isinstance(c.t, T.EFF_TYPES) else LocRef(c.loc, c.t))
        return TypingCtx(tuple(entries), self)


def build_env(program):
    """Elaborate the declarations of a program (kinding is done by check_program)."""
    env = Env()
    for d in program.decls:
        if isinstance(d, S.NmtmDecl):
            env.terms[d.name] = I.IName(env.expand_term(d.m))
        elif isinstance(d, S.IdxtmDecl):
            env.terms[d.name] = env.expand_index(d.i)
        elif isinstance(d, S.TypeAlias):
            env.aliases[d.name] = (tuple(d.params), env.expand_type(d.t))
        elif isinstance(d, S.DataDecl):
            env.datatypes[d.name] = (d.kind, {})
    for d in program.decls:
        if isinstance(d, S.DataDecl):
            for c in d.ctors:
                if c.c in env.ctors:
                    _err("constructor %s declared twice" % c.c, c)
                sig = env.expand_sig(c.t)
                env.datatypes[d.name][1][c.c] = sig
                env.ctors[c.c] = (d.name, sig)
        elif isinstance(d, S.DefDecl):
            env.def_types[d.name] = AllIdxE(T.NS, NM_FN, TT, env.expand_type(d.t))
            env.def_bodies[d.name] = env.expand_node(d.e)
        elif isinstance(d, S.CellDecl):
            env.cells.append(replace(d, t=env.expand_type(d.t), v=env.expand_node(d.v)))
    return env


# ---------------------------------------------------------------- the checker

class Checker:
    def __init__(self, env=None, record=False):
        self.env = env or Env()
        self.rec = Recorder(record)

    # helpers
    def _sub(self, ctx, a, b, node):
        try:
            T.subtype_value(ctx, a, b)
        except T.SubtypeError as exc:
            raise CheckError(str(exc), exc.obligation, getattr(node, "span", None))

    def _sub_eff(self, ctx, e1, e2, node):
        try:
            T.subtype_eff(ctx, e1, e2)
        except T.SubtypeError as exc:
            raise CheckError(str(exc), exc.obligation, getattr(node, "span", None))

    def _kind(self, ctx, t, node):
        try:
            if isinstance(t, T.VALUE_TYPES):
                if T.kind_check(ctx, t) != T.TYPE:
                    _err("%s does not have kind Type" % T.show_type(t), node)
            else:
                T.wf_eff_type(ctx, t)
        except (T.KindError, N.SortError) as exc:
            raise CheckError(str(exc), _sort_obligation(exc), getattr(node, "span", None))

    def _sort(self, ctx, i, sort, node):
        try:
            got = T.sort_of(ctx, i, None if N.is_name_sort(sort) else sort)
        except (T.KindError, N.SortError) as exc:
            raise CheckError(str(exc), _sort_obligation(exc), getattr(node, "span", None))
        if N.is_name_sort(sort) and got != sort:
            _err("index %s has sort %s, expected %s" % (I.show(i), got, sort), node)

    def _prop(self, ctx, p, node):
        for q in conjuncts(p):
            if not T.prop_holds(ctx, q):
                _err("cannot establish %s" % q, node,
                     ("apart" if isinstance(q, Apart) else "equiv", q.i, q.j))

    def _seq(self, ctx, e1, e2, node):
        try:
            return T.effect_seq(ctx, e1, e2)
        except T.EffectSeqError as exc:
            exc.span = getattr(node, "span", None)
            raise

    def _member(self, ctx, m, x, node):
        if not T.subset(ctx, I.ISingle(m), x):
            _err("name %s is not a member of %s" % (N.show_term(m), I.show(x)), node, ("member", m, x))

    def _bind_idx(self, ctx, a, sort, p):
        return ctx.add(IdxVar(a, sort)).add(PropEntry(p))

    # ------------------------------------------------------------ values

    def synth_value(self, ctx, v):
        d = self.rec.open("vsyn", v)
        rule, t = self._synth_value(ctx, v)
        self.rec.close(d, t, rule)
        return t

    def _synth_value(self, ctx, v):
        if isinstance(v, S.Var):
            t = ctx.lookup_var(v.x)
            if t is None:
                _err("unbound variable %s" % v.x, v)
            return "vsyn-var", t
        if isinstance(v, S.DefV):
            t = self.env.def_types.get(v.f)
            if t is None:
                _err("unknown definition %s" % v.f, v)
            return "vsyn-def", ThkT(EMPTY, t)
        if isinstance(v, S.Anno):
            self._kind(ctx, v.t, v)
            self.check_value(ctx, v.v, v.t)
            return "vsyn-anno", v.t
        if isinstance(v, S.VInst):
            t = self.synth_value(ctx, v.v)
            if not isinstance(t, AllIdx):
                _err("explicit index instantiation of a non-quantified value of type %s" % T.show_type(t), v)
            self._sort(ctx, v.i, t.sort, v)
            env = {t.a: _idx_value(v.i, t.sort)}
            self._prop(ctx, prop_subst(t.p, env), v)
            return "vsyn-AllIndexElim", T.subst_idx(t.t, env)
        if isinstance(v, S.UnitV):
            return "vsyn-unit", UNIT
        if isinstance(v, S.NatV):
            return "vsyn-nat", NAT
        if isinstance(v, S.NameV):
            return "vsyn-name", NmT(I.ISingle(N.NLit(v.n)))
        if isinstance(v, S.NameFnV):
            try:
                N.check_name_sort(ctx.sort_ctx().sorts, v.m, NM_FN)
            except N.SortError as exc:
                raise CheckError(str(exc), None, v.span)
            return "vsyn-namefn", NmFnT(v.m)
        if isinstance(v, S.PairV):
            return "vsyn-pair", Prod(self.synth_value(ctx, v.v1), self.synth_value(ctx, v.v2))
        if isinstance(v, S.Inj) and isinstance(v.v, S.UnitV):
            return "vsyn-bool", BOOL
        if isinstance(v, (S.RefV, S.ThunkV)):
            e = ctx.lookup_loc(v.n)
            if e is None:
                _err("unknown location %s" % N.show_name(v.n), v)
            single = I.ISingle(N.NLit(v.n))
            if isinstance(v, S.RefV) and isinstance(e, LocRef):
                return "vsyn-ref", RefT(single, e.ty)
            if isinstance(v, S.ThunkV) and isinstance(e, LocThunk):
                return "vsyn-thunk", ThkT(single, e.ty)
            _err("location %s has the wrong kind of contents" % N.show_name(v.n), v)
        if isinstance(v, S.Con):
            return "vsyn-con", self._con(ctx, v)
        _err("annotation required (introduction form in synthesis position)", v)

    def _con(self, ctx, v):
        if v.c not in self.env.ctors:
            _err("unknown constructor %s" % v.c, v)
        _, sig = self.env.ctors[v.c]
        if len(v.idx) != len(sig.quants):
            _err("constructor %s needs %d explicit index instantiations, got %d"
                 % (v.c, len(sig.quants), len(v.idx)), v)
        if len(v.args) != len(sig.args):
            _err("constructor %s takes %d arguments" % (v.c, len(sig.args)), v)
        env = {}
        for (a, sort, p), i in zip(sig.quants, v.idx):
            self._sort(ctx, i, sort, v)
            env[a] = _idx_value(i, sort)
            self._prop(ctx, prop_subst(p, env), v)
        for arg, t in zip(v.args, sig.args):
            self.check_value(ctx, arg, T.subst_idx(t, env))
        return T.subst_idx(sig.result, env)

    def check_value(self, ctx, v, t):
        d = self.rec.open("vchk", v)
        rule = self._check_value(ctx, v, t)
        self.rec.close(d, t, rule)

    def _check_value(self, ctx, v, t):
        if isinstance(t, AllIdx) and not isinstance(v, (S.Var, S.Anno, S.VInst, S.DefV)):
            self.check_value(self._bind_idx(ctx, t.a, t.sort, t.p), v, t.t)
            return "vchk-AllIndexIntro"
        if isinstance(t, ExistsIdx) and isinstance(v, S.Pack):
            if v.i is None:
                _err("pack needs its index witness", v)
            self._sort(ctx, v.i, t.sort, v)
            env = {t.a: _idx_value(v.i, t.sort)}
            self._prop(ctx, prop_subst(t.p, env), v)
            self.check_value(ctx, v.v, T.subst_idx(t.t, env))
            return "vchk-ExistsIndexIntro"
        if isinstance(v, S.UnitV) and t == UNIT:
            return "vchk-unit"
        if isinstance(v, S.PairV) and isinstance(t, Prod):
            self.check_value(ctx, v.v1, t.a)
            self.check_value(ctx, v.v2, t.b)
            return "vchk-pair"
        if isinstance(v, S.Inj) and isinstance(t, Sum):
            self.check_value(ctx, v.v, t.a if v.i == 1 else t.b)
            return "vchk-inj"
        if isinstance(v, S.NameV) and isinstance(t, NmT):
            self._member(ctx, N.NLit(v.n), t.i, v)
            return "vchk-name"
        if isinstance(v, S.NameFnV) and isinstance(t, NmFnT):
            try:
                N.check_name_sort(ctx.sort_ctx().sorts, v.m, NM_FN)
                ok = N.name_convertible(v.m, t.m)
            except N.SortError as exc:
                raise CheckError(str(exc), None, v.span)
            if not ok:
                _err("name function %s is not convertible to %s" % (N.show_term(v.m), N.show_term(t.m)), v)
            return "vchk-namefn"
        if isinstance(v, S.RefV) and isinstance(t, RefT):
            e = ctx.lookup_loc(v.n)
            if not isinstance(e, LocRef):
                _err("unknown reference cell %s" % N.show_name(v.n), v)
            self._member(ctx, N.NLit(v.n), t.i, v)
            self._sub(ctx, e.ty, t.a, v)
            return "vchk-ref"
        if isinstance(v, S.ThunkV) and isinstance(t, ThkT):
            e = ctx.lookup_loc(v.n)
            if not isinstance(e, LocThunk):
                _err("unknown thunk cell %s" % N.show_name(v.n), v)
            self._member(ctx, N.NLit(v.n), t.i, v)
            self._sub_eff(ctx, e.ty, t.e, v)
            return "vchk-thunk"
        if isinstance(v, S.NatV) and t == NAT:
            return "vchk-nat"
        got = self.synth_value(ctx, v)
        self._sub(ctx, got, t, v)
        return "vchk-sub"

    # ------------------------------------------------------------ computations

    def synth_comp(self, ctx, m, e):
        """Synthesize a type-with-effects for e under namespace m."""
        return self._comp(ctx, m, e, None)

    def check_comp(self, ctx, m, e, target):
        d = self.rec.open("echk", e, N.show_term(m))
        rule = self._check_comp(ctx, m, e, target)
        self.rec.close(d, target, rule)

    def _check_comp(self, ctx, m, e, target):
        if isinstance(target, AllIdxE):
            if not S.is_terminal(e):
                got = self.synth_comp(ctx, m, e)
                self._sub_eff(ctx, got, target, e)
                return "echk-sub"
            self.check_comp(self._bind_idx(ctx, target.a, target.sort, target.p), m, e, target.e)
            return "echk-AllIndexIntro"
        if isinstance(target, AllType):
            self.check_comp(ctx.add(T.TyVar(target.a, target.k)), m, e, target.e)
            return "echk-AllIntro"
        got = self._comp(ctx, m, e, target.c, target.eff)
        if not isinstance(got, WithEff):
            _err("instantiation required: %s" % T.show_eff_type(got), e)
        if not T.effect_subsumes(ctx, got.eff, target.eff):
            _err("effect %s is not subsumed by %s" % (T.show_effect(got.eff), T.show_effect(target.eff)), e,
                 ("subsume", got.eff, target.eff))
        return "echk-sub"

    def _comp(self, ctx, m, e, c, eff=None):
        """Type-with-effects of e; when c is given the result's computation type is c.

        eff, when known, is the effect the enclosing check will subsume the
        result into; it is used only where local index variables would escape.
        """
        d = self.rec.open("esyn" if c is None else "echk", e, N.show_term(m))
        try:
            rule, out = self._comp_rule(ctx, m, e, c, eff)
        except T.TypeError_ as exc:
            if exc.span is None:
                exc.span = getattr(e, "span", None)
            raise
        if c is not None and isinstance(out, WithEff) and out.c != c:
            try:
                T.subtype_comp(ctx, out.c, c)
            except T.SubtypeError as exc:
                raise CheckError(str(exc), exc.obligation, getattr(e, "span", None))
            out = WithEff(c, out.eff)
        self.rec.close(d, out, rule)
        return out

    def _value_type(self, ctx, v, expected):
        if expected is None:
            return self.synth_value(ctx, v)
        self.check_value(ctx, v, expected)
        return expected

    def _close(self, ctx, out, bound, node, eff):
        """Keep locally bound index variables from escaping a result."""
        if not (bound & T.free_idx_vars(out)):
            return out
        if eff is not None and isinstance(out, WithEff) and not (bound & T.free_idx_vars(out.c)):
            if not T.effect_subsumes(ctx, out.eff, eff):
                _err("effect %s is not subsumed by %s" % (T.show_effect(out.eff), T.show_effect(eff)), node,
                     ("subsume", out.eff, eff))
            return WithEff(out.c, eff)
        _err("index variables %s escape their scope; annotate the expression"
             % ", ".join(sorted(bound & T.free_idx_vars(out))), node)

    def _comp_rule(self, ctx, m, e, c, eff=None):
        if isinstance(e, S.Ret):
            a = self._value_type(ctx, e.v, c.a if isinstance(c, Lift) else None)
            if c is not None and not isinstance(c, Lift):
                _err("ret where %s is expected" % T.show_comp(c), e)
            return "echk-ret", WithEff(Lift(a), PURE)
        if isinstance(e, S.Lam):
            if not isinstance(c, Arrow):
                _err("annotation required (introduction form in synthesis position)" if c is None
                     else "function where %s is expected" % T.show_comp(c), e)
            self.check_comp(ctx.add(ValVar(e.x, c.a)), m, e.e, c.e)
            return "echk-lam", WithEff(c, PURE)
        if isinstance(e, S.Let):
            first = self._comp(ctx, m, e.e1, None)
            first = T.instantiate_ns(first, m)
            if not (isinstance(first, WithEff) and isinstance(first.c, Lift)):
                _err("let-bound computation must produce a value, found %s" % T.show_eff_type(first), e.e1)
            rest = self._comp(ctx.add(ValVar(e.x, first.c.a)), m, e.e2, c, eff)
            if not isinstance(rest, WithEff):
                _err("instantiation required: %s" % T.show_eff_type(rest), e.e2)
            return "echk-let", WithEff(rest.c, self._seq(ctx, first.eff, rest.eff, e))
        if isinstance(e, S.Split):
            t = self.synth_value(ctx, e.v)
            if not isinstance(t, Prod):
                _err("split of a non-product %s" % T.show_type(t), e)
            inner = ctx.add(ValVar(e.x1, t.a)).add(ValVar(e.x2, t.b))
            return "echk-split", self._comp(inner, m, e.e, c, eff)
        if isinstance(e, S.Case):
            t = self.synth_value(ctx, e.v)
            if not isinstance(t, Sum):
                _err("case of a non-sum %s" % T.show_type(t), e)
            b1 = self._comp(ctx.add(ValVar(e.x1, t.a)), m, e.e1, c, eff)
            b2 = self._comp(ctx.add(ValVar(e.x2, t.b)), m, e.e2, c, eff)
            return "echk-case", self._join(ctx, [b1, b2], e)
        if isinstance(e, S.If):
            self.check_value(ctx, e.v, BOOL)
            b1 = self._comp(ctx, m, e.e1, c, eff)
            b2 = self._comp(ctx, m, e.e2, c, eff)
            return "echk-if", self._join(ctx, [b1, b2], e)
        if isinstance(e, S.Match):
            return "echk-match", self._match(ctx, m, e, c, eff)
        if isinstance(e, S.Unpack):
            t = self.synth_value(ctx, e.v)
            if not isinstance(t, ExistsIdx):
                _err("unpack of a non-existential %s" % T.show_type(t), e)
            ren = {t.a: _idx_value(e.a, t.sort, var=True)}
            inner = self._bind_idx(ctx, e.a, t.sort, prop_subst(t.p, ren))
            inner = inner.add(ValVar(e.x, T.subst_idx(t.t, ren)))
            out = self._comp(inner, m, e.e, c, eff)
            return "echk-ExistsIndexElim", self._close(inner, out, {e.a}, e, eff)
        if isinstance(e, S.Thunk):
            x = self._name_set(ctx, e.v)
            if isinstance(c, Lift) and isinstance(c.a, ThkT):
                self.check_comp(ctx, m, e.e, c.a.e)
                body = c.a.e
            else:
                body = self.synth_comp(ctx, m, e.e)
            ptr = I.IMap(m, x)
            return "echk-thunk", WithEff(Lift(ThkT(ptr, body)), Effect(ptr, EMPTY))
        if isinstance(e, S.Ref):
            x = self._name_set(ctx, e.v1)
            want = c.a.a if isinstance(c, Lift) and isinstance(c.a, RefT) else None
            a = self._value_type(ctx, e.v2, want)
            ptr = I.IMap(m, x)
            return "echk-ref", WithEff(Lift(RefT(ptr, a)), Effect(ptr, EMPTY))
        if isinstance(e, S.Scope):
            t = self.synth_value(ctx, e.v)
            if not isinstance(t, NmFnT):
                _err("scope needs a name function, found %s" % T.show_type(t), e)
            if not N.is_injective_fn(t.m):
                _err("scope name function %s is not injective" % N.show_term(t.m), e)
            return "echk-scope", self._comp(ctx, N.compose(m, t.m), e.e, c, eff)
        if isinstance(e, S.Prim):
            if e.op not in S.PRIMS or len(e.args) != S.PRIMS[e.op]:
                _err("unknown primitive %s/%d" % (e.op, len(e.args)), e)
            for a in e.args:
                self.check_value(ctx, a, NAT)
            return "esyn-prim", WithEff(Lift(PRIM_TYPES[e.op]), PURE)
        if isinstance(e, S.NmBin):
            x = self._name_set(ctx, e.v1)
            y = self._name_set(ctx, e.v2)
            return "esyn-namebin", WithEff(Lift(NmT(I.pointwise(x, y))), PURE)
        return self._synth_only(ctx, m, e)

    def _synth_only(self, ctx, m, e):
        if isinstance(e, S.EAnno):
            self._kind(ctx, e.t, e)
            self.check_comp(ctx, m, e.e, e.t)
            return "esyn-anno", e.t
        if isinstance(e, S.App):
            f = T.instantiate_ns(self._comp(ctx, m, e.e, None), m)
            if isinstance(f, (AllIdxE, AllType)):
                _err("instantiation required before application: %s" % T.show_eff_type(f), e)
            if not isinstance(f.c, Arrow):
                _err("application of a non-function of type %s" % T.show_comp(f.c), e)
            self.check_value(ctx, e.v, f.c.a)
            res = T.instantiate_ns(f.c.e, m)
            try:
                return "esyn-app", T.effect_coalesce(ctx, res, f.eff)
            except T.EffectSeqError as exc:
                exc.span = e.span
                raise
        if isinstance(e, S.Force):
            t = self.synth_value(ctx, e.v)
            if not isinstance(t, ThkT):
                _err("force of a non-thunk of type %s" % T.show_type(t), e)
            body = T.instantiate_ns(t.e, m)
            return "esyn-force", T.effect_coalesce(ctx, body, Effect(EMPTY, t.i))
        if isinstance(e, S.Get):
            t = self.synth_value(ctx, e.v)
            if not isinstance(t, RefT):
                _err("get of a non-reference of type %s" % T.show_type(t), e)
            return "esyn-get", WithEff(Lift(t.a), Effect(EMPTY, t.i))
        if isinstance(e, S.NameApp):
            f = self.synth_value(ctx, e.vm)
            if not isinstance(f, NmFnT):
                _err("name application of a non-function of type %s" % T.show_type(f), e)
            x = self._name_set(ctx, e.v)
            return "esyn-nameapp", WithEff(Lift(NmT(I.IMap(f.m, x))), PURE)
        if isinstance(e, S.EInstIdx):
            f = T.instantiate_ns(self._comp(ctx, m, e.e, None), m)
            if not isinstance(f, AllIdxE):
                _err("explicit index instantiation of a non-quantified computation", e)
            self._sort(ctx, e.i, f.sort, e)
            env = {f.a: _idx_value(e.i, f.sort)}
            self._prop(ctx, prop_subst(f.p, env), e)
            return "esyn-AllIndexElim", T.subst_idx(f.e, env)
        if isinstance(e, S.EInstTy):
            f = T.instantiate_ns(self._comp(ctx, m, e.e, None), m)
            if not isinstance(f, AllType):
                _err("explicit type instantiation of a non-polymorphic computation", e)
            self._kind(ctx, e.t, e)
            return "esyn-AllElim", T.subst_tvar(f.e, f.a, e.t)
        _err("annotation required (introduction form in synthesis position)", e)

    def _name_set(self, ctx, v):
        t = self.synth_value(ctx, v)
        if not isinstance(t, NmT):
            _err("expected a name, found %s" % T.show_type(t), v)
        return t.i

    def _join(self, ctx, branches, node):
        """Branch results: a common computation type and the union of effects."""
        for b in branches:
            if not isinstance(b, WithEff):
                _err("instantiation required in branch: %s" % T.show_eff_type(b), node)
        c = None
        for cand in branches:
            if all(b.c == cand.c or T.is_subtype(ctx, b.c, cand.c) for b in branches):
                c = cand.c
                break
        if c is None:
            _err("branches have incompatible types; annotate the expression", node)
        w, r = EMPTY, EMPTY
        for b in branches:
            w, r = T.union(w, b.eff.w), T.union(r, b.eff.r)
        return WithEff(c, Effect(w, r))

    def _match(self, ctx, m, e, c, eff=None):
        t = self.synth_value(ctx, e.v)
        head, args = T._spine(t)
        if not isinstance(head, TCon) or head.d not in self.env.datatypes:
            _err("match on a value of non-datatype type %s" % T.show_type(t), e)
        kind, ctors = self.env.datatypes[head.d]
        sorts = _param_sorts(kind)
        seen = set()
        results = []
        for arm in e.arms:
            if arm.c not in ctors:
                _err("%s is not a constructor of %s" % (arm.c, head.d), arm)
            if arm.c in seen:
                _err("duplicate arm for %s" % arm.c, arm)
            seen.add(arm.c)
            sig = ctors[arm.c]
            if len(arm.xs) != len(sig.args):
                _err("constructor %s binds %d variables" % (arm.c, len(sig.args)), arm)
            names = list(arm.idx)
            if names and len(names) != len(sig.quants):
                _err("constructor %s binds %d index variables" % (arm.c, len(sig.quants)), arm)
            inner = ctx
            env = {}
            taken = set(ctx.index_sorts()) | T.free_idx_vars(t)
            for k, (a, sort, p) in enumerate(sig.quants):
                b = names[k] if names else N.fresh(a, taken)
                taken.add(b)
                env[a] = _idx_value(b, sort, var=True)
                inner = self._bind_idx(inner, b, sort, prop_subst(p, env))
            _, res_args = T._spine(T.subst_idx(sig.result, env))
            eqs = [Equiv(x, y, s) for x, y, s in zip(args, res_args, sorts)]
            inner = inner.add(PropEntry(conj(eqs)))
            for x, at in zip(arm.xs, sig.args):
                inner = inner.add(ValVar(x, T.subst_idx(at, env)))
            out = self._comp(inner, m, arm.e, c, eff)
            bound = {v.a if isinstance(v, I.IVar) else v.m.a for v in env.values()}
            results.append(self._close(inner, out, bound, arm, eff))
        missing = set(ctors) - seen
        if missing:
            _err("non-exhaustive match, missing %s" % ", ".join(sorted(missing)), e)
        return self._join(ctx, results, e)


def _idx_value(i, sort, var=False):
    """An index term for a quantifier of the given sort (name sorts use IName)."""
    if var:
        return I.IName(N.NVar(i)) if N.is_name_sort(sort) else I.IVar(i)
    if N.is_name_sort(sort) and isinstance(i, I.IVar):
        return I.IName(N.NVar(i.a))
    return i


def _sort_obligation(exc):
    if isinstance(exc, I.ApartnessObligationFailed):
        return ("apart", exc.x, exc.y)
    return getattr(exc, "obligation", None)


def _param_sorts(kind):
    out = []
    while isinstance(kind, KIndexArrow):
        out.append(kind.sort)
        kind = kind.k
    return out


# ---------------------------------------------------------------- programs

def check_datatypes(env, ctx):
    for d, (kind, ctors) in env.datatypes.items():
        sorts = _param_sorts(kind)
        for c, sig in ctors.items():
            inner = ctx
            qvars = set()
            for a, sort, p in sig.quants:
                inner = inner.add(IdxVar(a, sort))
                try:
                    T.wf_prop(inner, p)
                except (T.KindError, N.SortError) as exc:
                    raise CheckError("constructor %s: %s" % (c, exc))
                inner = inner.add(PropEntry(p))
                qvars.add(a)
            for t in sig.args:
                try:
                    if T.kind_check(inner, t) != T.TYPE:
                        raise CheckError("constructor %s: argument %s is not of kind Type" % (c, T.show_type(t)))
                except (T.KindError, N.SortError) as exc:
                    raise CheckError("constructor %s: %s" % (c, exc))
            head, args = T._spine(sig.result)
            if head != TCon(d) or len(args) != len(sorts):
                raise CheckError("constructor %s must produce a full application of %s" % (c, d))
            for i in args:
                if not (_bare_vars(i) & qvars):
                    raise CheckError("constructor %s: result index %s needs a quantified variable as a "
                                     "union operand" % (c, I.show(i)))


def _bare_vars(i):
    if isinstance(i, I.IVar):
        return {i.a}
    if isinstance(i, I.IName) and isinstance(i.m, N.NVar):
        return {i.m.a}
    if isinstance(i, (I.ISep, I.IUnion)):
        return _bare_vars(i.x) | _bare_vars(i.y)
    return set()


def check_program(program, record=False, search_depth=None, star_depth=None):
    """Check every declaration; returns (checker, env).  Raises CheckError."""
    T.configure(search_depth, star_depth)
    env = build_env(program)
    chk = Checker(env, record)
    ctx = env.base_ctx()
    check_datatypes(env, ctx)
    decls = program.defs()
    for f, e in env.def_types.items():
        chk._kind(ctx, e, decls.get(f))
    for cell in env.cells:
        chk._kind(ctx, cell.t, cell)
        if isinstance(cell.t, T.VALUE_TYPES):
            chk.check_value(ctx, cell.v, cell.t)
    for f, body in env.def_bodies.items():
        inner = ctx.add(IdxVar(T.NS, NM_FN))
        chk.check_comp(inner, N.NVar(T.NS), body, env.def_types[f].e)
    if program.main is not None:
        main = program.main
        chk._kind(ctx, env.expand_type(main.t), main)
        chk.check_comp(ctx, N.IDENTITY, env.expand_node(main.e), env.expand_type(main.t))
    return chk, env


def synth_value(ctx, v):
    return Checker(ctx.defs).synth_value(ctx, v)


def check_value(ctx, v, t):
    return Checker(ctx.defs).check_value(ctx, v, t)


def synth_comp(ctx, m, e):
    return Checker(ctx.defs).synth_comp(ctx, m, e)


def check_comp(ctx, m, e, t):
    return Checker(ctx.defs).check_comp(ctx, m, e, t)
