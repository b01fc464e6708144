"""Equivalence and apartness of name terms and index terms.

The deductive side works on canonical set forms: a normalized name set is a
finite union of atoms, each atom a name-term template whose generator
variables range over opaque base sets (set variables, Kleene stars, residual
applications, or the universe).  Rules of the relational systems are applied
to templates structurally; the trace records the rule names used.

Refutation is never produced by search.  It is only issued when the semantic
oracle (module `oracle`) exhibits a counterexample at the configured bound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import indices as I
from . import names as N
from .context import (Apart, Conj, Equiv, IdxVar, PropEntry, Tt, conjuncts,
                      prop_free_vars)
from .indices import (IdxArrow, IEmpty, IName, IStar, IVar, NMSET, Product,
                      UnitSort)
from .names import NApp, NBin, NLam, NLit, NVar, NM, NmArrow

DEFAULT_SEARCH_DEPTH = 64
DEFAULT_STAR_DEPTH = 3
DEFAULT_ORACLE_DEPTH = 3


# ---------------------------------------------------------------- contexts and obligations

@dataclass(frozen=True)
class EquivVars:
    a: str
    b: str
    sort: object

    def __str__(self):
        return "%s == %s : %s" % (self.a, self.b, I.show_sort_syntax(self.sort))


@dataclass(frozen=True)
class ApartVars:
    a: str
    b: str
    sort: object

    def __str__(self):
        return "%s ## %s : %s" % (self.a, self.b, I.show_sort_syntax(self.sort))


@dataclass(frozen=True)
class RelCtx:
    entries: tuple = ()

    def add(self, e):
        return RelCtx(self.entries + (e,))

    def proj1(self):
        return {e.a: e.sort for e in self.entries}

    def proj2(self):
        return {e.b: e.sort for e in self.entries}

    def flip(self):
        return RelCtx(tuple(type(e)(e.b, e.a, e.sort) for e in self.entries))

    def __str__(self):
        return ", ".join(str(e) for e in self.entries)


EQUIV, APART = "equiv", "apart"


@dataclass(frozen=True)
class Obligation:
    ctx: RelCtx
    kind: str
    lhs: object
    rhs: object
    sort: object
    props: tuple = ()

    def __str__(self):
        op = "==" if self.kind == EQUIV else "##"
        ps = [str(p) for p in self.props]
        ctx = ", ".join([str(e) for e in self.ctx.entries] + ps)
        return "%s |- %s %s %s : %s" % (ctx, show_any(self.lhs), op, show_any(self.rhs),
                                        I.show_sort_syntax(self.sort))

    def flip(self):
        return Obligation(self.ctx.flip(), self.kind, self.rhs, self.lhs, self.sort, self.props)


def show_any(x):
    if I.is_index(x):
        return I.show(x, 1)
    return N.show_term(x, 1)


@dataclass(frozen=True)
class Proven:
    trace: tuple = ()
    proven = True
    status = "proven"

    def __str__(self):
        return "proven " + " ".join(self.trace)


@dataclass(frozen=True)
class Refuted:
    witness: tuple = ()
    proven = False
    status = "refuted"

    def __str__(self):
        return "refuted " + "; ".join("%s=%s" % kv for kv in self.witness)


@dataclass(frozen=True)
class Unknown:
    reason: str = "budget exhausted"
    proven = False
    status = "unknown"

    def __str__(self):
        return "unknown " + self.reason


# ---------------------------------------------------------------- extraction

def extract(typing_ctx):
    """Split a typing context into (propositions, relational context)."""
    props, rel = [], []
    entries = typing_ctx.entries if hasattr(typing_ctx, "entries") else typing_ctx
    for e in entries:
        if isinstance(e, IdxVar):
            rel.append(EquivVars(e.a, e.a, e.sort))
        elif isinstance(e, PropEntry):
            props.extend(conjuncts(e.p))
    return tuple(props), RelCtx(tuple(rel))


def relctx_of_sorts(sorts):
    return RelCtx(tuple(EquivVars(a, a, s) for a, s in sorts.items()))


# ---------------------------------------------------------------- canonical set forms

TOP = "TOP"


@dataclass(frozen=True)
class Atom:
    """The set { T[g := v] | each generator g ranges over its base }."""
    t: object
    gens: tuple = ()

    def gen_map(self):
        return dict(self.gens)

    def __str__(self):
        if not self.gens:
            return "{%s}" % N.show_term(self.t)
        gs = ", ".join("%s in %s" % (g, "U" if b == TOP else I.show(b, 1)) for g, b in self.gens)
        return "{%s | %s}" % (N.show_term(self.t), gs)


def ikey(i, env=None, depth=0):
    """Alpha-invariant structural key of an index (or name term)."""
    env = env or {}
    if not I.is_index(i):
        return N._canon(i, env, depth) if i != TOP else TOP
    if isinstance(i, IVar):
        return ("b", env[i.a]) if i.a in env else ("v", i.a)
    if isinstance(i, (I.ISingle, IName)):
        return (type(i).__name__, N._canon(i.m, env, depth))
    if isinstance(i, I.ILam):
        e = dict(env)
        e[i.a] = depth
        return ("lam", ikey(i.body, e, depth + 1))
    if isinstance(i, I.IMap):
        return ("map", N._canon(i.m, env, depth), ikey(i.x, env, depth))
    if isinstance(i, I.IProj):
        return ("prj", i.side, ikey(i.i, env, depth))
    parts = []
    for f in i.__dataclass_fields__:
        parts.append(ikey(getattr(i, f), env, depth))
    return (type(i).__name__,) + tuple(parts)


def atom_key(a):
    order = []
    _gen_order(a.t, dict(a.gens), order)
    gm = dict(a.gens)
    for g, _ in a.gens:
        if g not in order:
            order.append(g)
    env = {g: -1 - k for k, g in enumerate(order)}
    return (N._canon(a.t, env, 0), tuple(_bkey(gm[g]) for g in order))


def _bkey(b):
    return TOP if b == TOP else ikey(b)


def _gen_order(t, gm, out):
    if isinstance(t, NVar):
        if t.a in gm and t.a not in out:
            out.append(t.a)
    elif isinstance(t, NBin):
        _gen_order(t.m1, gm, out)
        _gen_order(t.m2, gm, out)
    elif isinstance(t, NApp):
        _gen_order(t.fn, gm, out)
        _gen_order(t.arg, gm, out)
    elif isinstance(t, NLam):
        _gen_order(t.body, gm, out)


def fresh_gen(avoid=()):
    return N.fresh("g", set(avoid))


def rename_gens(a):
    env = {}
    gens = []
    for g, b in a.gens:
        h = fresh_gen()
        env[g] = NVar(h)
        gens.append((h, b))
    return Atom(N.subst_many(a.t, env), tuple(gens))


def view(t):
    return N.unfold_lit(t)


def is_atomic_lit(t):
    return isinstance(t, NLit) and not isinstance(t.n, N.Bin)


def term_vars(t):
    return N.free_vars(t)


def occurs_properly(x, t):
    """x (a term) occurs as a proper subterm of t along Bin structure only."""
    t = view(t)
    if isinstance(t, NBin):
        return _occurs_bin(x, t.m1) or _occurs_bin(x, t.m2)
    return False


def _occurs_bin(x, t):
    if N.alpha_eq(x, t) or (isinstance(x, NLit) and isinstance(t, NLit) and N.is_subname(x.n, t.n)):
        return True
    t = view(t)
    if isinstance(t, NBin):
        return _occurs_bin(x, t.m1) or _occurs_bin(x, t.m2)
    return False


def contains_var_bin(t, v):
    """v occurs in t along Bin structure (not under an unknown function)."""
    t = view(t)
    if isinstance(t, NVar):
        return t.a == v
    if isinstance(t, NBin):
        return contains_var_bin(t.m1, v) or contains_var_bin(t.m2, v)
    return False


def match(pat, term, pvars, sigma):
    """First-order matching of pattern variables pvars; sigma is extended in place."""
    if isinstance(pat, NVar) and pat.a in pvars:
        if pat.a in sigma:
            return N.alpha_eq(N.normalize(sigma[pat.a]), N.normalize(term))
        sigma[pat.a] = term
        return True
    if isinstance(pat, NLit) and isinstance(term, NLit):
        return pat.n == term.n
    p, t = view(pat), view(term)
    if isinstance(p, NBin) and isinstance(t, NBin):
        return match(p.m1, t.m1, pvars, sigma) and match(p.m2, t.m2, pvars, sigma)
    if isinstance(p, NVar) and isinstance(t, NVar):
        return p.a == t.a
    if isinstance(p, NApp) and isinstance(t, NApp):
        return match(p.fn, t.fn, pvars, sigma) and match(p.arg, t.arg, pvars, sigma)
    if isinstance(p, NLam) and isinstance(t, NLam):
        return not (N.free_vars(p) & pvars) and N.alpha_eq(p, t)
    return False


# ---------------------------------------------------------------- the solver

class Solver:
    """Decision engine for one relational context plus propositions."""

    def __init__(self, ctx=None, props=(), search_depth=DEFAULT_SEARCH_DEPTH,
                 star_depth=DEFAULT_STAR_DEPTH, printed_dstar=False, sorts=None, defs=None):
        self.ctx = ctx or RelCtx()
        self.search_depth = search_depth
        self.star_depth = star_depth
        self.printed_dstar = printed_dstar
        self.defs = defs
        self.sorts = dict(sorts or {})
        self.sorts.update(self.ctx.proj1())
        self.sorts.update(self.ctx.proj2())
        self.ident = {}
        for e in self.ctx.entries:
            if isinstance(e, EquivVars) and e.a != e.b:
                self.ident[e.b] = e.a
        self.rewrites = {}
        self.hyps = []
        self.fn_hyps = []
        self.equiv_facts = []
        self._atoms_cache = {}
        self._load(props)

    # ------------------------------------------------ preprocessing

    def _load(self, props):
        plist = []
        for p in props:
            plist.extend(conjuncts(p))
        for e in self.ctx.entries:
            if isinstance(e, ApartVars):
                plist.append(Apart(_var_index(e.a, e.sort), _var_index(e.b, e.sort), e.sort))
        eqs = [p for p in plist if isinstance(p, Equiv)]
        changed = True
        while changed:
            changed = False
            for p in list(eqs):
                lhs, rhs = self.prep(p.i), self.prep(p.j)
                v, other = _var_side(lhs, rhs)
                if v is not None and v not in I.free_vars(other) and v not in self.rewrites:
                    self._add_rewrite(v, other)
                    eqs.remove(p)
                    changed = True
        self.equiv_facts = eqs
        for p in plist:
            if isinstance(p, Apart):
                self._add_apart_hyp(p)

    def _add_rewrite(self, v, other):
        for k in list(self.rewrites):
            self.rewrites[k] = I.subst(self.rewrites[k], {v: other})
        self.rewrites[v] = other
        self._atoms_cache.clear()

    def _add_apart_hyp(self, p):
        lhs, rhs = self.prep(p.i), self.prep(p.j)
        s = p.sort
        if s == NMSET or s == NM:
            la = self.atoms(lhs if s == NMSET else I.ISingle(_as_term(lhs)))
            ra = self.atoms(rhs if s == NMSET else I.ISingle(_as_term(rhs)))
            for a in la:
                for b in ra:
                    self.hyps.append((a, b))
        else:
            self.fn_hyps.append((ikey(I.normalize_index(lhs)), ikey(I.normalize_index(rhs))))

    def prep(self, x):
        """Apply variable identifications and rewrites; expand definitions."""
        if self.defs is not None and I.is_index(x):
            x = self.defs.expand_index(x)
        env = {}
        for b, a in self.ident.items():
            env[b] = IName(NVar(a)) if N.is_name_sort(self.sorts.get(a, NM)) else IVar(a)
        for _ in range(8):
            env2 = dict(env)
            env2.update(self.rewrites)
            if I.is_index(x):
                y = I.subst(x, env2)
            else:
                y = N.subst_many(x, I._name_env(env2))
            if y == x:
                break
            x = y
        return x

    # ------------------------------------------------ atoms

    def atoms(self, i):
        i = I.normalize_index(self.prep(i))
        k = ikey(i)
        hit = self._atoms_cache.get(k)
        if hit is None:
            hit = tuple(self._atoms(i))
            self._atoms_cache[k] = hit
        return hit

    def _atoms(self, i):
        if isinstance(i, IEmpty):
            return []
        if isinstance(i, I.ISingle):
            return [Atom(N.normalize(i.m), ())]
        if isinstance(i, (I.ISep, I.IUnion)):
            return self._atoms(i.x) + self._atoms(i.y)
        if isinstance(i, I.IMap):
            return [Atom(N.normalize(NApp(i.m, a.t)), a.gens) for a in self._atoms(i.x)]
        if isinstance(i, I.IFlatMap) and isinstance(i.fn, I.ILam):
            out = []
            for a in self._atoms(i.x):
                body = I.normalize_index(I.subst(i.fn.body, {i.fn.a: IName(a.t)}))
                for b in self._atoms(body):
                    out.append(Atom(b.t, a.gens + b.gens))
            return out
        if isinstance(i, IStar):
            fn = I.normalize_index(I.as_index_fn(i.fn))
            base = IStar(fn, i.x)
        else:
            base = i
        g = fresh_gen()
        return [Atom(NVar(g), ((g, base),))]

    def base_atom(self, b):
        g = fresh_gen()
        return Atom(NVar(g), ((g, b),))

    def step_atoms(self, star):
        """Atoms of F[[F*[[S]]]]: one application of the star function."""
        fn = star.fn
        if not isinstance(fn, I.ILam):
            return []
        g = fresh_gen()
        body = I.normalize_index(I.subst(fn.body, {fn.a: IName(NVar(g))}))
        return [Atom(b.t, ((g, star),) + b.gens) for b in self._atoms(body)]

    # ------------------------------------------------ inclusion

    def incl(self, a, b, d=0):
        """Trace proving atom a is included in atom b, or None."""
        if d > self.search_depth:
            return None
        if atom_key(a) == atom_key(b):
            return ["Eq-Refl"]
        pv = {g for g, _ in b.gens}
        sigma = {}
        if not match(b.t, a.t, pv, sigma):
            return None
        trace = ["Incl"]
        ga = a.gen_map()
        for g, base in b.gens:
            if g not in sigma:
                if base == TOP:
                    continue
                if not any(self.base_incl(ba, base, d + 1) for _, ba in a.gens):
                    return None
                continue
            r = self.term_in_base(sigma[g], ga, base, d + 1)
            if r is None:
                return None
            trace += r
        return trace

    def term_in_base(self, u, ga, base, d):
        if base == TOP:
            return ["Top"]
        u = N.normalize(u)
        if isinstance(u, NVar) and u.a in ga:
            return self.base_incl(ga[u.a], base, d)
        if isinstance(base, IStar):
            gens = tuple((g, b) for g, b in ga.items() if g in N.free_vars(u))
            return self.star_member(Atom(u, gens), base, d)
        return None

    def base_incl(self, b1, b2, d=0):
        if d > self.search_depth:
            return None
        if b2 == TOP:
            return ["Top"]
        if b1 == TOP:
            return None
        if ikey(b1) == ikey(b2):
            return ["Eq-Refl"]
        if isinstance(b2, IStar):
            return self.star_member(self.base_atom(b1), b2, d)
        return None

    def star_member(self, a, star, d=0):
        """Trace proving atom a is included in F*[[S]], by seeds or inversion."""
        if d > self.search_depth:
            return None
        for s in self.atoms(star.x):
            r = self.incl(a, s, d + 1)
            if r is not None:
                return ["Star-seed"] + r
        if len(a.gens) == 1 and isinstance(a.t, NVar) and a.t.a == a.gens[0][0]:
            b = a.gens[0][1]
            if isinstance(b, IStar) and ikey(b.fn) == ikey(star.fn):
                trace = ["Star-mono"]
                for s in self.atoms(b.x):
                    r = self.star_member(s, star, d + 1)
                    if r is None:
                        trace = None
                        break
                    trace += r
                if trace is not None:
                    return trace
        for t in self.step_atoms(star):
            if isinstance(t.t, NVar) and t.t.a == t.gens[0][0]:
                continue
            r = self.incl(a, t, d + 1)
            if r is not None:
                return ["Star-unfold"] + r
        return None

    def set_incl(self, left, right, d=0, unfold=None):
        """Every atom of `left` is included in some atom of `right`."""
        unfold = self.star_depth if unfold is None else unfold
        trace = []
        for a in left:
            r = self._atom_in_set(a, right, d, unfold)
            if r is None:
                return None
            trace += r
        return trace

    def _atom_in_set(self, a, right, d, unfold):
        for b in right:
            r = self.incl(a, b, d + 1)
            if r is not None:
                return r
        if unfold > 0:
            pieces = self.unfold_atom(a)
            if pieces is not None:
                r = self.set_incl(pieces, right, d + 1, unfold - 1)
                if r is not None:
                    return ["Star-split"] + r
        return None

    def unfold_atom(self, a):
        """Split an atom at its first star generator: seed part and step part."""
        for k, (g, b) in enumerate(a.gens):
            if isinstance(b, IStar):
                rest = a.gens[:k] + a.gens[k + 1:]
                out = []
                for s in self.atoms(b.x):
                    s = rename_gens(s)
                    out.append(Atom(N.normalize(N.subst(a.t, g, s.t)), rest + s.gens))
                nxt = I.normalize_index(I.IFlatMap(b.fn, b.x))
                h = fresh_gen()
                out.append(Atom(N.subst(a.t, g, NVar(h)), rest + ((h, IStar(b.fn, nxt)),)))
                return out
        return None

    # ------------------------------------------------ apartness

    def hyp_apart(self, a, b, d):
        for h1, h2 in self.hyps:
            if self.incl(a, h1, d + 1) is not None and self.incl(b, h2, d + 1) is not None:
                return ["Hyp"]
            if self.incl(a, h2, d + 1) is not None and self.incl(b, h1, d + 1) is not None:
                return ["Hyp", "D-Sym"]
        return None

    def apart_atoms(self, a, b, d=0):
        b = rename_gens(b)
        g = dict(a.gens)
        g.update(dict(b.gens))
        r = self.apart_tm(a.t, b.t, g, d)
        if r is not None:
            return r
        return self.hyp_apart(a, b, d)

    def sets_apart(self, left, right, d=0):
        trace = []
        for a in left:
            for b in right:
                r = self.apart_atoms(a, b, d + 1)
                if r is None:
                    return None
                trace += r
        return trace or ["D-Empty"]

    def _gens_of(self, t, gm):
        fv = N.free_vars(t)
        return tuple((g, b) for g, b in gm.items() if g in fv)

    def apart_tm(self, s, t, gm, d):
        if d > self.search_depth:
            return None
        s, t = N.normalize(s), N.normalize(t)
        fs, ft = N.free_vars(s), N.free_vars(t)
        if not fs and not ft:
            if isinstance(s, NLit) and isinstance(t, NLit):
                return ["D-Lit"] if s.n != t.n else None
            return None
        vs, vt = view(s), view(t)
        if isinstance(vs, NBin) and isinstance(vt, NBin):
            r = self.apart_tm(vs.m1, vt.m1, gm, d + 1)
            if r is not None:
                return ["D-Bin1"] + r
            r = self.apart_tm(vs.m2, vt.m2, gm, d + 1)
            if r is not None:
                return ["D-Bin2"] + r
        if (is_atomic_lit(vs) and isinstance(vt, NBin)) or (is_atomic_lit(vt) and isinstance(vs, NBin)):
            return ["D-Lit"]
        if (isinstance(vs, NApp) and isinstance(vt, NApp) and isinstance(vs.fn, NVar)
                and isinstance(vt.fn, NVar) and vs.fn.a == vt.fn.a and vs.fn.a in N.INJECTIVE_VARS):
            r = self.apart_tm(vs.arg, vt.arg, gm, d + 1)
            if r is not None:
                return ["D-Inj"] + r
        if isinstance(vs, NVar) and vs.a in gm:
            return self.apart_base_term(gm[vs.a], vt, gm, d + 1)
        if isinstance(vt, NVar) and vt.a in gm:
            r = self.apart_base_term(gm[vt.a], vs, gm, d + 1)
            return None if r is None else ["D-Sym"] + r
        if isinstance(vs, NVar) and isinstance(vt, NVar) and vs.a == vt.a:
            return None
        if isinstance(vs, NVar) and occurs_properly(vs, vt):
            return ["D-Occurs"]
        if isinstance(vt, NVar) and occurs_properly(vt, vs):
            return ["D-Occurs"]
        return self.hyp_apart(Atom(s, self._gens_of(s, gm)), Atom(t, self._gens_of(t, gm)), d)

    def apart_base_term(self, base, t, gm, d):
        t = N.normalize(t)
        if isinstance(t, NVar) and t.a in gm:
            return self.apart_bases(base, gm[t.a], d)
        return self.apart_base_atom(base, Atom(t, self._gens_of(t, gm)), d)

    def apart_bases(self, b1, b2, d):
        if d > self.search_depth or b1 == TOP or b2 == TOP:
            return None
        r = self.hyp_apart(self.base_atom(b1), self.base_atom(b2), d)
        if r is not None:
            return r
        if isinstance(b1, IStar) and isinstance(b2, IStar):
            r = self.d_star(b1, b2, d)
            if r is not None:
                return r
        if isinstance(b1, IStar):
            r = self.star_apart(b1, self.base_atom(b2), d)
            if r is not None:
                return r
        if isinstance(b2, IStar):
            r = self.star_apart(b2, self.base_atom(b1), d)
            if r is not None:
                return r
        return None

    def apart_base_atom(self, base, a, d):
        if base == TOP or d > self.search_depth:
            return None
        r = self.hyp_apart(self.base_atom(base), a, d)
        if r is not None:
            return r
        if isinstance(base, IStar):
            return self.star_apart(base, a, d)
        return None

    def star_apart(self, star, a, d):
        """F*[[S]] apart from atom a when every element strictly contains a's only element."""
        if a.gens:
            return None
        if not isinstance(star.fn, I.ILam):
            return None
        seeds = self.atoms(star.x)
        if not seeds:
            return ["D-Empty"]
        if not all(occurs_properly(a.t, s.t) for s in seeds):
            return None
        for st in self.step_atoms(star):
            h = st.gens[0][0]
            if not contains_var_bin(st.t, h):
                return None
        return ["Star-occurs"]

    def d_star(self, b1, b2, d):
        r1 = self.fn_apart(b1.fn, b2.fn, d + 1)
        if r1 is None:
            return None
        r2 = self.sets_apart(self.atoms(b1.x), self.atoms(b2.x), d + 1)
        if r2 is None:
            return None
        if self.printed_dstar:
            return ["D-Star"] + r1 + r2
        # the printed rule omits the seeds-versus-images cases; both are checked here
        r3 = self.sets_apart(self.atoms(b1.x), self.step_atoms(b2), d + 1)
        if r3 is None:
            return None
        r4 = self.sets_apart(self.step_atoms(b1), self.atoms(b2.x), d + 1)
        if r4 is None:
            return None
        return ["D-Star"] + r1 + r2 + ["D-Star-seeds"] + r3 + r4

    def fn_apart(self, f, g, d):
        """Index functions Nm => NmSet apart: every pair of arguments gives apart sets."""
        f = I.normalize_index(I.as_index_fn(f))
        g = I.normalize_index(I.as_index_fn(g))
        if (ikey(f), ikey(g)) in self.fn_hyps or (ikey(g), ikey(f)) in self.fn_hyps:
            return ["Var"]
        if not (isinstance(f, I.ILam) and isinstance(g, I.ILam)):
            return None
        x1, x2 = fresh_gen(), fresh_gen()
        la = self._with_top(self.atoms(I.subst(f.body, {f.a: IName(NVar(x1))})), x1)
        ra = self._with_top(self.atoms(I.subst(g.body, {g.a: IName(NVar(x2))})), x2)
        r = self.sets_apart(la, ra, d + 1)
        return None if r is None else ["D-Lam"] + r

    @staticmethod
    def _with_top(atoms, x):
        return [Atom(a.t, a.gens + ((x, TOP),)) for a in atoms]

    # ------------------------------------------------ entry points

    def name_terms(self, m):
        return N.normalize(_as_term(self.prep(m if not isinstance(m, IName) else m)))

    def decide(self, ob):
        """Deductive search only: a trace list, or None."""
        s = ob.sort
        lhs, rhs = self.prep(ob.lhs), self.prep(ob.rhs)
        if ob.kind == APART:
            if _is_var(lhs) and _is_var(rhs):
                k = (ikey(I.normalize_index(_as_index(lhs))), ikey(I.normalize_index(_as_index(rhs))))
                if k in self.fn_hyps or (k[1], k[0]) in self.fn_hyps:
                    return ["Var"]
            return self._apart(lhs, rhs, s)
        return self._equiv(lhs, rhs, s)

    def _apart(self, lhs, rhs, s):
        if isinstance(s, UnitSort):
            return ["D-Unit"]
        if s == NM:
            return self.apart_tm(_as_term(lhs), _as_term(rhs), {}, 0)
        if isinstance(s, NmArrow):
            if s.cod != NM or s.dom != NM:
                return None
            f, g = _eta(_as_term(lhs)), _eta(_as_term(rhs))
            x1, x2 = fresh_gen(), fresh_gen()
            b1 = N.normalize(NApp(f, NVar(x1)))
            b2 = N.normalize(NApp(g, NVar(x2)))
            r = self.apart_tm(b1, b2, {x1: TOP, x2: TOP}, 1)
            return None if r is None else ["D-Lam"] + r
        if s == NMSET:
            return self.sets_apart(self.atoms(lhs), self.atoms(rhs))
        if isinstance(s, IdxArrow):
            if s.s1 == NM and s.s2 == NMSET:
                return self.fn_apart(_as_index(lhs), _as_index(rhs), 0)
            if s.s1 == NMSET:
                f = I.normalize_index(_as_index(lhs))
                g = I.normalize_index(_as_index(rhs))
                if isinstance(f, I.ILam) and isinstance(g, I.ILam):
                    X1, X2 = fresh_gen(), fresh_gen()
                    r = self._apart(I.subst(f.body, {f.a: IVar(X1)}), I.subst(g.body, {g.a: IVar(X2)}), s.s2)
                    return None if r is None else ["D-Lam"] + r
            return None
        if isinstance(s, Product):
            l, r = I.normalize_index(_as_index(lhs)), I.normalize_index(_as_index(rhs))
            if isinstance(l, I.IPair) and isinstance(r, I.IPair):
                t1 = self._apart(l.i1, r.i1, s.s1)
                t2 = self._apart(l.i2, r.i2, s.s2) if t1 is not None else None
                if t1 is not None and t2 is not None:
                    return ["D-Proj1"] + t1 + ["D-Proj2"] + t2
            return None
        return None

    def _equiv(self, lhs, rhs, s):
        if isinstance(s, UnitSort):
            return ["Eq-Unit"]
        if N.is_name_sort(s):
            a, b = N.normalize(_as_term(lhs)), N.normalize(_as_term(rhs))
            if N.alpha_eq(a, b):
                return ["Eq-β", "E-Refl"] if isinstance(s, NmArrow) else ["Eq-β", "Eq-Bin"]
            if isinstance(s, NmArrow):
                fa, fb = N.normalize(_eta(a)), N.normalize(_eta(b))
                if N.alpha_eq(fa, fb):
                    return ["Eq-Lam", "Eq-β"]
            return None
        if s == NMSET:
            l, r = self.atoms(lhs), self.atoms(rhs)
            t1 = self.set_incl(l, r)
            if t1 is None:
                return None
            t2 = self.set_incl(r, l)
            if t2 is None:
                return None
            return ["Eq-Perm"] + t1 + t2
        if isinstance(s, IdxArrow):
            f = I.normalize_index(_as_index(lhs))
            g = I.normalize_index(_as_index(rhs))
            if ikey(f) == ikey(g):
                return ["Eq-Refl"]
            if isinstance(f, I.ILam) and isinstance(g, I.ILam):
                x = fresh_gen()
                arg = IName(NVar(x)) if N.is_name_sort(s.s1) else IVar(x)
                if not N.is_name_sort(s.s1):
                    self.sorts[x] = s.s1
                r = self._equiv(I.subst(f.body, {f.a: arg}), I.subst(g.body, {g.a: arg}), s.s2)
                return None if r is None else ["Eq-Lam"] + r
            return None
        if isinstance(s, Product):
            l, r = I.normalize_index(_as_index(lhs)), I.normalize_index(_as_index(rhs))
            if ikey(l) == ikey(r):
                return ["Eq-Refl"]
            if isinstance(l, I.IPair) and isinstance(r, I.IPair):
                t1 = self._equiv(l.i1, r.i1, s.s1)
                t2 = self._equiv(l.i2, r.i2, s.s2) if t1 is not None else None
                if t1 is not None and t2 is not None:
                    return ["Eq-Pair"] + t1 + t2
            return None
        return None

    def subset(self, x, y):
        """Derived inclusion X <= Y: Y is X plus a remainder, over canonical forms."""
        return self.set_incl(self.atoms(x), self.atoms(y))


def _var_index(a, sort):
    return IName(NVar(a)) if N.is_name_sort(sort) else IVar(a)


def _var_side(lhs, rhs):
    for v, other in ((lhs, rhs), (rhs, lhs)):
        if isinstance(v, IVar):
            return v.a, other
        if isinstance(v, IName) and isinstance(v.m, NVar):
            return v.m.a, other
    return None, None


def _is_var(x):
    return isinstance(x, (IVar, NVar)) or (isinstance(x, IName) and isinstance(x.m, NVar))


def _as_term(x):
    if isinstance(x, IName):
        return x.m
    if isinstance(x, IVar):
        return NVar(x.a)
    if I.is_index(x):
        raise TypeError("expected a name term, got index %s" % I.show(x))
    return x


def _as_index(x):
    if I.is_index(x):
        return x
    return IName(x)


def _eta(m):
    m = N.normalize(m)
    if isinstance(m, NLam):
        return m
    a = N.fresh("a", N.free_vars(m))
    return NLam(a, NApp(m, NVar(a)))


# ---------------------------------------------------------------- public decision API

def _free_in(ob):
    out = set()
    for side in (ob.lhs, ob.rhs):
        out |= I.free_vars(side) if I.is_index(side) else N.free_vars(side)
    for p in ob.props:
        out |= prop_free_vars(p)
    return out


def decide(ob, search_depth=DEFAULT_SEARCH_DEPTH, star_depth=DEFAULT_STAR_DEPTH,
           oracle_depth=DEFAULT_ORACLE_DEPTH, use_oracle=True, printed_dstar=False, defs=None,
           sorts=None):
    """Proven by search, Refuted only on an oracle witness, otherwise Unknown."""
    solver = Solver(ob.ctx, ob.props, search_depth, star_depth, printed_dstar, sorts=sorts, defs=defs)
    trace = solver.decide(ob)
    if trace is not None:
        return Proven(tuple(_dedup_trace(trace)))
    if use_oracle:
        from . import oracle
        res = oracle.oracle_check(ob, oracle_depth, star_depth, defs=defs, sorts=sorts)
        if res.status == oracle.FAILS:
            return Refuted(res.witness)
    return Unknown("search inconclusive within depth %d" % search_depth)


def _dedup_trace(trace):
    out = []
    for t in trace:
        if not out or out[-1] != t:
            out.append(t)
    return out


def decide_name_equiv(ob, **kw):
    return decide(Obligation(ob.ctx, EQUIV, ob.lhs, ob.rhs, ob.sort, ob.props), **kw)


def decide_name_apart(ob, **kw):
    return decide(Obligation(ob.ctx, APART, ob.lhs, ob.rhs, ob.sort, ob.props), **kw)


decide_index_equiv = decide_name_equiv
decide_index_apart = decide_name_apart


def oracle_check(ob, name_depth=DEFAULT_ORACLE_DEPTH, star_depth=DEFAULT_STAR_DEPTH, **kw):
    from . import oracle
    return oracle.oracle_check(ob, name_depth, star_depth, **kw)


def solver_for(sctx, search_depth=DEFAULT_SEARCH_DEPTH, star_depth=DEFAULT_STAR_DEPTH):
    """A solver for a sorting context (variable sorts plus propositions)."""
    sctx = I._as_sortctx(sctx)
    return Solver(relctx_of_sorts(sctx.sorts), sctx.props, search_depth, star_depth,
                  sorts=sctx.sorts, defs=sctx.defs)


def sepunion_premise(sctx, x, y):
    """The sort-sep-union premise: extracted context entails X ## Y."""
    s = solver_for(sctx)
    trace = s.sets_apart(s.atoms(x), s.atoms(y))
    return Proven(tuple(_dedup_trace(trace))) if trace is not None else Unknown("apartness not derivable")


def member(ctx, m, x, star_depth=DEFAULT_STAR_DEPTH, search_depth=DEFAULT_SEARCH_DEPTH):
    """Membership: proven via {m} included in x; refuted via {m} ## x."""
    if hasattr(ctx, "sort_ctx"):
        ctx = ctx.sort_ctx()
    if isinstance(ctx, I.SortCtx) or isinstance(ctx, dict):
        s = solver_for(ctx, search_depth, star_depth)
    else:
        s = Solver(ctx, (), search_depth, star_depth)
    single = s.atoms(I.ISingle(m))
    xs = s.atoms(x)
    t = s.set_incl(single, xs)
    if t is not None:
        return Proven(tuple(["Membership"] + _dedup_trace(t)))
    t = s.sets_apart(single, xs)
    if t is not None:
        return Refuted((("NonMembership", " ".join(_dedup_trace(t))),))
    return Unknown("membership undecided")
