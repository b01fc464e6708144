"""Bounded semantic oracle for equivalence and apartness obligations.

Independent of the deductive engine: it instantiates the free variables with
concrete values drawn from small finite universes, evaluates both sides, and
compares the results extensionally.  A reported failure always comes with a
concrete witness; "holds" means no counterexample exists inside the bound.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from . import indices as I
from . import names as N
from .context import Apart, Equiv, conjuncts
from .indices import IdxArrow, NMSET, Product, UnitSort
from .names import Bin, Leaf, NApp, NBin, NLam, NLit, NVar, NM, NmArrow, Sym

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
INF = math.inf
DEFAULT_BUDGET = 4000
BASE_ATOMS = (Leaf(), Sym("a"), Sym("b"))


@dataclass(frozen=True)
class OracleResult:
    status: str
    witness: tuple = ()

    @property
    def fails(self):
        return self.status == FAILS


class _Budget:
    def __init__(self, n):
        self.n = n

    def spend(self, k=1):
        self.n -= k
        if self.n < 0:
            raise _OutOfBudget()


class _OutOfBudget(Exception):
    pass


# ---------------------------------------------------------------- name universes

class Universe:
    def __init__(self, atoms):
        self.atoms = tuple(atoms)
        self._by_size = {0: list(self.atoms)}

    def of_size(self, k):
        if k not in self._by_size:
            out = []
            for i in range(k):
                for l in self.of_size(i):
                    for r in self.of_size(k - 1 - i):
                        out.append(Bin(l, r))
            self._by_size[k] = out
        return self._by_size[k]

    def upto(self, d):
        out = []
        for k in range(d + 1):
            out.extend(self.of_size(k))
        return out


def obligation_atoms(ob):
    acc = set()
    for x in (ob.lhs, ob.rhs):
        _atoms_any(x, acc)
    for p in ob.props:
        for q in conjuncts(p):
            _atoms_any(q.i, acc)
            _atoms_any(q.j, acc)
    return acc


def _atoms_any(x, acc):
    if I.is_index(x):
        I.name_literals(x, acc)
    else:
        I._term_atoms(x, acc)


def _atom_order(a):
    return (type(a).__name__, str(a))


# ---------------------------------------------------------------- set values

@dataclass(frozen=True)
class SetVal:
    """known: elements found; bound: every name smaller than bound is decided exactly."""
    known: frozenset
    bound: float = INF


def _lit(n):
    return NLit(n)


def _size(n):
    return N.name_size(n)


def _term_growth(body, v):
    """Lower bound on size(body[v:=e]) - size(e), or None when v is absent."""
    body = N.normalize(body)
    if isinstance(body, NVar):
        return 0 if body.a == v else None
    if isinstance(body, NBin):
        g1, g2 = _term_growth(body.m1, v), _term_growth(body.m2, v)
        gs = [g for g in (g1, g2) if g is not None]
        return 1 + max(gs) if gs else None
    if v in N.free_vars(body):
        return 0 if isinstance(body, NApp) else None
    return None


CONST = "const"


def _idx_growth(body, a):
    """Growth of element sizes of a set-valued body in the variable a.

    Returns an int lower bound, CONST when no element depends on a, INF for
    an empty body, or None when unknown.
    """
    if a not in I.free_vars(body):
        return CONST
    if isinstance(body, I.ISingle):
        g = _term_growth(body.m, a)
        return CONST if g is None else g
    if isinstance(body, (I.ISep, I.IUnion)):
        g1, g2 = _idx_growth(body.x, a), _idx_growth(body.y, a)
        if g1 is None or g2 is None:
            return None
        if CONST in (g1, g2):
            return None
        return min(g1, g2)
    if isinstance(body, I.IMap):
        gx = _idx_growth(body.x, a)
        if gx is None:
            return None
        b = N.fresh("b", N.free_vars(body.m) | {a})
        mb = N.normalize(NApp(body.m, NVar(b)))
        in_m = _term_growth(mb, a)
        via_x = None
        if gx != CONST and gx != INF:
            gm = _term_growth(mb, b)
            via_x = None if gm is None else gx + gm
        cands = [g for g in (in_m, via_x) if g is not None]
        return max(cands) if cands else None
    return None


class Evaluator:
    def __init__(self, star_depth, budget, max_elems=4000):
        self.star_depth = star_depth
        self.budget = budget
        self.max_elems = max_elems

    def name(self, m):
        self.budget.spend()
        return N.eval_name(m)

    def set(self, i):
        return self._ev(I.normalize_index(i))

    def _ev(self, i):
        self.budget.spend()
        if isinstance(i, I.IEmpty):
            return SetVal(frozenset())
        if isinstance(i, I.ISingle):
            return SetVal(frozenset([N.eval_name(i.m)]))
        if isinstance(i, (I.ISep, I.IUnion)):
            x, y = self._ev(i.x), self._ev(i.y)
            return SetVal(x.known | y.known, min(x.bound, y.bound))
        if isinstance(i, I.IMap):
            x = self._ev(i.x)
            known = frozenset(N.eval_name(NApp(i.m, _lit(e))) for e in x.known)
            return SetVal(known, self._map_bound(i.m, x, known))
        if isinstance(i, I.IFlatMap):
            fn = I.normalize_index(I.as_index_fn(i.fn))
            x = self._ev(i.x)
            known, bound = set(), INF
            for e in x.known:
                r = self.set(I.subst(fn.body, {fn.a: I.IName(_lit(e))}))
                known |= r.known
                bound = min(bound, r.bound)
            if x.bound != INF:
                bound = min(bound, self._hidden_bound(fn, x.bound, bool(x.known)))
            return SetVal(frozenset(known), bound)
        if isinstance(i, I.IStar):
            return self._star(i)
        raise N.StuckTerm("cannot evaluate index %s" % I.show(i))

    def _map_bound(self, m, x, known):
        if x.bound == INF:
            return INF
        v = N.fresh("v", N.free_vars(m))
        g = _term_growth(N.normalize(NApp(m, NVar(v))), v)
        if g is None:
            return INF if known else _size(N.eval_name(NApp(m, _lit(Leaf()))))
        return x.bound + g

    def _hidden_bound(self, fn, xb, any_known):
        g = _idx_growth(fn.body, fn.a)
        if g == INF:
            return INF
        if g == CONST:
            return INF if any_known else 0
        if g is None:
            return 0
        return xb + g

    def _star(self, i):
        fn = I.normalize_index(I.as_index_fn(i.fn))
        x = self._ev(i.x)
        known = set(x.known)
        frontier = set(x.known)
        inner = INF
        for _ in range(self.star_depth):
            new = set()
            for e in frontier:
                r = self.set(I.subst(fn.body, {fn.a: I.IName(_lit(e))}))
                new |= r.known
                inner = min(inner, r.bound)
            frontier = new - known
            known |= new
            if not frontier or len(known) > self.max_elems:
                break
        g = _idx_growth(fn.body, fn.a)
        bound = inner
        if frontier:
            if isinstance(g, int) and g >= 1:
                bound = min(bound, min(_size(e) for e in frontier) + g)
            else:
                bound = 0
        if x.bound != INF:
            bound = min(bound, x.bound if isinstance(g, int) else 0)
        return SetVal(frozenset(known), bound)


# ---------------------------------------------------------------- semantic relations

def set_equiv(x, y):
    for a, b in ((x, y), (y, x)):
        for e in sorted(a.known - b.known, key=_size):
            if _size(e) < b.bound:
                return FAILS, "%s in one side only" % N.show_name(e)
    if x.bound == INF and y.bound == INF:
        return HOLDS, ""
    return INCONCLUSIVE, ""


def set_apart(x, y):
    common = x.known & y.known
    if common:
        e = min(common, key=_size)
        return FAILS, "%s in both sides" % N.show_name(e)
    exact = (all(_size(e) < y.bound for e in x.known) and all(_size(e) < x.bound for e in y.known)
             and (x.bound == INF or y.bound == INF))
    return (HOLDS, "") if exact else (INCONCLUSIVE, "")


class Semantics:
    def __init__(self, universe, name_depth, star_depth, budget):
        self.u = universe
        self.name_depth = name_depth
        self.ev = Evaluator(star_depth, budget)
        self.budget = budget
        self.arg_names = universe.upto(max(0, name_depth - 1))
        self.arg_sets = set_pool(universe, 1)[:24]

    def rel(self, kind, x, y, sort):
        """(status, detail) for closed x, y."""
        if isinstance(sort, UnitSort):
            return HOLDS, ""
        if sort == NM:
            a, b = self.ev.name(_term(x)), self.ev.name(_term(y))
            same = a == b
            if kind == "equiv":
                return (HOLDS, "") if same else (FAILS, "%s vs %s" % (N.show_name(a), N.show_name(b)))
            return (FAILS, "both are %s" % N.show_name(a)) if same else (HOLDS, "")
        if sort == NMSET:
            a, b = self.ev.set(_index(x)), self.ev.set(_index(y))
            return set_equiv(a, b) if kind == "equiv" else set_apart(a, b)
        if isinstance(sort, NmArrow):
            args = [_lit(e) for e in self.arg_names] if sort.dom == NM else None
            if args is None:
                return INCONCLUSIVE, "unsupported domain"
            return self._fn(kind, x, y, sort.cod, args, lambda f, a: NApp(_term(f), a), N.show_term)
        if isinstance(sort, IdxArrow):
            if sort.s1 == NM:
                args = [I.IName(_lit(e)) for e in self.arg_names]
            elif sort.s1 == NMSET:
                args = self.arg_sets
            else:
                return INCONCLUSIVE, "unsupported domain"
            return self._fn(kind, x, y, sort.s2, args, lambda f, a: I.IApp(_index(f), a), I.show)
        if isinstance(sort, Product):
            x, y = I.normalize_index(_index(x)), I.normalize_index(_index(y))
            if not (isinstance(x, I.IPair) and isinstance(y, I.IPair)):
                return INCONCLUSIVE, "not a pair"
            s1, d1 = self.rel(kind, x.i1, y.i1, sort.s1)
            s2, d2 = self.rel(kind, x.i2, y.i2, sort.s2)
            if FAILS in (s1, s2):
                return FAILS, d1 if s1 == FAILS else d2
            if INCONCLUSIVE in (s1, s2):
                return INCONCLUSIVE, ""
            return HOLDS, ""
        return INCONCLUSIVE, "unsupported sort"

    def _fn(self, kind, f, g, cod, args, app, show):
        status = HOLDS
        if kind == "equiv":
            pairs = ((a, a) for a in args)
        else:
            pairs = _diagonal([args, args])
        for a, b in pairs:
            s, d = self.rel(kind, app(f, a), app(g, b), cod)
            if s == FAILS:
                return FAILS, "at (%s, %s): %s" % (show(a), show(b), d)
            if s == INCONCLUSIVE:
                status = INCONCLUSIVE
        return status, ""


def _term(x):
    return x.m if isinstance(x, I.IName) else x


def _index(x):
    return x if I.is_index(x) else I.IName(x)


# ---------------------------------------------------------------- variable pools

def set_pool(u, name_depth):
    elems = u.upto(name_depth)
    out = [I.EMPTY]
    out += [I.ISingle(_lit(e)) for e in elems]
    out += [I.IUnion(I.ISingle(_lit(a)), I.ISingle(_lit(b))) for a, b in itertools.combinations(elems, 2)]
    return out


def name_fn_pool(u, injective_only=False):
    a = NVar("a")
    cs = [_lit(c) for c in u.atoms[:3]]
    inj = [NLam("a", a)]
    inj += [NLam("a", NBin(c, a)) for c in cs]
    inj += [NLam("a", NBin(a, c)) for c in cs]
    if injective_only:
        return inj
    return inj + [NLam("a", c) for c in cs[:2]]


def index_fn_pool(u, sort):
    cs = [_lit(c) for c in u.atoms[:2]]
    if sort.s1 == NM and sort.s2 == NMSET:
        a = NVar("a")
        out = [I.ILam("a", NM, I.EMPTY), I.ILam("a", NM, I.ISingle(a))]
        out += [I.ILam("a", NM, I.ISingle(NBin(c, a))) for c in cs]
        out += [I.ILam("a", NM, I.ISingle(c)) for c in cs[:1]]
        out += [I.ILam("a", NM, I.IUnion(I.ISingle(a), I.ISingle(NBin(cs[0], a))))]
        return out
    if sort.s1 == NMSET and sort.s2 == NMSET:
        X = I.IVar("X")
        out = [I.ILam("X", NMSET, X), I.ILam("X", NMSET, I.EMPTY)]
        out += [I.ILam("X", NMSET, I.ISingle(cs[0]))]
        out += [I.ILam("X", NMSET, I.IMap(NLam("b", NBin(c, NVar("b"))), X)) for c in cs]
        out += [I.ILam("X", NMSET, I.IUnion(X, I.ISingle(cs[0])))]
        return out
    return None


def pool_for(u, sort, name_depth, var):
    if sort == NM:
        return [I.IName(_lit(e)) for e in u.upto(name_depth)]
    if isinstance(sort, NmArrow):
        if sort.dom == NM and sort.cod == NM:
            return [I.IName(f) for f in name_fn_pool(u, var in N.INJECTIVE_VARS)]
        return None
    if sort == NMSET:
        return set_pool(u, min(1, name_depth))
    if isinstance(sort, UnitSort):
        return [I.IUnit()]
    if isinstance(sort, IdxArrow):
        return index_fn_pool(u, sort)
    if isinstance(sort, Product):
        p1 = pool_for(u, sort.s1, min(1, name_depth), var)
        p2 = pool_for(u, sort.s2, min(1, name_depth), var)
        if p1 is None or p2 is None:
            return None
        return [I.IPair(a, b) for a, b in itertools.islice(_diagonal([p1, p2]), 200)]
    return None


def _diagonal(doms):
    """All tuples from the product of finite lists, ordered by sum of positions."""
    doms = [list(d) for d in doms]
    if any(not d for d in doms):
        return
    if not doms:
        yield ()
        return
    top = sum(len(d) - 1 for d in doms)
    for total in range(top + 1):
        yield from _with_sum(doms, 0, total)


def _with_sum(doms, k, total):
    if k == len(doms) - 1:
        if total < len(doms[k]):
            yield (doms[k][total],)
        return
    for i in range(min(total, len(doms[k]) - 1) + 1):
        for rest in _with_sum(doms, k + 1, total - i):
            yield (doms[k][i],) + rest


# ---------------------------------------------------------------- entry point

def infer_free_sorts(ob, known):
    out = {}

    def term(m, head=False):
        if isinstance(m, NVar):
            if m.a not in known:
                out.setdefault(m.a, N.NM_FN if head else NM)
        elif isinstance(m, NBin):
            term(m.m1)
            term(m.m2)
        elif isinstance(m, NApp):
            term(m.fn, True)
            term(m.arg)
        elif isinstance(m, NLam):
            inner = dict(known)
            inner[m.a] = NM
            sub = infer_free_sorts_term(m.body, inner)
            out.update({k: v for k, v in sub.items() if k not in out})

    def idx(i):
        if isinstance(i, I.IVar):
            if i.a not in known:
                out.setdefault(i.a, NMSET)
        elif isinstance(i, (I.ISingle, I.IName)):
            term(i.m)
        elif isinstance(i, I.IMap):
            term(i.m, True)
            idx(i.x)
        elif isinstance(i, I.ILam):
            k2 = dict(known)
            k2[i.a] = i.sort
            sub = {}
            for v in I.free_vars(i.body) - set(k2):
                sub[v] = NMSET
            out.update({k: v for k, v in sub.items() if k not in out})
        else:
            for f in getattr(i, "__dataclass_fields__", {}):
                c = getattr(i, f)
                if I.is_index(c):
                    idx(c)

    for x in (ob.lhs, ob.rhs):
        idx(x) if I.is_index(x) else term(x)
    for p in ob.props:
        for q in conjuncts(p):
            idx(q.i)
            idx(q.j)
    return out


def infer_free_sorts_term(m, known):
    out = {}
    for v in N.free_vars(m):
        if v not in known:
            out[v] = NM
    return out


def oracle_check(ob, name_depth=3, star_depth=3, budget=DEFAULT_BUDGET, defs=None, sorts=None):
    """Search for a closing instantiation that violates the obligation."""
    from .relations import ApartVars, EquivVars
    bud = _Budget(budget)
    atoms = set(BASE_ATOMS) | obligation_atoms(ob)
    u = Universe(sorted(atoms, key=lambda a: (a not in BASE_ATOMS, _atom_order(a))))
    sem = Semantics(u, name_depth, star_depth, bud)

    entries = list(ob.ctx.entries)
    bound = {e.a for e in entries} | {e.b for e in entries}
    extra = dict(sorts or {})
    extra.update(infer_free_sorts(ob, {v: None for v in bound} | {k: v for k, v in (sorts or {}).items()}))
    for v in sorted(_free(ob) - bound):
        entries.append(EquivVars(v, v, extra.get(v, NMSET)))

    # one search dimension per equivalence entry, a filtered pair per apartness entry
    dims = []
    for e in entries:
        pool = pool_for(u, e.sort, name_depth, e.a)
        if pool is None:
            return OracleResult(INCONCLUSIVE, (("reason", "no finite pool for sort %s" % e.sort),))
        if isinstance(e, ApartVars):
            pool = pool[:40]
            dims.append((e, [(p, q) for p, q in itertools.product(pool, pool)]))
        else:
            dims.append((e, pool))

    complete = True
    try:
        for combo in _diagonal([d for _, d in dims]):
            bud.spend()
            s1, s2 = {}, {}
            ok = True
            for (e, _), val in zip(dims, combo):
                if isinstance(e, ApartVars):
                    v1, v2 = val
                    st, _d = sem.rel("apart", v1, v2, e.sort)
                    if st != HOLDS:
                        ok = False
                        break
                    s1[e.a], s2[e.b] = v1, v2
                else:
                    s1[e.a] = val
                    s2[e.b] = val
            if not ok:
                continue
            both = dict(s2)
            both.update(s1)
            prop_state = HOLDS
            for p in ob.props:
                for q in conjuncts(p):
                    kind = "apart" if isinstance(q, Apart) else "equiv"
                    st, _d = sem.rel(kind, _close(q.i, both, defs), _close(q.j, both, defs), q.sort)
                    if st == FAILS:
                        prop_state = FAILS
                        break
                    if st == INCONCLUSIVE:
                        prop_state = INCONCLUSIVE
                if prop_state == FAILS:
                    break
            if prop_state == FAILS:
                continue
            st, detail = sem.rel(ob.kind, _close(ob.lhs, s1, defs), _close(ob.rhs, s2, defs), ob.sort)
            if st == FAILS and prop_state == HOLDS:
                wit = tuple(sorted((k, _show_val(v)) for k, v in both.items()))
                return OracleResult(FAILS, wit + (("because", detail),))
            if st != HOLDS or prop_state != HOLDS:
                complete = False
    except _OutOfBudget:
        return OracleResult(INCONCLUSIVE, (("reason", "oracle budget exhausted"),))
    except (N.StuckTerm, N.FuelExhausted) as exc:
        return OracleResult(INCONCLUSIVE, (("reason", str(exc)),))
    return OracleResult(HOLDS if complete else INCONCLUSIVE)


def _free(ob):
    out = set()
    for x in (ob.lhs, ob.rhs):
        out |= I.free_vars(x) if I.is_index(x) else N.free_vars(x)
    for p in ob.props:
        for q in conjuncts(p):
            out |= I.free_vars(q.i) | I.free_vars(q.j)
    return out


def _close(x, env, defs):
    if defs is not None and I.is_index(x):
        x = defs.expand_index(x)
    if I.is_index(x):
        return I.subst(x, env)
    return N.subst_many(x, I._name_env(env))


def _show_val(v):
    if isinstance(v, I.IName):
        return N.show_term(N.normalize(v.m))
    if I.is_index(v):
        return I.show(I.normalize_index(v))
    return N.show_term(v)


def ground_set(i, star_depth=3, budget=DEFAULT_BUDGET):
    """Names of a closed index, with Kleene stars unfolded star_depth times."""
    return Evaluator(star_depth, _Budget(budget)).set(i).known
