"""Random generators for name terms, indices and obligations.

Every generator takes a `pick(lo, hi)` function so the same code serves
hypothesis (shrinkable draws) and plain seeded `random.Random` loops.
"""
from __future__ import annotations

import random

from hypothesis import strategies as st

from fungi import indices as I
from fungi import names as N
from fungi import relations as R

ATOMS = (N.LEAF, N.Sym("t"), N.Sym("r"), N.Num(0), N.Num(1))
FN = N.NM_FN


def rng_pick(rng):
    return lambda lo, hi: rng.randint(lo, hi)


def hyp_pick(draw):
    return lambda lo, hi: draw(st.integers(lo, hi))


def name(pick, depth=2, atoms=ATOMS):
    if depth == 0 or pick(0, 2) == 0:
        return atoms[pick(0, len(atoms) - 1)]
    return N.Bin(name(pick, depth - 1, atoms), name(pick, depth - 1, atoms))


class TermGen:
    """Well-sorted name terms of sort Nm or Nm -> Nm over a variable context."""

    def __init__(self, pick, atoms=ATOMS):
        self.pick = pick
        self.atoms = atoms
        self.k = 0

    def fresh(self):
        self.k += 1
        return "v%d" % self.k

    def term(self, sort, env, depth):
        pick = self.pick
        vars_ = [a for a, s in env.items() if s == sort]
        if sort == FN:
            if vars_ and pick(0, 3) == 0:
                return N.NVar(vars_[pick(0, len(vars_) - 1)])
            a = self.fresh()
            return N.NLam(a, self.term(N.NM, {**env, a: N.NM}, max(0, depth - 1)))
        choice = pick(0, 3) if depth > 0 else pick(0, 1)
        if choice == 0 or (choice == 1 and not vars_):
            return N.NLit(name(pick, 1, self.atoms))
        if choice == 1:
            return N.NVar(vars_[pick(0, len(vars_) - 1)])
        if choice == 2:
            return N.NBin(self.term(N.NM, env, depth - 1), self.term(N.NM, env, depth - 1))
        return N.NApp(self.term(FN, env, depth - 1), self.term(N.NM, env, depth - 1))

    def body(self, var, depth=2):
        """A Nm term in which `var` occurs (as a template C[var])."""
        pick = self.pick
        if depth == 0 or pick(0, 2) == 0:
            return N.NVar(var)
        other = N.NLit(self.atoms[pick(0, len(self.atoms) - 1)])
        inner = self.body(var, depth - 1)
        return N.NBin(inner, other) if pick(0, 1) else N.NBin(other, inner)

    def fn(self, depth=2):
        a = self.fresh()
        if self.pick(0, 5) == 0:
            return N.NLam(a, N.NLit(self.atoms[self.pick(0, 1)]))
        return N.NLam(a, self.body(a, depth))


@st.composite
def closed_terms(draw, sort=N.NM, depth=4):
    return TermGen(hyp_pick(draw)).term(sort, {}, depth)


@st.composite
def open_terms(draw, depth=4):
    """(term, env of sorts) with free variables x : Nm and f : Nm -> Nm."""
    env = {"x": N.NM, "f": FN}
    return TermGen(hyp_pick(draw)).term(N.NM, env, depth), env


@st.composite
def names_st(draw, depth=3):
    return name(hyp_pick(draw), depth)


def star_free_index(pick, depth=3, gen=None):
    """A closed NmSet index without stars."""
    gen = gen or TermGen(pick)
    c = pick(0, 4) if depth > 0 else pick(0, 1)
    if c == 0:
        return I.EMPTY
    if c == 1:
        return I.ISingle(gen.term(N.NM, {}, 2))
    if c == 2:
        return I.IUnion(star_free_index(pick, depth - 1, gen), star_free_index(pick, depth - 1, gen))
    if c == 3:
        return I.IMap(gen.fn(), star_free_index(pick, depth - 1, gen))
    a = gen.fresh()
    body = I.IUnion(I.ISingle(gen.body(a)), I.ISingle(gen.body(a)))
    return I.IFlatMap(I.ILam(a, N.NM, body), star_free_index(pick, depth - 1, gen))


@st.composite
def star_free_indices(draw, depth=3):
    return star_free_index(hyp_pick(draw), depth)


# ---------------------------------------------------------------- obligations

def _ob(ctx, kind, lhs, rhs, sort):
    return R.Obligation(ctx, kind, lhs, rhs, sort)


def obligation(pick, form):
    """(form, obligation, sorts) for one of four families.

    closed: closed Nm terms.  fn: closed Nm -> Nm functions.
    var: templates over name variables.  set: maps over a set variable X,
    with an optional Kleene star for apartness.
    """
    gen = TermGen(pick)
    kind = (R.EQUIV, R.APART)[pick(0, 1)]
    # equal by construction: the right side is a detour around the left
    same = kind == R.EQUIV and pick(0, 1)
    if form == "closed":
        m = gen.term(N.NM, {}, 3)
        rhs = N.NApp(N.NLam("z", N.NVar("z")), m) if same else gen.term(N.NM, {}, 3)
        return _ob(R.RelCtx(), kind, m, rhs, N.NM), {}
    if form == "fn":
        f = gen.fn()
        g = N.NLam("z", N.NApp(f, N.NVar("z"))) if same else gen.fn()
        return _ob(R.RelCtx(), kind, f, g, FN), {}
    if form == "var":
        f = gen.fn()
        g = N.NLam("z", N.NApp(f, N.NVar("z"))) if same else gen.fn()
        if kind == R.EQUIV:
            sorts = {"x": N.NM}
            lhs, rhs = N.NApp(f, N.NVar("x")), N.NApp(g, N.NVar("x"))
        else:
            sorts = {"x": N.NM, "y": N.NM}
            lhs, rhs = N.NApp(f, N.NVar("x")), N.NApp(g, N.NVar("y"))
        return _ob(R.relctx_of_sorts(sorts), kind, N.normalize(lhs), N.normalize(rhs), N.NM), sorts
    sorts = {"X": I.NMSET}
    X = I.IVar("X")
    f = gen.fn()
    lhs = I.IMap(f, X)
    if same:
        # map fusion: f[[X]] against (f o id)[[id[[X]]]]
        rhs = I.IMap(N.NLam("z", N.NApp(f, N.NVar("z"))), I.IMap(N.NLam("w", N.NVar("w")), X))
    else:
        rhs = I.IMap(gen.fn(), X)
    if kind == R.APART and pick(0, 1):
        step = gen.fn(1)
        lhs = I.IStar(I.IName(step), lhs)
    if kind == R.APART and pick(0, 3) == 0:
        rhs = X
    return _ob(R.relctx_of_sorts(sorts), kind, lhs, rhs, I.NMSET), sorts


FORMS = ("closed", "fn", "var", "set")


def obligations(seed, n):
    rng = random.Random(seed)
    pick = rng_pick(rng)
    for k in range(n):
        form = FORMS[k % len(FORMS)]
        ob, sorts = obligation(pick, form)
        yield form, ob, sorts
