"""Reference semantics used as test oracles.

Written independently of the package: name terms are evaluated with Python
closures (no substitution), and index terms are evaluated to Python
frozensets with Kleene stars unfolded a fixed number of times.
"""
from __future__ import annotations

import itertools

from fungi import indices as I
from fungi import names as N


def eval_term(m, env=None):
    """A Name, or a Python function for Nm -> ... terms."""
    env = env or {}
    if isinstance(m, N.NLit):
        return m.n
    if isinstance(m, N.NVar):
        return env[m.a]
    if isinstance(m, N.NBin):
        return N.Bin(eval_term(m.m1, env), eval_term(m.m2, env))
    if isinstance(m, N.NLam):
        return lambda v, m=m, env=env: eval_term(m.body, {**env, m.a: v})
    if isinstance(m, N.NApp):
        return eval_term(m.fn, env)(eval_term(m.arg, env))
    raise TypeError(m)


def eval_index(i, env=None, star_depth=3):
    """Frozenset of names, a name, or a Python function for index lambdas."""
    env = env or {}
    ev = lambda j, e=env: eval_index(j, e, star_depth)
    if isinstance(i, I.IVar):
        return env[i.a]
    if isinstance(i, I.IEmpty):
        return frozenset()
    if isinstance(i, I.ISingle):
        return frozenset([eval_term(i.m, env)])
    if isinstance(i, I.IName):
        return eval_term(i.m, env)
    if isinstance(i, (I.ISep, I.IUnion)):
        return ev(i.x) | ev(i.y)
    if isinstance(i, I.IMap):
        f = eval_term(i.m, env)
        return frozenset(f(n) for n in ev(i.x))
    if isinstance(i, I.ILam):
        return lambda v, i=i, env=env: eval_index(i.body, {**env, i.a: v}, star_depth)
    if isinstance(i, I.IApp):
        return ev(i.fn)(ev(i.arg))
    if isinstance(i, I.IFlatMap):
        f = _set_fn(ev(i.fn))
        return frozenset().union(*[f(n) for n in ev(i.x)]) if ev(i.x) else frozenset()
    if isinstance(i, I.IStar):
        f = _set_fn(ev(i.fn))
        out = frontier = ev(i.x)
        for _ in range(star_depth):
            frontier = frozenset().union(*[f(n) for n in frontier]) - out if frontier else frozenset()
            out |= frontier
        return out
    if isinstance(i, I.IUnit):
        return ()
    if isinstance(i, I.IPair):
        return (ev(i.i1), ev(i.i2))
    if isinstance(i, I.IProj):
        return ev(i.i)[i.side - 1]
    raise TypeError(i)


def _set_fn(f):
    """Index functions Nm => NmSet, or name functions lifted to singletons."""
    def g(n):
        r = f(n)
        return r if isinstance(r, frozenset) else frozenset([r])
    return g


def names_upto(atoms, size):
    """All names with at most `size` Bin nodes over the given atoms."""
    by = {0: list(atoms)}
    for k in range(1, size + 1):
        by[k] = [N.Bin(l, r) for j in range(k) for l in by[j] for r in by[k - 1 - j]]
    return [n for k in range(size + 1) for n in by[k]]


def small_sets(pool, size=2):
    out = [frozenset()]
    for k in range(1, size + 1):
        out.extend(frozenset(c) for c in itertools.combinations(pool, k))
    return out


# ---------------------------------------------------------------- verdict judge

EXTRA_ATOMS = (N.Sym("a"), N.Sym("b"))


def _atoms_of(ob):
    acc = set()
    for side in (ob.lhs, ob.rhs):
        if I.is_index(side):
            I.name_literals(side, acc)
        else:
            _term_atoms(side, acc)
    return sorted(acc | {N.LEAF} | set(EXTRA_ATOMS), key=repr)


def _term_atoms(m, acc):
    if isinstance(m, N.NLit):
        acc |= N.name_atoms(m.n)
    elif isinstance(m, N.NBin):
        _term_atoms(m.m1, acc)
        _term_atoms(m.m2, acc)
    elif isinstance(m, N.NLam):
        _term_atoms(m.body, acc)
    elif isinstance(m, N.NApp):
        _term_atoms(m.fn, acc)
        _term_atoms(m.arg, acc)


def _violated(kind, a, b):
    if isinstance(a, frozenset):
        return a != b if kind == "equiv" else bool(a & b)
    return a != b if kind == "equiv" else a == b


def _holds_at(ob, env1, env2, star_depth):
    ev = (lambda x, e: eval_index(x, e, star_depth)) if I.is_index(ob.lhs) else eval_term
    return not _violated(ob.kind, ev(ob.lhs, env1), ev(ob.rhs, env2))


def counterexample(form, ob, sorts, star_depth=4):
    """Search small instances for a violation; returns a description or None."""
    atoms = _atoms_of(ob)
    if form == "closed":
        return None if _holds_at(ob, {}, {}, star_depth) else "closed obligation fails"
    if form == "fn":
        f, g = eval_term(ob.lhs), eval_term(ob.rhs)
        pool = names_upto(atoms, 2 if ob.kind == "equiv" else 1)
        pairs = ((a, a) for a in pool) if ob.kind == "equiv" else itertools.product(pool, pool)
        for a, b in pairs:
            if _violated(ob.kind, f(a), g(b)):
                return "at %s, %s" % (N.show_name(a), N.show_name(b))
        return None
    if form == "var":
        pool = names_upto(atoms, 2 if len(sorts) == 1 else 1)
        for vals in itertools.product(pool, repeat=len(sorts)):
            env = dict(zip(sorted(sorts), vals))
            if not _holds_at(ob, env, env, star_depth):
                return "at %s" % env
        return None
    for X in small_sets(names_upto(atoms, 1), 2):
        if not _holds_at(ob, {"X": X}, {"X": X}, star_depth):
            return "at X = %s" % sorted(map(N.show_name, X))
    return None


def _split_pair(text):
    """'at (A, B): detail' -> (A, B), splitting at the top-level comma."""
    body = text[len("at ("):text.index("):")]
    depth = 0
    for k, ch in enumerate(body):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "," and depth == 0:
            return body[:k].strip(), body[k + 1:].strip()
    raise ValueError(text)


def witness_violates(form, ob, sorts, witness, star_depth=6):
    """Re-check a Refuted witness with the reference semantics."""
    from fungi.parser import parse_index, parse_name_term
    w = dict(witness)
    if form == "closed":
        return not _holds_at(ob, {}, {}, star_depth)
    if form == "fn":
        a, b = _split_pair(w["because"])
        f, g = eval_term(ob.lhs), eval_term(ob.rhs)
        na, nb = eval_term(parse_name_term(a)), eval_term(parse_name_term(b))
        return _violated(ob.kind, f(na), g(nb))
    if form == "var":
        env = {v: eval_term(parse_name_term(w[v])) for v in sorts}
        return not _holds_at(ob, env, env, star_depth)
    env = {"X": eval_index(parse_index(w["X"]))}
    return not _holds_at(ob, env, env, star_depth)


def judge(form, ob, sorts, res):
    """None when a verdict agrees with the reference semantics, else a complaint."""
    if res.status == "proven":
        bad = counterexample(form, ob, sorts)
        return None if bad is None else "proven but fails %s" % bad
    if res.status == "refuted":
        return None if witness_violates(form, ob, sorts, res.witness) else "refuted but the witness holds"
    return None
