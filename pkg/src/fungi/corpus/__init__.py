"""Example programs: list deduplication, its two recorded runs, and naming mistakes.

`dedup.fg` holds the definitions; `dedup_run_source` appends input cells and
a main expression.  `mistakes/` holds one variant of the definitions per
naming mistake, and `adversarial_search` looks for an input on which a
variant allocates some name twice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

from .. import names as N

RUNS = {"dedup_3439.fg": (3, 4, 3, 9), "dedup_1439.fg": (1, 4, 3, 9)}

VARIANTS = {
    "missing_dd": "missing tag",
    "missing_r": "missing tag",
    "missing_dd_r": "missing tag",
    "suffix_r": "prefix/suffix mismatch",
    "missing_t": "prefix/suffix mismatch",
    "overlapping_primes": "overlapping primes",
}

# tag atoms the dedup program itself uses
TAGS = ("t", "dd", "r")


def path(name):
    return resources.files(__name__) / name


def source(name):
    return path(name).read_text(encoding="utf-8")


def _lit(n):
    from ..printer import show_lit
    return show_lit(n)


def dedup_run_source(values, names=None, defs="dedup.fg", header=None, defs_text=None):
    """A dedup program over input list `values` stored at cells 'a1.. .

    Element names default to 'n1, 'n2, ...; the list must use distinct names.
    """
    k = len(values)
    names = list(names) if names is not None else [N.Sym("n%d" % (j + 1)) for j in range(k)]
    elems = [_lit(n) for n in names]
    cells = ["'a%d" % (j + 1) for j in range(k + 1)]

    def union(xs):
        return " % ".join("{%s}" % x for x in xs) if xs else "0"

    text = (defs_text if defs_text is not None else source(defs)).rstrip()
    out = [header or "-- dedup run on input %s" % list(values), "", text, ""]
    out.append("idxtm Xs : NmSet = %s;" % union(elems))
    out.append("idxtm Ps : NmSet = %s;" % union(cells))
    out.append("")
    out.append("cell 'emp : TrieNode[[0]][[{'emp}]] = Emp[0, {'emp}];")
    for j, v in enumerate(values):
        out.append("cell %s : ListNode[[%s]][[Ps]] = Cons[{%s}, %s, Ps](@%s, %d, ptr(%s));"
                   % (cells[j], union(elems[j:]), elems[j], union(elems[j + 1:]),
                      elems[j], v, cells[j + 1]))
    out.append("cell %s : ListNode[[0]][[Ps]] = Nil[0, Ps];" % cells[k])
    out.append("")
    out.append("main : (F List[[Xs]][[Ps + ('r @@ Xs)]])")
    out.append("    |> <Dedup Xs; Ps + {'emp} + ('t @@ Insert Xs) + ('dd @@ Xs)> =")
    out.append("  dedup[Xs][0][Ps][{'emp}] ptr(%s) ptr('emp);" % cells[0])
    return "\n".join(out) + "\n"


def run_file_source(name):
    """The expected text of a checked-in run file."""
    return dedup_run_source(RUNS[name], header="-- dedup run on input %s (generated; do not edit)"
                            % list(RUNS[name]))


# ---------------------------------------------------------------- adversarial inputs

def name_universe(atoms, depth=1):
    """All names of Bin-depth <= depth over the leaves (), 'a, 'b."""
    level = [N.LEAF] + [N.Sym(a) for a in atoms]
    out = list(level)
    for _ in range(depth):
        out = list(dict.fromkeys(level + [N.Bin(x, y) for x in out for y in out]))
    return out


def adversarial_inputs(atoms_pool=TAGS, values=(0, 1), depth=1):
    """Every 2-element input: distinct names over two atoms, values from `values`."""
    seen = set()
    for atoms in itertools.combinations(atoms_pool, 2):
        for n1, n2 in itertools.permutations(name_universe(atoms, depth), 2):
            for v in itertools.product(values, repeat=2):
                key = (n1, n2, v)
                if key not in seen:
                    seen.add(key)
                    yield (n1, n2), v


@dataclass
class Finding:
    names: tuple
    values: tuple
    colliding: object
    paths: tuple
    tried: int

    def __str__(self):
        return "input %s with names %s: %s written twice (%s / %s) after %d tries" % (
            list(self.values), ", ".join(N.show_name(n) for n in self.names),
            N.show_name(self.colliding), self.paths[0], self.paths[1], self.tried)


class DedupHarness:
    """Runs one set of dedup definitions on many inputs without re-elaborating."""

    def __init__(self, defs="dedup.fg", hash_bit=None, defs_text=None):
        from .. import parser
        from ..dynamics import hash_mult
        from ..typecheck import build_env
        self.defs = defs
        self.program = parser.parse_program(dedup_run_source((0,), defs=defs, defs_text=defs_text),
                                            defs or "<defs>")
        self.env = build_env(self.program)
        self.hash_bit = hash_bit or hash_mult
        from ..dynamics import closed_bodies
        self.bodies = closed_bodies(self.env)

    @staticmethod
    def _sets(names, k):
        from .. import indices as I
        cells = [N.Sym("a%d" % (j + 1)) for j in range(k + 1)]

        def union(ns):
            out = I.EMPTY
            for n in reversed(ns):
                single = I.ISingle(N.NLit(n))
                out = single if out == I.EMPTY else I.ISep(single, out)
            return out

        return cells, union

    def run(self, names, values):
        from .. import indices as I
        from .. import syntax as S
        from ..dynamics import Data, Evaluator, ROOT_NODE, RunResult, Store, terminal
        k = len(values)
        cells, union = self._sets(names, k)
        single = lambda n: I.ISingle(N.NLit(n))
        ps = union(cells)
        store = Store()
        emp = N.Sym("emp")
        store.write(emp, Data(S.Con("Emp", (I.EMPTY, single(emp)), ())))
        # back to front, so every cell only refers to cells written before it
        store.write(cells[k], Data(S.Con("Nil", (I.EMPTY, ps), ())))
        for j in reversed(range(k)):
            n = names[j]
            con = S.Con("Cons", (single(n), union(list(names[j + 1:])), ps),
                        (S.NameV(n), S.NatV(values[j]), S.RefV(cells[j + 1])))
            store.write(cells[j], Data(con))
        seeded = store.version
        head = S.Force(S.DefV("dedup"))
        for i in (union(list(names)), I.EMPTY, ps, single(emp)):
            head = S.EInstIdx(head, i)
        main = S.App(S.App(head, S.RefV(cells[0])), S.RefV(emp))
        ev = Evaluator(self.env, self.hash_bit, store, self.bodies)
        t, d = ev.eval(N.IDENTITY, ROOT_NODE, main)
        return RunResult(store, terminal(t), d, seeded, self.env)

    def static_type(self, names):
        """The main expression's type for input names `names`."""
        from .. import types as T
        cells, union = self._sets(names, len(names))
        t = T.subst_idx(self.program.main.t, {"Xs": union(list(names)), "Ps": union(cells)})
        return self.env.expand_type(t)

    def audit(self, run, names):
        """Subject-reduction check of a run against its static type."""
        from ..audit import subject_reduction_check
        from ..context import LocRef, LocThunk, TypingCtx
        from ..dynamics import grow_store_typing
        base = self.env.base_ctx()
        ctx = TypingCtx(tuple(e for e in base.entries if not isinstance(e, (LocRef, LocThunk))), self.env)
        ctx = grow_store_typing(run.store.at(run.seeded), ctx).ctx
        return subject_reduction_check(run, self.static_type(names), ctx)


def adversarial_search(defs, limit=None, hash_bit=None, defs_text=None, shuffle=None, **kw):
    """First input on which the program `defs` has imprecise effects, or None.

    `shuffle` (a random.Random) permutes the search order.
    """
    from ..audit import precise_effects
    from ..dynamics import Stuck
    harness = DedupHarness(defs, hash_bit, defs_text)
    inputs = adversarial_inputs(**kw)
    if shuffle is not None:
        inputs = list(inputs)
        shuffle.shuffle(inputs)
    tried = 0
    for names, values in inputs:
        if limit is not None and tried >= limit:
            break
        tried += 1
        try:
            run = harness.run(names, values)
        except Stuck:
            continue
        rep = precise_effects(run.deriv)
        if not rep.precise:
            c = rep.conflict
            return Finding(names, values, c.name, (c.left, c.right), tried)
    return None
