"""Read/write sets of evaluation derivations, and the subject-reduction harness."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import indices as I
from . import names as N
from . import syntax as S
from . import types as T
from .dynamics import grow_store_typing, store_typing_check

PRECISE = "Precise"
IMPRECISE = "Imprecise"

_TRANSPARENT = {"dyn-term", "dyn-name-app", "dyn-name-bin", "dyn-prim"}
_SINGLE = {"dyn-case", "dyn-split", "dyn-scope", "dyn-unpack"}


@dataclass(frozen=True)
class Conflict:
    name: object
    left: str
    right: str

    def __str__(self):
        return "%s written at %s and at %s" % (N.show_name(self.name), self.left, self.right)


@dataclass
class EffectReport:
    reads: frozenset
    writes: frozenset
    status: str = PRECISE
    conflict: Conflict = None

    @property
    def precise(self):
        return self.status == PRECISE


def precise_effects(d):
    """Structural read/write sets; sibling write sets must be disjoint."""
    conflicts = []
    r, w = _effects(d, "root", conflicts)
    if conflicts:
        return EffectReport(frozenset(r), frozenset(w), IMPRECISE, conflicts[0])
    return EffectReport(frozenset(r), frozenset(w))


def _effects(d, path, conflicts):
    rule = d.rule
    if rule in _TRANSPARENT:
        return set(), set()
    if rule in _SINGLE:
        return _effects(d.children[0], path + ".0", conflicts)
    if rule in ("dyn-let", "dyn-app"):
        # reads are R1 + R2; the older variant subtracting W1 from R2 does not
        # match the typing rules and is not used
        r1, w1 = _effects(d.children[0], path + ".0", conflicts)
        r2, w2 = _effects(d.children[1], path + ".1", conflicts)
        both = w1 & w2
        if both:
            p = min(both, key=N.show_name)
            conflicts.append(Conflict(p, _writer(d.children[0], path + ".0", p),
                                      _writer(d.children[1], path + ".1", p)))
        return r1 | r2, w1 | w2
    if rule in ("dyn-ref", "dyn-thunk"):
        return set(), {d.loc}
    if rule == "dyn-get":
        return {d.loc}, set()
    if rule == "dyn-force":
        r, w = _effects(d.children[0], path + ".0", conflicts)
        if d.loc is not None:
            r = r | {d.loc}
        return r, w
    raise ValueError("unknown rule %s" % rule)


def _writer(d, path, p):
    """Path of the first subderivation that writes p."""
    if d.rule in ("dyn-ref", "dyn-thunk") and d.loc == p:
        return path
    for k, c in enumerate(d.children):
        hit = _writer(c, "%s.%d" % (path, k), p)
        if hit:
            return hit
    return None


def effect_table(d):
    """Reports for every subderivation, keyed by path (for structural checks)."""
    out = {}

    def go(x, path):
        for k, c in enumerate(x.children):
            go(c, "%s.%d" % (path, k))
        out[path] = precise_effects(x)

    go(d, "root")
    return out


# ---------------------------------------------------------------- subject reduction

@dataclass
class Counterexample:
    what: str
    name: object = None
    static: object = None
    path: str = None

    def __str__(self):
        s = self.what
        if self.name is not None:
            s += ": " + N.show_name(self.name)
        if self.static is not None:
            s += " not in " + I.show(self.static)
        if self.path:
            s += " (at %s)" % self.path
        return s


@dataclass
class SRResult:
    report: EffectReport
    static: object
    outside_writes: list = field(default_factory=list)
    outside_reads: list = field(default_factory=list)
    store_violations: list = field(default_factory=list)
    terminal_error: str = None
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.counterexamples


def in_set(ctx, name, x):
    """Ground membership of a literal name in an index; Unknown counts as no."""
    return T.subset(ctx, I.ISingle(N.NLit(name)), x)


def subject_reduction_check(run, eff_type, ctx=None, ns=N.IDENTITY):
    """Compare a completed run against its static type C |> <W; R>."""
    from .typecheck import Checker
    env = run.env
    ctx = ctx if ctx is not None else env.base_ctx()
    report = precise_effects(run.deriv)
    res = SRResult(report, eff_type)
    if not report.precise:
        c = report.conflict
        res.counterexamples.append(Counterexample("overlapping writes", c.name, None, c.left + " / " + c.right))
    if not isinstance(eff_type, T.WithEff):
        res.counterexamples.append(Counterexample("static type has no effect annotation"))
        return res
    w = I.IMap(ns, eff_type.eff.w) if ns != N.IDENTITY else eff_type.eff.w
    r = I.IMap(ns, eff_type.eff.r) if ns != N.IDENTITY else eff_type.eff.r
    for p in sorted(report.writes, key=N.show_name):
        if not in_set(ctx, p, w):
            res.outside_writes.append(p)
            res.counterexamples.append(Counterexample("write outside the static write set", p, w,
                                                      _writer(run.deriv, "root", p)))
    for p in sorted(report.reads, key=N.show_name):
        if not in_set(ctx, p, r):
            res.outside_reads.append(p)
            res.counterexamples.append(Counterexample("read outside the static read set", p, r))
    grown = grow_store_typing(run.store, ctx, run.seeded)
    res.store_violations = grown.violations + store_typing_check(run.store, grown.ctx)
    for p, msg in res.store_violations:
        res.counterexamples.append(Counterexample("ill-typed store cell (%s)" % msg, p))
    try:
        Checker(env).check_comp(grown.ctx, ns, run.terminal, T.WithEff(eff_type.c, T.PURE))
    except T.TypeError_ as exc:
        res.terminal_error = str(exc)
        res.counterexamples.append(Counterexample("terminal does not check: %s" % exc))
    return res


def store_diff(run1, run2, allocated_only=True):
    """Locations whose erased contents differ between two runs, in first-write order."""
    a, b = _erased(run1, allocated_only), _erased(run2, allocated_only)
    keys = list(a) + [k for k in b if k not in a]
    return [k for k in keys if a.get(k) != b.get(k)]


def _erased(run, allocated_only):
    from .dynamics import Data
    start = run.seeded if allocated_only else 0
    out = {}
    for ev in run.store.events[start:]:
        e = run.store.cells[ev.loc]
        out[ev.loc] = ("data", S.erase(e.v)) if isinstance(e, Data) else ("susp", S.erase(e.e), e.scope)
    return out
