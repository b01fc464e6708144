from fungi import types as T
from fungi.audit import IMPRECISE, precise_effects, store_diff, subject_reduction_check
from fungi.dynamics import eval_expr
from fungi.names import Bin, LEAF, Sym, unary
from fungi.parser import parse_expr, parse_program
from fungi.typecheck import check_program
from fungi.dynamics import run_program


def test_terminal_has_no_effects():
    _, _, d = eval_expr(parse_expr("ret ()"))
    rep = precise_effects(d)
    assert rep.precise and rep.reads == rep.writes == frozenset()


def test_duplicate_writes_are_imprecise():
    _, _, d = eval_expr(parse_expr("let a = ref[@'n] () in ref[@'n] ()"))
    rep = precise_effects(d)
    assert rep.status == IMPRECISE
    assert rep.conflict.name == Sym("n")


def test_one_tile_writes_seven_names(harness):
    n2 = Sym("n2")
    run = harness.run([n2], [3])
    rep = precise_effects(run.deriv)
    want = {Bin(Sym("t"), Bin(n2, unary(i))) for i in range(5)}
    want |= {Bin(Sym("dd"), n2), Bin(Sym("r"), n2)}
    assert rep.precise and rep.writes == want


def test_subject_reduction_on_a_tile(harness):
    names = [Sym("n1"), Sym("n2")]
    run = harness.run(names, [5, 6])
    assert harness.audit(run, names).ok


def test_ret_unit_audits():
    p = parse_program("main : (F Unit) |> <0; 0> = ret ();")
    _, env = check_program(p)
    run = run_program(p, env)
    res = subject_reduction_check(run, env.expand_type(p.main.t))
    assert res.ok and not res.report.writes


def test_write_outside_the_static_type_is_reported():
    p = parse_program("main : (F Ref[{'t * 'n}] Unit) |> <{'t * 'n}; 0> = scope['t] ref[@'n] ();")
    _, env = check_program(p)
    run = run_program(p, env)
    narrower = T.WithEff(env.expand_type(p.main.t).c, T.PURE)
    res = subject_reduction_check(run, narrower)
    assert not res.ok
    assert res.outside_writes == [Bin(Sym("t"), Sym("n"))]


def test_missing_dd_collides():
    from fungi.corpus import adversarial_search
    found = adversarial_search("mistakes/missing_dd.fg")
    assert found is not None
    # without the 'dd tag a thunk lands on some element's output or trie name
    run = harness_for("mistakes/missing_dd.fg").run(list(found.names), list(found.values))
    locs = [ev.loc for ev in run.store.events[run.seeded:]]
    assert locs.count(found.colliding) == 2


def harness_for(defs):
    from fungi.corpus import DedupHarness
    return DedupHarness(defs)


def test_store_diff_of_identical_runs_is_empty(harness):
    names = [Sym("n1")]
    assert store_diff(harness.run(names, [2]), harness.run(names, [2])) == []
