import pytest

from fungi import corpus
from fungi import syntax as S
from fungi import types as T
from fungi.context import ValVar, TypingCtx
from fungi.parser import parse_program
from fungi.typecheck import CheckError, check_program, synth_value


def check(text):
    return check_program(parse_program(text))


def test_ret_unit():
    check("main : (F Unit) |> <0; 0> = ret ();")


def test_ref_under_a_scope_writes_the_prefixed_name():
    check("main : (F Ref[{'t * 'n}] Unit) |> <{'t * 'n}; 0> = scope['t] ref[@'n] ();")


def test_ref_outside_the_declared_writes_fails():
    with pytest.raises(T.TypeError_):
        check("main : (F Ref[{'n}] Unit) |> <{'n}; 0> = scope['t] ref[@'n] ();")


def test_two_refs_at_one_name_overlap():
    with pytest.raises(T.EffectSeqError) as exc:
        check("main : (F Unit) |> <{'n}; 0> = let a = ref[@'n] () in let b = ref[@'n] () in ret ();")
    assert exc.value.span.line == 1


def test_get_reads_the_cell():
    check("cell 'c : Unit = ();\nmain : (F Unit) |> <0; {'c}> = get ptr('c);")


def test_name_value_checks_at_its_singleton():
    check("main : (F Nm[{'n}]) |> <0; 0> = ret @'n;")


def test_synth_variable():
    ctx = TypingCtx((ValVar("x", T.Prod(T.UNIT, T.UNIT)),))
    assert synth_value(ctx, S.Var("x")) == T.Prod(T.UNIT, T.UNIT)


def test_dedup_checks(dedup_program):
    chk, env = check_program(dedup_program)
    assert set(env.def_types) == {"insrec", "insert", "dedup"}


@pytest.mark.parametrize("name", sorted(corpus.RUNS))
def test_run_files_check(name):
    check_program(parse_program(corpus.source(name), name))


@pytest.mark.parametrize("variant", sorted(corpus.VARIANTS))
def test_mistakes_fail_statically(variant):
    path = "mistakes/%s.fg" % variant
    with pytest.raises(T.TypeError_) as exc:
        check_program(parse_program(corpus.source(path), path))
    assert exc.value.span is not None
    assert getattr(exc.value, "obligation", None)
