import pytest
from hypothesis import given

from fungi import names as N
from fungi.names import Bin, Leaf, NApp, NBin, NLam, NLit, NVar, Num, Sym

import ground
import strategies as gen

L = NLit(Leaf())


def test_sort_of_literal():
    assert N.sort_name_term({}, L) == N.NM


def test_sort_of_successor():
    assert N.sort_name_term({}, NLam("x", NBin(L, NVar("x")))) == N.NM_FN


def test_pairing_a_function_is_a_sort_error():
    with pytest.raises(N.SortError):
        N.sort_name_term({}, NBin(NLam("x", NVar("x")), L))


def test_unbound_variable_is_a_sort_error():
    with pytest.raises(N.SortError):
        N.sort_name_term({}, NVar("q"))


def test_eval_beta():
    assert N.eval_name_term(NApp(NLam("x", NBin(L, NVar("x"))), L)) == NLit(Bin(Leaf(), Leaf()))


def test_eval_bin_of_literals():
    m = NBin(NLit(Sym("t")), NLit(Num(3)))
    assert N.eval_name_term(m) == NLit(Bin(Sym("t"), Num(3)))


def test_eval_higher_order():
    twice = NLam("f", NLam("x", NApp(NVar("f"), NVar("x"))))
    m = NApp(NApp(twice, NLam("y", NBin(NVar("y"), L))), NLit(Sym("a")))
    assert N.eval_name_term(m) == NLit(Bin(Sym("a"), Leaf()))


def test_stuck_on_free_variable():
    with pytest.raises(N.StuckTerm):
        N.eval_name_term(NVar("x"))


def test_convertible_alpha():
    assert N.name_convertible(NLam("a", NVar("a")), NLam("b", NVar("b")))


def test_convertible_beta():
    assert N.name_convertible(NApp(NLam("x", NVar("x")), L), L)


def test_not_convertible_swapped_pairs():
    assert not N.name_convertible(NLam("x", NBin(NVar("x"), L)), NLam("x", NBin(L, NVar("x"))))


def test_subst_avoids_capture():
    m = NLam("y", NBin(NVar("x"), NVar("y")))
    out = N.subst(m, "x", NVar("y"))
    assert isinstance(out, NLam) and out.a != "y"
    assert N.free_vars(out) == {"y"}


def test_injectivity_test():
    assert N.is_injective_fn(NLam("x", NBin(NLit(Sym("t")), NVar("x"))))
    assert not N.is_injective_fn(NLam("x", L))
    assert not N.is_injective_fn(NLam("x", NBin(NVar("x"), NVar("x"))))


def test_show_name_is_right_nested():
    assert N.show_name(Bin(Sym("t"), Bin(Sym("n"), Leaf()))) == "'t * 'n * ()"
    assert N.show_name(Bin(Bin(Sym("t"), Sym("n")), Leaf())) == "('t * 'n) * ()"


@given(gen.closed_terms(depth=4))
def test_evaluation_agrees_with_reference(m):
    assert N.eval_name(m) == ground.eval_term(m)


@given(gen.closed_terms(depth=4))
def test_normalization_preserves_sort_and_value(m):
    nf = N.normalize(m)
    assert N.sort_name_term({}, nf) == N.sort_name_term({}, m)
    assert nf == NLit(ground.eval_term(m))


@given(gen.open_terms(depth=4))
def test_normalization_is_idempotent_on_open_terms(case):
    m, env = case
    nf = N.normalize(m)
    assert N.normalize(nf) == nf
    assert N.sort_name_term(env, nf) == N.NM
    assert N.name_convertible(m, nf)
