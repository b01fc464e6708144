import pytest
from hypothesis import given

from fungi import indices as I
from fungi import names as N
from fungi.names import Bin, Leaf, NBin, NLam, NLit, NVar, Num, Sym
from fungi.parser import parse_index

import ground
import strategies as gen

L = NLit(Leaf())


def single(n):
    return I.ISingle(NLit(n))


def test_sort_of_empty():
    assert I.sort_index({}, I.EMPTY) == I.NMSET


def test_sort_of_distinct_prefixes():
    i = parse_index("('dd @@ {'n}) % ('r @@ {'n})")
    assert I.sort_index({}, i) == I.NMSET


def test_self_separation_fails():
    with pytest.raises(I.ApartnessObligationFailed):
        I.sort_index({}, I.ISep(single(Leaf()), single(Leaf())))


def test_separation_of_a_variable_with_itself_fails():
    with pytest.raises(I.ApartnessObligationFailed):
        I.sort_index({"X": I.NMSET}, parse_index("X % X"))


def test_reduce_map_empty():
    assert I.reduce_index(I.IMap(NLam("x", NVar("x")), I.EMPTY)) == ("reduce-map-empty", I.EMPTY)


def test_reduce_map_single():
    rule, out = I.reduce_index(I.IMap(NLam("x", NBin(L, NVar("x"))), single(Leaf())))
    assert rule == "reduce-map-single"
    assert out == single(Bin(Leaf(), Leaf()))


def test_reduce_proj():
    X, Y = I.IVar("X"), I.IVar("Y")
    assert I.reduce_index(I.IProj(1, I.IPair(X, Y))) == ("reduce-proj", X)


def test_no_head_redex():
    assert I.reduce_index(I.IVar("X")) == I.NO_REDEX


def test_kleene_rules_are_explicit():
    star = parse_index("<#x. () * x>*[[{()}]]")
    assert I.normalize_index(star) == star
    assert isinstance(I.kleene_outer(star), I.IMap)
    inner = I.kleene_inner(star)
    assert isinstance(inner, I.IStar) and inner.fn == star.fn


def test_normalize_map_over_union():
    i = I.IMap(NLam("a", NBin(NLit(Sym("t")), NVar("a"))), I.IUnion(single(Sym("n1")), single(Sym("n2"))))
    assert I.normalize_index(i) == I.IUnion(single(Bin(Sym("t"), Sym("n1"))), single(Bin(Sym("t"), Sym("n2"))))


def test_normalize_empty():
    assert I.normalize_index(I.EMPTY) == I.EMPTY


def test_normalize_flat_map():
    body = I.ISep(I.ISingle(NBin(NVar("x"), NLit(Num(0)))), I.ISingle(NBin(NVar("x"), NLit(Num(1)))))
    i = I.IFlatMap(I.ILam("x", N.NM, body), single(Leaf()))
    out = I.normalize_index(i)
    assert out == I.ISep(single(Bin(Leaf(), Num(0))), single(Bin(Leaf(), Num(1))))
    assert ground.eval_index(out) == ground.eval_index(i)


def test_member_of_empty_is_refuted():
    assert I.member({}, L, I.EMPTY).status == "refuted"


def test_member_of_star_unfolded_twice():
    star = I.IStar(I.IName(NLam("x", NBin(L, NVar("x")))), single(Leaf()))
    two = NLit(Bin(Leaf(), Bin(Leaf(), Leaf())))
    assert I.member({}, two, star, star_depth=3).status == "proven"


def test_member_of_dedup_expansion(dedup_env):
    i = dedup_env.expand_index(I.IApp(I.IVar("Dedup"), single(Sym("n2"))))
    nf = I.normalize_index(i)
    assert I.member({}, NLit(Bin(Sym("dd"), Sym("n2"))), nf).status == "proven"
    assert I.member({}, NLit(Bin(Sym("dd"), Sym("n1"))), nf).status == "refuted"


@given(gen.star_free_indices())
def test_normalization_preserves_extension(i):
    assert I.sort_index({}, i, apart=lambda *a: True) == I.NMSET
    nf = I.normalize_index(i)
    assert ground.eval_index(nf) == ground.eval_index(i)
    assert I.normalize_index(nf) == nf


@given(gen.star_free_indices())
def test_show_parse_round_trip(i):
    assert ground.eval_index(parse_index(I.show(i))) == ground.eval_index(i)
