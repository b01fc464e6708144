import pytest
from hypothesis import given

from fungi import corpus
from fungi import names as N
from fungi.parser import ParseError, parse_index, parse_name_term, parse_obligation, parse_program
from fungi.printer import show_program

import strategies as gen

FILES = ["dedup.fg"] + sorted(corpus.RUNS) + ["mistakes/%s.fg" % v for v in sorted(corpus.VARIANTS)]


@pytest.mark.parametrize("name", FILES)
def test_print_parse_is_stable(name):
    once = show_program(parse_program(corpus.source(name), name))
    assert show_program(parse_program(once)) == once


@pytest.mark.parametrize("name", FILES)
def test_printing_preserves_the_tree(name):
    p = parse_program(corpus.source(name), name)
    assert parse_program(show_program(p)) == p


def test_empty_file():
    with pytest.raises(ParseError) as exc:
        parse_program("", "empty.fg")
    assert "expected declaration" in str(exc.value)


def test_comment_only_file():
    with pytest.raises(ParseError, match="expected declaration"):
        parse_program("-- nothing here\n")


def test_error_position():
    with pytest.raises(ParseError) as exc:
        parse_program("main : (F Unit) |> <0; 0> =\n  ret (;\n", "bad.fg")
    assert (exc.value.span.file, exc.value.span.line) == ("bad.fg", 2)
    assert str(exc.value.span).startswith("bad.fg:2:")


def test_composition_is_right_associative():
    m = parse_name_term("'a * 'b * 'c")
    assert N.eval_name(m) == N.Bin(N.Sym("a"), N.Bin(N.Sym("b"), N.Sym("c")))


def test_obligation_line():
    o = parse_obligation("X : NmSet, Y : NmSet, X ## Y : NmSet |- X % Y == Y % X : NmSet")
    assert o.kind == "equiv" and set(o.sorts) == {"X", "Y"} and len(o.props) == 1


def test_obligation_line_without_sort():
    with pytest.raises(ParseError):
        parse_obligation("|- () == ()")


@given(gen.closed_terms(depth=4))
def test_name_term_round_trip(m):
    # the parser folds a Bin of two literals into one literal
    back = parse_name_term(N.show_term(m))
    assert N.name_convertible(back, m)
    assert N.show_term(parse_name_term(N.show_term(back))) == N.show_term(back)


@given(gen.star_free_indices())
def test_index_round_trip_is_stable(i):
    from fungi import indices as I
    once = I.show(parse_index(I.show(i)))
    assert I.show(parse_index(once)) == once
