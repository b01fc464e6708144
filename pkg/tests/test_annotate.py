import pytest

from fungi import annotate as A
from fungi import corpus
from fungi import syntax as S
from fungi import types as T
from fungi.parser import parse_expr, parse_program
from fungi.typecheck import check_program

PROGRAMS = ["dedup.fg"] + sorted(corpus.RUNS)


def load(name):
    return parse_program(corpus.source(name), name)


@pytest.mark.parametrize("name", PROGRAMS)
def test_annotations_split_and_rejoin(name):
    p = load(name)
    ann = A.program_annotations(p)
    erased = A.erase_program(p)
    assert A.annotate_program(erased, ann) == p
    assert A.erase_program(A.annotate_program(erased, ann)) == erased


@pytest.mark.parametrize("name", PROGRAMS)
def test_corpus_follows_the_discipline(name):
    assert A.program_violations(load(name)) == []


def test_erased_program_has_no_types(dedup_program):
    erased = A.erase_program(dedup_program)
    assert all(d.t is None for d in erased.decls if isinstance(d, (S.DefDecl, S.CellDecl)))
    assert not A.annotations(erased.defs()["dedup"])


def test_synthesis_matches_declared_types(dedup_program):
    out = A.synthesize_program(dedup_program)
    assert set(out) == {"def insrec", "def insert", "def dedup"}


def test_annotation_on_an_argument_breaks_the_discipline():
    e = parse_expr("let x = ret () in ret (x : Unit)")
    erased = S.erase(e)
    assert A.discipline_violations(erased, A.annotations(e))


def test_annotated_intro_in_eliminated_position_is_allowed():
    e = parse_expr("((fun x. ret x) : Unit -> (F Unit) |> <0; 0>) ()")
    assert A.discipline_violations(S.erase(e), A.annotations(e)) == []
