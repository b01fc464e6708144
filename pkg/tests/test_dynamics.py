import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fungi import names as N
from fungi import syntax as S
from fungi.dynamics import Data, Stuck, Store, eval_expr, hash_example, hash_mult, replay
from fungi.names import Bin, LEAF, Sym
from fungi.parser import parse_expr

import dedup_model

T_NS = N.NLam("a", N.NBin(N.NLit(Sym("t")), N.NVar("a")))


def test_ref_under_a_namespace():
    store, t, d = eval_expr(parse_expr("ref[@'n] ()"), ns=T_NS)
    loc = Bin(Sym("t"), Sym("n"))
    assert store.cells == {loc: Data(S.UnitV())}
    assert t == S.Ret(S.RefV(loc))
    assert d.rule == "dyn-ref"


def test_get_leaves_the_store_unchanged():
    store = Store()
    store.write(Sym("c"), Data(S.NatV(7)))
    out, t, d = eval_expr(parse_expr("get ptr('c)"), store=store)
    assert t == S.Ret(S.NatV(7))
    assert out.version == 1 and d.output.store == d.input.store


def test_rewriting_a_name_is_logged_as_overwrite():
    store, _, _ = eval_expr(parse_expr("let a = ref[@'n] () in ref[@'n] ()"))
    assert [ev.kind for ev in store.events] == ["Extend", "Overwrite"]


def test_stuck_on_forcing_a_non_thunk():
    with pytest.raises(Stuck):
        eval_expr(parse_expr("force ()"))


def test_hashes():
    assert [hash_example(3, i) for i in range(4)] == [1, 1, 1, 1]
    assert [hash_example(1, i) for i in range(4)] == [0, 0, 0, 0]
    assert hash_mult(1, 0) == 2654435761 & 1
    assert hash_example(5, 2) == hash_mult(5, 2)


def model_loc(s):
    """Model location strings as names."""
    parts = s.split(".")
    if parts[0] == "t":
        return Bin(Sym("t"), Bin(Sym(parts[1]), N.unary(int(parts[2]))))
    if parts[0] in ("dd", "r"):
        return Bin(Sym(parts[0]), Sym(parts[1]))
    return Sym(parts[0])


@settings(max_examples=25)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=5), st.sampled_from([hash_mult, hash_example]))
def test_runs_agree_with_the_plain_model(values, hash_bit):
    harness = _harness(hash_bit)
    names = [Sym("n%d" % (j + 1)) for j in range(len(values))]
    run = harness.run(names, values)
    out, alloc, writes = dedup_model.run(values, hash_bit)
    assert [ev.loc for ev in run.store.events[run.seeded:]] == [model_loc(w) for w in writes]
    assert run.terminal == S.Ret(S.RefV(model_loc(out)))
    assert not run.store.overwrites()


_HARNESSES = {}


def _harness(hash_bit):
    from fungi.corpus import DedupHarness
    if hash_bit not in _HARNESSES:
        _HARNESSES[hash_bit] = DedupHarness(hash_bit=hash_bit)
    return _HARNESSES[hash_bit]


def _nodes(d):
    yield d
    for c in d.children:
        yield from _nodes(c)


def test_replay_is_deterministic_and_framed(harness):
    run = harness.run([Sym("n1"), Sym("n2")], [3, 4])
    rng = random.Random(0)
    nodes = list(_nodes(run.deriv))
    for d in [run.deriv] + rng.sample(nodes, 30):
        store, t = replay(run, d)
        assert t == d.output.t
        # index annotations may differ in bound-variable names; compare erasures
        got = _erased(store)
        assert got == _erased(run.store.at(d.output.store))
        before = _erased(run.store.at(d.input.store))
        assert {p: got[p] for p in before} == before


def _erased(store):
    return {p: S.erase(e.v) if isinstance(e, Data) else (S.erase(e.e), e.scope)
            for p, e in store.cells.items()}
