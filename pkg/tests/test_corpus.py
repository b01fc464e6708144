import pytest

from fungi import corpus
from fungi import syntax as S
from fungi.dynamics import Data, Susp
from fungi.names import Bin, Sym, unary


def nm(tag, x):
    return Bin(Sym(tag), Sym(x))


@pytest.mark.parametrize("name", sorted(corpus.RUNS))
def test_run_files_match_the_generator(name):
    assert corpus.source(name) == corpus.run_file_source(name)


def _cells(run, kind):
    return {p for p, e in run.store.cells.items() if isinstance(e, kind)}


def test_left_run_store(example_runs):
    _, _, run = example_runs["dedup_3439.fg"]
    outputs = {p for p in _cells(run, Data) if isinstance(p, Bin) and p.left == Sym("r")}
    assert outputs == {nm("r", "n1"), nm("r", "n2"), nm("r", "n4")}
    assert {p for p in run.store.cells if isinstance(p, Bin) and p.left == Sym("dd")} == {
        nm("dd", "n%d" % k) for k in range(1, 5)}
    for k in range(1, 5):
        assert isinstance(run.store[nm("dd", "n%d" % k)], Susp)
    head = run.store[nm("r", "n1")].v
    assert head.c == "Cons" and head.args[1] == S.NatV(3) and head.args[2] == S.RefV(nm("r", "n2"))
    assert run.store[nm("r", "n2")].v.args[2] == S.RefV(nm("r", "n4"))


def test_right_run_store(example_runs):
    _, _, run = example_runs["dedup_1439.fg"]
    outputs = {p for p in _cells(run, Data) if isinstance(p, Bin) and p.left == Sym("r")}
    assert outputs == {nm("r", "n%d" % k) for k in range(1, 5)}
    values = []
    p = nm("r", "n1")
    while p in run.store.cells and run.store[p].v.c == "Cons":
        values.append(run.store[p].v.args[1].k)
        p = run.store[p].v.args[2].n
    assert values == [1, 4, 3, 9]


def test_insert_writes_five_trie_names(example_runs):
    _, _, run = example_runs["dedup_3439.fg"]
    trie = {p for p in run.store.cells if isinstance(p, Bin) and p.left == Sym("t")
            and p.right.left == Sym("n2")}
    assert trie == {Bin(Sym("t"), Bin(Sym("n2"), unary(i))) for i in range(5)}


def test_no_overwrites(example_runs):
    for _, _, run in example_runs.values():
        assert not run.store.overwrites()


def test_the_control_has_no_collision():
    assert corpus.adversarial_search("dedup.fg", limit=60) is None


def test_adversarial_inputs_are_distinct_pairs():
    seen = list(corpus.adversarial_inputs())
    assert len(seen) == len(set(seen))
    assert all(a != b for (a, b), _ in seen)
    from fungi import names as N
    leaves = {N.LEAF} | {Sym(t) for t in corpus.TAGS}
    for (a, b), values in seen:
        used = N.name_atoms(a) | N.name_atoms(b)
        assert used <= leaves and len(used - {N.LEAF}) <= 2
        assert N.name_depth(a) <= 1 and N.name_depth(b) <= 1
        assert set(values) <= {0, 1}
