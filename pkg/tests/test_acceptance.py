"""One test per acceptance criterion, each with its time limit."""
import random
import time

import pytest

from fungi import annotate as A
from fungi import corpus
from fungi import indices as I
from fungi import names as N
from fungi import oracle
from fungi import relations as R
from fungi.audit import precise_effects, store_diff, subject_reduction_check
from fungi.dynamics import hash_example, run_program
from fungi.names import Bin, Sym, unary
from fungi.parser import parse_program
from fungi.typecheck import check_program

import ground
import strategies as gen
from util import lines, obligation


def nm(*parts):
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Bin(p, out)
    return out


T, DD, RR = Sym("t"), Sym("dd"), Sym("r")


def test_ac1_dedup_write_set_expansion(dedup_env):
    start = time.perf_counter()
    n2 = Sym("n2")
    i = dedup_env.expand_index(I.IApp(I.IVar("Dedup"), I.ISingle(N.NLit(n2))))
    nf = I.normalize_index(i)
    parts = []

    def flatten(x):
        if isinstance(x, I.ISep):
            flatten(x.x)
            flatten(x.y)
        else:
            parts.append(x)

    flatten(nf)
    assert len(parts) == 3
    for a in range(3):
        for b in range(a + 1, 3):
            ob = R.Obligation(R.RelCtx(()), R.APART, parts[a], parts[b], I.NMSET)
            assert R.decide(ob).status == "proven", (I.show(parts[a]), I.show(parts[b]))
    # the trie path has height 4, so the star is unfolded four times
    want = {nm(T, n2, unary(k)) for k in range(5)} | {nm(DD, n2), nm(RR, n2)}
    assert oracle.ground_set(nf, star_depth=4) == want
    for x in want:
        assert R.member({}, N.NLit(x), nf).status == "proven"
    for x in (nm(DD, Sym("n1")), nm(RR, unary(0)), nm(T, Sym("n1"), unary(0))):
        assert R.member({}, N.NLit(x), nf).status == "refuted"
    assert time.perf_counter() - start < 1.0


def test_ac2_table_of_mistakes():
    start = time.perf_counter()
    for line in lines(corpus.source("obligations/mistakes.txt")):
        ob, sorts = obligation(line)
        res = R.decide(ob, oracle_depth=3, sorts=sorts)
        assert res.status == "refuted", line
        form = "set" if ob.sort == I.NMSET else "fn"
        assert ground.witness_violates(form, ob, sorts, res.witness), line
    for line in lines(corpus.source("obligations/contrasts.txt")):
        ob, sorts = obligation(line)
        assert R.decide(ob, sorts=sorts).status == "proven", line
    assert time.perf_counter() - start < 5.0


def test_ac3_two_runs():
    start = time.perf_counter()
    runs = {}
    for f in corpus.RUNS:
        p = parse_program(corpus.source(f), f)
        _, env = check_program(p)
        run = run_program(p, env, hash_bit=hash_example)
        res = subject_reduction_check(run, env.expand_type(p.main.t))
        assert res.ok and res.report.precise and not run.store.overwrites(), f
        runs[f] = run
    left, right = runs["dedup_3439.fg"], runs["dedup_1439.fg"]
    n = [Sym("n%d" % k) for k in range(5)]

    def outputs(run):
        return {p for p in run.store.cells if isinstance(p, Bin) and p.left == RR}

    assert outputs(left) == {nm(RR, n[1]), nm(RR, n[2]), nm(RR, n[4])}
    assert outputs(right) == {nm(RR, n[k]) for k in range(1, 5)}
    for run in (left, right):
        assert {p for p in run.store.cells if isinstance(p, Bin) and p.left == DD} == {
            nm(DD, n[k]) for k in range(1, 5)}
    diff = set(store_diff(left, right))
    trie = {nm(T, n[1], unary(k)) for k in range(5)} | {nm(T, n[2], unary(k)) for k in range(2)}
    assert diff == trie | {nm(RR, n[1]), nm(RR, n[3]), nm(RR, n[2])}
    assert nm(RR, n[3]) not in left.store.cells and nm(RR, n[3]) in right.store.cells
    tail = lambda run: run.store[nm(RR, n[2])].v.args[2]
    assert tail(left).n == nm(RR, n[4]) and tail(right).n == nm(RR, n[3])
    assert time.perf_counter() - start < 2.0


@pytest.mark.parametrize("variant", sorted(corpus.VARIANTS))
def test_ac4_mistake_variants(variant):
    path = "mistakes/%s.fg" % variant
    program = parse_program(corpus.source(path), path)
    static_ok = True
    try:
        check_program(program)
    except Exception as exc:
        static_ok = False
        assert getattr(exc, "obligation", None), exc
    found = corpus.adversarial_search(path)
    if found is not None:
        assert found.colliding is not None and found.paths[0] != found.paths[1]
    assert not static_ok or found is not None


def test_ac5a_name_terms():
    start = time.perf_counter()
    rng = random.Random(2024)
    pick = gen.rng_pick(rng)
    count = 0
    for k in range(1200):
        g = gen.TermGen(pick)
        if k % 3 == 2:
            env = {"x": N.NM, "f": gen.FN}
            m = g.term(N.NM, env, 4)
        else:
            env = {}
            m = g.term(N.NM if k % 3 == 0 else gen.FN, env, 4)
        s = N.sort_name_term(env, m)
        nf = N.normalize(m)
        assert N.sort_name_term(env, nf) == s
        assert N.normalize(nf) == nf
        if not env and s == N.NM:
            assert nf == N.NLit(ground.eval_term(m)) == N.eval_name_term(m)
        elif not env:
            a = ground.eval_term(m)
            b = ground.eval_term(nf)
            for x in ground.names_upto(gen.ATOMS, 1):
                assert a(x) == b(x)
        count += 1
    assert count >= 1000
    assert time.perf_counter() - start < 60


def test_ac5b_soundness_fuzz():
    start = time.perf_counter()
    bad, seen = [], 0
    for form, ob, sorts in gen.obligations(11, 520):
        res = R.decide(ob, sorts=sorts)
        err = ground.judge(form, ob, sorts, res)
        if err:
            bad.append((str(ob), str(res), err))
        seen += 1
    assert seen >= 500
    assert bad == []
    assert time.perf_counter() - start < 60


def test_ac5c_subject_reduction(harness):
    start = time.perf_counter()
    rng = random.Random(7)
    pool = corpus.name_universe(("n", "m"), 1)
    for _ in range(200):
        k = rng.randint(1, 4)
        names = rng.sample(pool, k)
        values = [rng.randrange(16) for _ in range(k)]
        run = harness.run(names, values)
        res = harness.audit(run, names)
        assert res.ok, [str(c) for c in res.counterexamples]
        assert not run.store.overwrites()
    assert time.perf_counter() - start < 60


@pytest.mark.parametrize("name", ["dedup.fg"] + sorted(corpus.RUNS))
def test_ac6_bidirectional_round_trip(name):
    program = parse_program(corpus.source(name), name)
    assert A.program_violations(program) == []
    A.synthesize_program(program)
    ann = A.program_annotations(program)
    erased = A.erase_program(program)
    back = A.annotate_program(erased, ann)
    check_program(back)
    assert back == program
    assert A.erase_program(back) == erased
