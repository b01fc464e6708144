from hypothesis import given, settings
from hypothesis import strategies as st

from fungi import indices as I
from fungi import names as N
from fungi import relations as R
from fungi.context import Apart, IdxVar, PropEntry, TypingCtx
from fungi.names import Leaf, NBin, NLit, NVar

import ground
import strategies as gen
from util import decide, obligation


def test_extract_index_binding():
    props, rel = R.extract(TypingCtx((IdxVar("a", I.NMSET),)))
    assert props == () and rel == R.RelCtx((R.EquivVars("a", "a", I.NMSET),))


def test_extract_empty():
    assert R.extract(TypingCtx()) == ((), R.RelCtx())


def test_extract_keeps_propositions():
    X, Y = I.IVar("X"), I.IVar("Y")
    p = Apart(X, Y, I.NMSET)
    ctx = TypingCtx((IdxVar("X", I.NMSET), IdxVar("Y", I.NMSET), PropEntry(p)))
    props, rel = R.extract(ctx)
    assert props == (p,)
    assert [e.a for e in rel.entries] == ["X", "Y"]


def test_eq_beta():
    r = decide("|- (#a. () * a) () == () * () : Nm")
    assert r.status == "proven" and "Eq-β" in r.trace


def test_eq_var_bin_across_related_variables():
    ctx = R.RelCtx((R.EquivVars("a", "b", N.NM),))
    L = NLit(Leaf())
    ob = R.Obligation(ctx, R.EQUIV, NBin(NVar("a"), L), NBin(NVar("b"), L), N.NM)
    assert R.decide(ob).status == "proven"


def test_swapped_pairs_refuted_with_witness():
    r = decide("|- (#x. x * ()) == (#x. () * x) : Nm -> Nm")
    assert r.status == "refuted"
    assert "'a * () vs () * 'a" in dict(r.witness)["because"]


def test_distinct_prefixes_apart():
    r = decide("|- (#x. 't * x) ## (#x. 'dd * x) : Nm -> Nm")
    assert r.status == "proven" and r.trace[:2] == ("D-Lam", "D-Bin1")


def test_missing_tag_refuted():
    r = decide("|- (#x. 'dd * x) ## (#x. x) : Nm -> Nm")
    assert r.status == "refuted"
    assert dict(r.witness)["because"].startswith("at ((), 'dd * ())")


def test_leaf_apart_from_pair():
    assert decide("|- () ## () * () : Nm").status == "proven"


def test_perm():
    r = decide("X : NmSet, Y : NmSet, X ## Y : NmSet |- X % Y == Y % X : NmSet")
    assert r.status == "proven" and "Eq-Perm" in r.trace


def test_seed_is_an_unknown_name():
    assert decide("x : Nm |- <#x. () * x>*[[{() * x}]] ## {x} : NmSet").status == "proven"


def test_overlapping_primes_refuted():
    r = decide("X : NmSet |- <#x. () * x>*[[(#x. () * x)[[X]]]] ## X : NmSet")
    assert r.status == "refuted"
    w = dict(r.witness)
    assert "() * ()" in w["because"]


def test_no_refutation_without_the_oracle():
    r = decide("X : NmSet |- <#x. () * x>*[[(#x. () * x)[[X]]]] ## X : NmSet", use_oracle=False)
    assert r.status == "unknown"


def test_printed_star_rule_misses_seed_overlap():
    ob, _ = obligation("|- <#x. 't * x>*[[{'a}]] ## <#x. 'r * x>*[[{'t * 'a}]] : NmSet")
    assert R.decide(ob, printed_dstar=True, use_oracle=False).status == "proven"
    assert R.decide(ob, use_oracle=False).status == "unknown"
    assert R.decide(ob).status == "refuted"
    left = ground.eval_index(ob.lhs, star_depth=2)
    assert left & ground.eval_index(ob.rhs)


@given(gen.names_st(), gen.names_st())
def test_ground_names_exactly_one_relation(a, b):
    la, lb = NLit(a), NLit(b)
    eq = R.decide(R.Obligation(R.RelCtx(), R.EQUIV, la, lb, N.NM)).status == "proven"
    ap = R.decide(R.Obligation(R.RelCtx(), R.APART, la, lb, N.NM)).status == "proven"
    assert eq != ap
    assert eq == (a == b)


@settings(max_examples=60)
@given(st.data(), st.sampled_from(gen.FORMS))
def test_symmetry(data, form):
    ob, sorts = gen.obligation(gen.hyp_pick(data.draw), form)
    a = R.decide(ob, sorts=sorts, use_oracle=False).status
    b = R.decide(ob.flip(), sorts=sorts, use_oracle=False).status
    assert a == b


@settings(max_examples=80)
@given(st.data(), st.sampled_from(gen.FORMS))
def test_soundness_against_reference(data, form):
    ob, sorts = gen.obligation(gen.hyp_pick(data.draw), form)
    res = R.decide(ob, sorts=sorts)
    assert ground.judge(form, ob, sorts, res) is None, (str(ob), str(res))


def test_judge_catches_wrong_verdicts():
    ob, sorts = obligation("|- (#x. 'dd * x) ## (#x. x) : Nm -> Nm")
    assert ground.judge("fn", ob, sorts, R.Proven(("fake",))) is not None
    ob, sorts = obligation("x : Nm |- 't * x == 't * x : Nm")
    assert ground.judge("var", ob, sorts, R.Refuted((("x", "()"),))) is not None


def test_member_entry_point():
    star = I.IStar(I.IName(N.NLam("x", NBin(NLit(Leaf()), NVar("x")))), I.ISingle(NLit(Leaf())))
    assert R.member({}, NLit(Leaf()), star).status == "proven"
