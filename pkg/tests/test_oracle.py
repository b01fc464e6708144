from fungi import indices as I
from fungi import names as N
from fungi import oracle as O
from fungi.names import Bin, Leaf, NLit, Num, Sym

import ground
from util import obligation


def check(line, depth=3):
    ob, sorts = obligation(line)
    return O.oracle_check(ob, depth, sorts=sorts)


def test_leaf_equals_leaf():
    assert check("|- () == () : Nm", 1).status == O.HOLDS


def test_identity_overlaps_suffix():
    r = check("|- (#x. x) ## (#x. x * 1) : Nm -> Nm", 2)
    assert r.fails
    a, b = ground._split_pair(dict(r.witness)["because"])
    assert (a, b) == ("() * 1", "()")


def test_distinct_suffixes_hold():
    assert check("|- {() * 0} ## {() * 1} : NmSet", 2).status == O.HOLDS


def test_witness_assigns_the_free_variables():
    ob, sorts = obligation("x : Nm, y : Nm |- 'dd * x ## y : Nm")
    r = O.oracle_check(ob, 3, sorts=sorts)
    assert r.fails and {"x", "y", "because"} <= set(dict(r.witness))
    assert ground.witness_violates("var", ob, sorts, r.witness)


def test_star_self_equality_is_not_refuted():
    r = check("X : NmSet |- <#x. () * x>*[[X]] == <#x. () * x>*[[X]] : NmSet")
    assert r.status in (O.HOLDS, O.INCONCLUSIVE)
    assert not r.fails


def test_ground_set_unfolds_star():
    star = I.IStar(I.IName(N.NLam("x", N.NBin(NLit(Leaf()), N.NVar("x")))), I.ISingle(NLit(Num(0))))
    got = O.ground_set(star, star_depth=2)
    assert got == {Num(0), Bin(Leaf(), Num(0)), Bin(Leaf(), Bin(Leaf(), Num(0)))}
    assert got == ground.eval_index(star, star_depth=2)


def test_universe_atoms():
    ob, _ = obligation("|- 'dd == 't : Nm")
    atoms = O.obligation_atoms(ob)
    assert {Sym("dd"), Sym("t")} <= atoms
