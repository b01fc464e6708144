import pytest

from fungi import indices as I
from fungi import types as T
from fungi.context import Apart, IdxVar, PropEntry, Tt, TypingCtx
from fungi.names import NLit, Sym
from fungi.parser import parse_eff_type, parse_type


def ctx_xy(apart=True):
    X, Y = I.IVar("X"), I.IVar("Y")
    es = [IdxVar("X", I.NMSET), IdxVar("Y", I.NMSET)]
    if apart:
        es.append(PropEntry(Apart(X, Y, I.NMSET)))
    return TypingCtx(tuple(es))


def single(s):
    return I.ISingle(NLit(Sym(s)))


def test_kind_unit():
    assert T.kind_check(TypingCtx(), T.UNIT) == T.TYPE


def test_kind_ref():
    ctx = TypingCtx((IdxVar("X", I.NMSET),))
    assert T.kind_check(ctx, parse_type("Ref[X] Unit")) == T.TYPE


def test_kind_thunk():
    assert T.kind_check(TypingCtx(), parse_type("Thk[0] ((F Unit) |> <0; 0>)")) == T.TYPE


def test_kind_unbound_index_variable():
    with pytest.raises(T.KindError):
        T.kind_check(TypingCtx(), parse_type("Ref[X] Unit"))


def test_kind_needs_separation():
    with pytest.raises(T.KindError):
        T.kind_check(ctx_xy(apart=False), parse_type("Nm[X % Y]"))
    assert T.kind_check(ctx_xy(), parse_type("Nm[X % Y]")) == T.TYPE


def test_effect_sequencing_coalesces():
    n1, n2 = single("n1"), single("n2")
    out = T.effect_seq(TypingCtx(), T.Effect(n1, I.EMPTY), T.Effect(n2, I.EMPTY))
    assert out == T.Effect(I.IUnion(n1, n2), I.EMPTY)


def test_effect_sequencing_with_pure_is_identity():
    e = T.Effect(single("n"), single("m"))
    assert T.effect_seq(TypingCtx(), T.PURE, e) == e
    assert T.effect_seq(TypingCtx(), e, T.PURE) == e


def test_effect_sequencing_rejects_overlap():
    n = single("n")
    with pytest.raises(T.EffectSeqError) as exc:
        T.effect_seq(TypingCtx(), T.Effect(n, I.EMPTY), T.Effect(n, I.EMPTY))
    assert "write/write overlap" in str(exc.value)


def test_effect_sequencing_rejects_read_then_write():
    n = single("n")
    with pytest.raises(T.EffectSeqError):
        T.effect_seq(TypingCtx(), T.Effect(I.EMPTY, n), T.Effect(n, I.EMPTY))


def test_coalesce_under_index_binder():
    e = T.AllIdxE("Z", I.NMSET, Tt(), parse_eff_type("(F Unit) |> <0; 0>"))
    out = T.effect_coalesce(TypingCtx(), e, T.Effect(single("n"), I.EMPTY))
    assert isinstance(out, T.AllIdxE) and out.a == "Z"
    assert out.e.eff.w == single("n")


def test_name_subsumption():
    ctx = ctx_xy()
    assert T.is_subtype(ctx, parse_type("Nm[X]"), parse_type("Nm[X % Y]"))
    assert not T.is_subtype(ctx, parse_type("Nm[X % Y]"), parse_type("Nm[X]"))


def test_subtype_reflexive():
    t = parse_type("Ref[X] Unit")
    assert T.is_subtype(TypingCtx((IdxVar("X", I.NMSET),)), t, t)


def test_arrow_is_contravariant():
    ctx = ctx_xy()
    wide = parse_eff_type("Nm[X % Y] -> (F Unit) |> <0; 0>")
    narrow = parse_eff_type("Nm[X] -> (F Unit) |> <0; 0>")
    assert T.subtype_eff(ctx, wide, narrow)
    with pytest.raises(T.SubtypeError):
        T.subtype_eff(ctx, narrow, wide)
