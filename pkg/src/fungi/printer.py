"""Pretty printer producing text the parser reads back to an equal tree."""
from __future__ import annotations

from . import indices as I
from . import names as N
from . import syntax as S
from . import types as T
from .parser import KEYWORDS


def _paren(s, b):
    return "(" + s + ")" if b else s


def show_lit(n):
    """A literal name in atom position."""
    s = N.show_name(n)
    return "(" + s + ")" if isinstance(n, N.Bin) else s


# ---------------------------------------------------------------- values

def show_value(v, atom=False):
    if isinstance(v, (S.Var,)):
        return v.x
    if isinstance(v, S.DefV):
        return v.f
    if isinstance(v, S.UnitV):
        return "()"
    if isinstance(v, S.PairV):
        return "(" + show_value(v.v1) + ", " + show_value(v.v2) + ")"
    if isinstance(v, S.Inj):
        if isinstance(v.v, S.UnitV):
            return "true" if v.i == 1 else "false"
        return _paren("inj%d %s" % (v.i, show_value(v.v, True)), atom)
    if isinstance(v, S.NameV):
        return "@" + show_lit(v.n)
    if isinstance(v, S.NameFnV):
        return "nmfn(" + N.show_term(v.m) + ")"
    if isinstance(v, S.RefV):
        return "ptr(" + N.show_name(v.n) + ")"
    if isinstance(v, S.ThunkV):
        return "susp(" + N.show_name(v.n) + ")"
    if isinstance(v, S.Pack):
        idx = "" if v.i is None else "[" + I.show(v.i) + "]"
        return "pack" + idx + "(" + show_value(v.v) + ")"
    if isinstance(v, S.NatV):
        return str(v.k)
    if isinstance(v, S.Con):
        s = v.c
        if v.idx:
            s += "[" + ", ".join(I.show(i) for i in v.idx) + "]"
        if v.args:
            s += "(" + ", ".join(show_value(a) for a in v.args) + ")"
        return s
    if isinstance(v, S.Anno):
        return "(" + show_value(v.v) + " : " + T.show_type(v.t) + ")"
    if isinstance(v, S.VInst):
        inner = show_value(v.v, True)
        if isinstance(v.v, S.Con):
            inner = "(" + inner + ")"
        return inner + "[" + I.show(v.i) + "]"
    raise TypeError("not a value: %r" % (v,))


# ---------------------------------------------------------------- expressions

_OPEN = (S.Lam, S.Let, S.If, S.Split, S.Case, S.Match, S.Unpack, S.Thunk, S.Scope)


def show_expr(e, head=False, indent=0):
    """head: the expression is the function part of an application."""
    pad = "\n" + "  " * (indent + 1)
    if isinstance(e, _OPEN):
        return _paren(_show_open(e, indent), head)
    if isinstance(e, S.Ret):
        return "ret " + show_value(e.v, True)
    if isinstance(e, S.Force):
        if isinstance(e.v, S.Var) and e.v.x not in KEYWORDS:
            return e.v.x
        return "force " + show_value(e.v, True)
    if isinstance(e, S.Get):
        return "get " + show_value(e.v, True)
    if isinstance(e, S.Ref):
        return "ref[" + show_value(e.v1) + "] " + show_value(e.v2, True)
    if isinstance(e, S.NameApp):
        return "nmapp " + show_value(e.vm, True) + " " + show_value(e.v, True)
    if isinstance(e, S.NmBin):
        return "nmbin " + show_value(e.v1, True) + " " + show_value(e.v2, True)
    if isinstance(e, S.Prim):
        return " ".join([e.op] + [show_value(a, True) for a in e.args])
    if isinstance(e, S.App):
        return show_expr(e.e, True, indent) + " " + show_value(e.v, True)
    if isinstance(e, S.EInstIdx):
        return show_expr(e.e, True, indent) + "[" + I.show(e.i) + "]"
    if isinstance(e, S.EInstTy):
        return show_expr(e.e, True, indent) + "[type " + T.show_type(e.t) + "]"
    if isinstance(e, S.EAnno):
        return "(" + show_expr(e.e, False, indent) + pad + ": " + T.show_eff_type(e.t) + ")"
    raise TypeError("not an expression: %r" % (e,))


def _show_open(e, indent):
    nl = "\n" + "  " * indent
    sub = lambda x: show_expr(x, False, indent)
    deeper = lambda x: show_expr(x, False, indent + 1)
    if isinstance(e, S.Lam):
        return "fun " + e.x + ". " + sub(e.e)
    if isinstance(e, S.Let):
        return "let " + e.x + " = " + deeper(e.e1) + " in" + nl + sub(e.e2)
    if isinstance(e, S.If):
        return ("if " + show_value(e.v) + nl + "then " + deeper(e.e1) + nl + "else " + deeper(e.e2))
    if isinstance(e, S.Split):
        return "split " + show_value(e.v) + " as (" + e.x1 + ", " + e.x2 + ") in" + nl + sub(e.e)
    if isinstance(e, S.Case):
        return ("case " + show_value(e.v) + " of" + nl + "  inj1 " + e.x1 + " => " + deeper(e.e1)
                + nl + "| inj2 " + e.x2 + " => " + deeper(e.e2) + nl + "end")
    if isinstance(e, S.Match):
        arms = "".join(nl + "| " + _show_arm(a, indent + 1) for a in e.arms)
        return "match " + show_value(e.v) + " with" + arms + nl + "end"
    if isinstance(e, S.Unpack):
        return "unpack " + show_value(e.v) + " as (" + e.a + ", " + e.x + ") in" + nl + sub(e.e)
    if isinstance(e, S.Thunk):
        return "thunk[" + show_value(e.v) + "] " + sub(e.e)
    if isinstance(e, S.Scope):
        return "scope[" + show_value(e.v) + "] " + sub(e.e)
    raise TypeError(e)


def _show_arm(a, indent):
    s = a.c
    if a.idx:
        s += "[" + ", ".join(a.idx) + "]"
    for x in a.xs:
        s += " " + x
    return s + " => " + show_expr(a.e, False, indent)


def show_term_any(x):
    if S.is_value(x):
        return show_value(x)
    if isinstance(x, S.EXPRS):
        return show_expr(x)
    if isinstance(x, S.Arm):
        return _show_arm(x, 0)
    return str(x)


# ---------------------------------------------------------------- declarations

def show_decl(d):
    if isinstance(d, S.NmtmDecl):
        return "nmtm %s : %s = %s;" % (d.name, I.show_sort_syntax(d.sort), N.show_term(d.m))
    if isinstance(d, S.IdxtmDecl):
        return "idxtm %s : %s = %s;" % (d.name, I.show_sort_syntax(d.sort), I.show(d.i))
    if isinstance(d, S.TypeAlias):
        params = "".join(" " + p for p in d.params)
        return "type %s%s = %s;" % (d.name, params, T.show_type(d.t))
    if isinstance(d, S.DataDecl):
        ctors = "".join("\n  | %s : %s" % (c.c, T.show_ctor_sig(c.t)) for c in d.ctors)
        return "data %s : %s =%s;" % (d.name, d.kind, ctors)
    if isinstance(d, S.DefDecl):
        return "def %s : %s =\n  %s;" % (d.name, T.show_eff_type(d.t), show_expr(d.e, False, 1))
    if isinstance(d, S.CellDecl):
        return "cell %s : %s = %s;" % (show_lit(d.loc), T.show_any_type(d.t), show_value(d.v))
    if isinstance(d, S.MainDecl):
        return "main : %s =\n  %s;" % (T.show_eff_type(d.t), show_expr(d.e, False, 1))
    raise TypeError(d)


def show_program(p):
    parts = [show_decl(d) for d in p.decls]
    if p.main is not None:
        parts.append(show_decl(p.main))
    return "\n\n".join(parts) + "\n"
