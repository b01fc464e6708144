"""Values, expressions and programs.

The core grammar is the call-by-push-value language of values and
expressions; annotation forms (v : A), (e : E) and explicit instantiations
e[i], e[A] support bidirectional checking.  Corpus extensions: numerals,
datatype constructors and match, if-sugar over case, primitive operations,
name-value composition, and top-level recursive definitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from . import names as N


def _span():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- values

@dataclass(frozen=True)
class Var:
    x: str
    span: object = _span()


@dataclass(frozen=True)
class UnitV:
    span: object = _span()


@dataclass(frozen=True)
class PairV:
    v1: object
    v2: object
    span: object = _span()


@dataclass(frozen=True)
class Inj:
    i: int
    v: object
    span: object = _span()


@dataclass(frozen=True)
class NameV:
    n: object
    span: object = _span()


@dataclass(frozen=True)
class NameFnV:
    m: object
    span: object = _span()


@dataclass(frozen=True)
class RefV:
    n: object
    span: object = _span()


@dataclass(frozen=True)
class ThunkV:
    n: object
    span: object = _span()


@dataclass(frozen=True)
class Pack:
    i: object
    v: object
    span: object = _span()


@dataclass(frozen=True)
class NatV:
    k: int
    span: object = _span()


@dataclass(frozen=True)
class Con:
    c: str
    idx: tuple
    args: tuple
    span: object = _span()


@dataclass(frozen=True)
class DefV:
    """A reference to a top-level recursive definition (a fix-thunk)."""
    f: str
    span: object = _span()


@dataclass(frozen=True)
class Anno:
    v: object
    t: object
    span: object = _span()


@dataclass(frozen=True)
class VInst:
    v: object
    i: object
    span: object = _span()


VALUES = (Var, UnitV, PairV, Inj, NameV, NameFnV, RefV, ThunkV, Pack, NatV, Con, DefV, Anno, VInst)

TRUE = Inj(1, UnitV())
FALSE = Inj(2, UnitV())


def bool_v(b):
    return TRUE if b else FALSE


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Ret:
    v: object
    span: object = _span()


@dataclass(frozen=True)
class Lam:
    x: str
    e: object
    span: object = _span()


@dataclass(frozen=True)
class Split:
    v: object
    x1: str
    x2: str
    e: object
    span: object = _span()


@dataclass(frozen=True)
class Case:
    v: object
    x1: str
    e1: object
    x2: str
    e2: object
    span: object = _span()


@dataclass(frozen=True)
class If:
    v: object
    e1: object
    e2: object
    span: object = _span()


@dataclass(frozen=True)
class App:
    e: object
    v: object
    span: object = _span()


@dataclass(frozen=True)
class Let:
    e1: object
    x: str
    e2: object
    span: object = _span()


@dataclass(frozen=True)
class Thunk:
    v: object
    e: object
    span: object = _span()


@dataclass(frozen=True)
class Force:
    v: object
    span: object = _span()


@dataclass(frozen=True)
class Ref:
    v1: object
    v2: object
    span: object = _span()


@dataclass(frozen=True)
class Get:
    v: object
    span: object = _span()


@dataclass(frozen=True)
class Scope:
    v: object
    e: object
    span: object = _span()


@dataclass(frozen=True)
class NameApp:
    vm: object
    v: object
    span: object = _span()


@dataclass(frozen=True)
class Unpack:
    v: object
    a: str
    x: str
    e: object
    span: object = _span()


@dataclass(frozen=True)
class Arm:
    c: str
    idx: tuple
    xs: tuple
    e: object
    span: object = _span()


@dataclass(frozen=True)
class Match:
    v: object
    arms: tuple
    span: object = _span()


@dataclass(frozen=True)
class Prim:
    op: str
    args: tuple
    span: object = _span()


@dataclass(frozen=True)
class NmBin:
    v1: object
    v2: object
    span: object = _span()


@dataclass(frozen=True)
class EAnno:
    e: object
    t: object
    span: object = _span()


@dataclass(frozen=True)
class EInstIdx:
    e: object
    i: object
    span: object = _span()


@dataclass(frozen=True)
class EInstTy:
    e: object
    t: object
    span: object = _span()


EXPRS = (Ret, Lam, Split, Case, If, App, Let, Thunk, Force, Ref, Get, Scope, NameApp, Unpack,
         Match, Prim, NmBin, EAnno, EInstIdx, EInstTy)
TERMINALS = (Ret, Lam)
PRIMS = {"add": 2, "sub": 2, "eq": 2, "lt": 2, "hash_bit": 2}


def is_value(x):
    return isinstance(x, VALUES)


def is_terminal(e):
    return isinstance(e, TERMINALS)


# ---------------------------------------------------------------- programs

@dataclass(frozen=True)
class NmtmDecl:
    name: str
    sort: object
    m: object
    span: object = _span()


@dataclass(frozen=True)
class IdxtmDecl:
    name: str
    sort: object
    i: object
    span: object = _span()


@dataclass(frozen=True)
class TypeAlias:
    name: str
    params: tuple
    t: object
    span: object = _span()


@dataclass(frozen=True)
class CtorDecl:
    c: str
    t: object
    span: object = _span()


@dataclass(frozen=True)
class DataDecl:
    name: str
    kind: object
    ctors: tuple
    span: object = _span()


@dataclass(frozen=True)
class DefDecl:
    name: str
    t: object
    e: object
    span: object = _span()


@dataclass(frozen=True)
class CellDecl:
    loc: object
    t: object
    v: object
    span: object = _span()


@dataclass(frozen=True)
class MainDecl:
    t: object
    e: object
    span: object = _span()


@dataclass(frozen=True)
class Program:
    decls: tuple
    main: object

    def of(self, cls):
        return [d for d in self.decls if isinstance(d, cls)]

    def defs(self):
        return {d.name: d for d in self.decls if isinstance(d, DefDecl)}

    def cells(self):
        return [d for d in self.decls if isinstance(d, CellDecl)]


# ---------------------------------------------------------------- traversal

def children(node):
    """Immediate sub-values/expressions (not binder names)."""
    out = []
    for f in fields(node):
        if f.name == "span":
            continue
        c = getattr(node, f.name)
        if isinstance(c, VALUES + EXPRS + (Arm,)):
            out.append(c)
        elif isinstance(c, tuple):
            out.extend(x for x in c if isinstance(x, VALUES + EXPRS + (Arm,)))
    return out


def free_vars(node):
    """Free value variables, cached on the (immutable) node."""
    d = getattr(node, "__dict__", None)
    if d is not None and "_fv" in d:
        return d["_fv"]
    out = frozenset(_free_vars(node))
    if d is not None:
        d["_fv"] = out
    return out


def _free_vars(node):
    if isinstance(node, Var):
        return {node.x}
    if isinstance(node, Lam):
        return free_vars(node.e) - {node.x}
    if isinstance(node, Split):
        return free_vars(node.v) | (free_vars(node.e) - {node.x1, node.x2})
    if isinstance(node, Case):
        return free_vars(node.v) | (free_vars(node.e1) - {node.x1}) | (free_vars(node.e2) - {node.x2})
    if isinstance(node, Let):
        return free_vars(node.e1) | (free_vars(node.e2) - {node.x})
    if isinstance(node, Unpack):
        return free_vars(node.v) | (free_vars(node.e) - {node.x})
    if isinstance(node, Arm):
        return free_vars(node.e) - set(node.xs)
    out = set()
    for c in children(node):
        out |= free_vars(c)
    return out


_LEAVES = (UnitV, NatV, NameV, RefV, ThunkV, NameFnV, DefV)


def subst(node, x, v):
    """Substitute closed value v for variable x (runtime values are closed)."""
    if isinstance(node, _LEAVES) or x not in free_vars(node):
        return node
    if isinstance(node, Var):
        return v if node.x == x else node
    if isinstance(node, Lam):
        return node if node.x == x else _with(node, e=subst(node.e, x, v))
    if isinstance(node, Split):
        e = node.e if x in (node.x1, node.x2) else subst(node.e, x, v)
        return _with(node, v=subst(node.v, x, v), e=e)
    if isinstance(node, Case):
        e1 = node.e1 if node.x1 == x else subst(node.e1, x, v)
        e2 = node.e2 if node.x2 == x else subst(node.e2, x, v)
        return _with(node, v=subst(node.v, x, v), e1=e1, e2=e2)
    if isinstance(node, Let):
        e2 = node.e2 if node.x == x else subst(node.e2, x, v)
        return _with(node, e1=subst(node.e1, x, v), e2=e2)
    if isinstance(node, Unpack):
        e = node.e if node.x == x else subst(node.e, x, v)
        return _with(node, v=subst(node.v, x, v), e=e)
    if isinstance(node, Arm):
        return node if x in node.xs else _with(node, e=subst(node.e, x, v))
    return _map_children(node, lambda c: subst(c, x, v))


_FIELDS = {}
_NODES = None


def _field_names(cls):
    names = _FIELDS.get(cls)
    if names is None:
        names = _FIELDS[cls] = tuple(f.name for f in fields(cls) if f.name != "span")
    return names


def _with(node, **changes):
    """replace() that keeps the original node when nothing changed."""
    for k, val in changes.items():
        if getattr(node, k) is not val:
            return replace(node, **changes)
    return node


def _map_children(node, f):
    global _NODES
    if _NODES is None:
        _NODES = VALUES + EXPRS + (Arm,)
    changes = {}
    for name in _field_names(type(node)):
        c = getattr(node, name)
        if isinstance(c, _NODES):
            new = f(c)
            if new is not c:
                changes[name] = new
        elif isinstance(c, tuple) and c and any(isinstance(y, _NODES) for y in c):
            new = tuple(f(y) if isinstance(y, _NODES) else y for y in c)
            if any(a is not b for a, b in zip(new, c)):
                changes[name] = new
    return replace(node, **changes) if changes else node


def erase(node):
    """Strip annotations and explicit instantiations."""
    if isinstance(node, (Anno, VInst, EAnno, EInstIdx, EInstTy)):
        inner = node.v if isinstance(node, (Anno, VInst)) else node.e
        return erase(inner)
    if isinstance(node, Pack):
        return Pack(None, erase(node.v), span=node.span)
    if isinstance(node, Con):
        return Con(node.c, (), tuple(erase(a) for a in node.args), span=node.span)
    if isinstance(node, Arm):
        return Arm(node.c, (), node.xs, erase(node.e), span=node.span)
    return _map_children(node, erase)


def walk(node):
    yield node
    for c in children(node):
        yield from walk(c)
