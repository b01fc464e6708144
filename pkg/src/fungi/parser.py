"""Concrete syntax: a tokenizer and recursive-descent parser with source spans.

Programs are sequences of declarations terminated by ';'.  Comments run from
'--' to the end of the line.  The printer module renders every tree this
parser produces back into text that parses to an equal tree.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import indices as I
from . import names as N
from . import syntax as S
from . import types as T
from .context import TT, Apart, Equiv, conj
from .indices import EMPTY, NMSET, UNIT_SORT, Product
from .names import NM, NM_FN


class ParseError(Exception):
    def __init__(self, msg, span=None):
        super().__init__(msg)
        self.span = span


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int

    def __str__(self):
        return "%s:%d:%d" % (self.file, self.line, self.col)


@dataclass(frozen=True)
class Tok:
    kind: str  # ident, sym, num, punct, eof
    text: str
    span: Span


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|--[^\n]*)
  | (?P<nl>\n)
  | (?P<sym>'[A-Za-z0-9_]+)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'~]*)
  | (?P<punct>\|-|\|>|\[\[|\]\]|\#\#|==|=>|->|@@|&&|[()\[\]{}<>,.:;|*%+=@\#&!])
""", re.VERBOSE)

KEYWORDS = {
    "fun", "let", "in", "if", "then", "else", "case", "of", "match", "with", "end", "split", "as",
    "unpack", "thunk", "ref", "scope", "force", "get", "ret", "nmapp", "nmbin", "inj1", "inj2",
    "true", "false", "pack", "nmfn", "ptr", "susp", "forall", "exists", "tt", "prj1", "prj2",
    "nmtm", "idxtm", "type", "data", "def", "cell", "main", "unit",
}


def tokenize(text, file="<input>"):
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character %r" % text[pos], Span(file, line, col))
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        elif kind != "ws":
            out.append(Tok(kind, s, Span(file, line, col)))
            col += len(s)
        else:
            col += len(s)
        pos = m.end()
    out.append(Tok("eof", "", Span(file, line, col)))
    return out


DEFAULT_SCOPE = {T.NS: NM_FN}


class Parser:
    def __init__(self, text, file="<input>", scope=None, ctors=None):
        self.toks = tokenize(text, file)
        self.i = 0
        self.file = file
        self.scope = [dict(DEFAULT_SCOPE, **(scope or {}))]
        self.tyvars = [set()]
        self.ctors = set(ctors or ())

    # ------------------------------------------------------------ token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts):
        t = self.tok
        return t.kind in ("punct", "ident") and t.text in texts

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError("%s (found %r)" % (msg, found), tok.span)

    def advance(self):
        t = self.tok
        self.i += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.kind in ("punct", "ident") and t.text == text:
            return self.advance()
        if text == "]" and t.text == "]]":
            # split a closing ']]' when only one bracket is wanted
            self.toks[self.i] = Tok("punct", "]", Span(t.span.file, t.span.line, t.span.col + 1))
            return Tok("punct", "]", t.span)
        self.error("expected %r" % text)

    def accept(self, text):
        if self.at(text):
            return self.advance()
        if text == "]" and self.tok.text == "]]":
            return self.expect("]")
        return None

    def ident(self, what="identifier"):
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error("expected %s" % what)
        return self.advance().text

    def push(self, binds=None, tyvars=None):
        self.scope.append(dict(self.scope[-1], **(binds or {})))
        self.tyvars.append(self.tyvars[-1] | set(tyvars or ()))

    def pop(self):
        self.scope.pop()
        self.tyvars.pop()

    def sort_of_var(self, a):
        return self.scope[-1].get(a)

    def attempt(self, fn):
        """Run fn; on ParseError rewind and return None."""
        save = self.i
        saved_toks = list(self.toks)
        try:
            return fn()
        except ParseError:
            self.i = save
            self.toks = saved_toks
            return None

    # ------------------------------------------------------------ sorts and kinds
    def sort(self):
        s = self.sort_atom()
        if self.accept("->"):
            return I.arrow_sort(s, self.sort())
        return s

    def sort_atom(self):
        if self.accept("("):
            s = self.sort()
            if self.accept("x"):
                s = Product(s, self.sort())
            self.expect(")")
            return s
        name = self.ident("sort")
        if name == "Nm":
            return NM
        if name == "NmSet":
            return NMSET
        if name == "Unit":
            return UNIT_SORT
        self.error("unknown sort %s" % name, self.toks[self.i - 1])

    def kind(self):
        if self.at("Type"):
            self.advance()
            if self.accept("=>"):
                return T.KTypeArrow(self.kind())
            return T.TYPE
        s = self.sort_atom() if self.at("(") else self.sort_atom()
        self.expect("=>")
        return T.KIndexArrow(s, self.kind())

    # ------------------------------------------------------------ name terms
    def name_term(self):
        if self.accept("#"):
            a = self.ident()
            self.expect(".")
            self.push({a: NM})
            body = self.name_term()
            self.pop()
            return N.NLam(a, body)
        left = self.name_app()
        if self.accept("*"):
            right = self.name_term()
            return _nbin(left, right)
        return left

    def name_app(self):
        m = self.name_atom()
        while self._name_atom_start():
            m = N.NApp(m, self.name_atom())
        return m

    def _name_atom_start(self):
        t = self.tok
        if t.kind in ("sym", "num"):
            return True
        if t.kind == "ident" and t.text not in KEYWORDS:
            return True
        return t.kind == "punct" and t.text == "("

    def name_atom(self):
        t = self.tok
        if t.kind == "sym":
            self.advance()
            return N.NLit(N.Sym(t.text[1:]))
        if t.kind == "num":
            self.advance()
            return N.NLit(N.Num(int(t.text)))
        if self.accept("("):
            if self.accept(")"):
                return N.NLit(N.LEAF)
            m = self.name_term()
            self.expect(")")
            return m
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            return N.NVar(t.text)
        self.error("expected a name term")

    def name_literal(self):
        m = self.name_atom()
        if not isinstance(m, N.NLit):
            self.error("expected a literal name", self.toks[self.i - 1])
        return m.n

    # ------------------------------------------------------------ index terms
    def index(self):
        if self.at("#"):
            return self.index_lam()
        x = self.index_pw()
        while self.at("%", "+"):
            op = self.advance().text
            y = self.index_pw()
            x = I.ISep(x, y) if op == "%" else I.IUnion(x, y)
        return x

    def index_lam(self):
        self.expect("#")
        a = self.ident()
        sort = None
        if self.accept(":"):
            sort = self.sort()
        self.expect(".")
        self.push({a: sort or NMSET})
        body = self.index()
        self.pop()
        return I.ILam(a, sort, body)

    def index_pw(self):
        x = self.index_app()
        while self.accept("@@"):
            x = I.pointwise(x, self.index_app())
        return x

    def index_app(self):
        if self.at("prj1", "prj2"):
            side = 1 if self.advance().text == "prj1" else 2
            return I.IProj(side, self.index_post())
        x = self.index_post()
        while self._index_atom_start():
            x = I.IApp(x, self.index_post())
        return x

    def _index_atom_start(self):
        t = self.tok
        if t.kind == "num" and t.text == "0":
            return True
        if t.kind == "ident" and (t.text not in KEYWORDS or t.text == "unit"):
            return True
        return t.kind == "punct" and t.text in ("(", "{", "<")

    def index_post(self):
        start = self.tok
        head = self.index_head()
        while True:
            if self.at("[["):
                self.advance()
                x = self.index()
                self.expect("]]")
                head = self._apply_map(head, x, start)
            elif self.at("*") and self.peek().text == "[[":
                self.advance()
                self.advance()
                x = self.index()
                self.expect("]]")
                fn = head[1] if head[0] == "term" else head[1]
                if head[0] == "term":
                    fn = I.IName(fn)
                head = ("index", I.IStar(fn, x))
            else:
                break
        if head[0] == "term":
            m = head[1]
            if isinstance(m, N.NVar):
                return I.IVar(m.a)
            self.error("name function used as an index", start)
        return head[1]

    def _apply_map(self, head, x, start):
        kind, v = head
        if kind == "term":
            return ("index", I.IMap(v, x))
        return ("index", I.IFlatMap(v, x))

    def index_head(self):
        """('term', name term) for map heads, ('index', i) otherwise."""
        t = self.tok
        if t.kind == "num" and t.text == "0":
            self.advance()
            return ("index", EMPTY)
        if t.kind == "ident" and t.text == "unit":
            self.advance()
            return ("index", I.IUnit())
        if t.kind == "sym":
            # a bare symbol in index position abbreviates its singleton
            self.advance()
            return ("index", I.ISingle(N.NLit(N.Sym(t.text[1:]))))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            s = self.sort_of_var(t.text)
            if s == NM_FN:
                return ("term", N.NVar(t.text))
            return ("index", I.IVar(t.text))
        if self.accept("{"):
            m = self.name_term()
            self.expect("}")
            return ("index", I.ISingle(m))
        if self.accept("<"):
            m = self.name_term()
            self.expect(">")
            return ("index", I.IName(m))
        if self.accept("("):
            m = self.attempt(self._paren_name_head)
            if m is not None:
                return ("term", m)
            i = self.index()
            if self.accept(","):
                j = self.index()
                self.expect(")")
                return ("index", I.IPair(i, j))
            self.expect(")")
            return ("index", i)
        self.error("expected an index term")

    def _paren_name_head(self):
        """A parenthesized name function used as a map or star head."""
        if self.at("#") and self.peek(2).text == ":":
            self.error("annotated binder")
        m = self.name_term()
        self.expect(")")
        if not (self.at("[[") or (self.at("*") and self.peek().text == "[[")):
            self.error("not a map head")
        return m

    # ------------------------------------------------------------ propositions
    def prop(self):
        ps = [self.prop_atom()]
        while self.accept("&&"):
            ps.append(self.prop_atom())
        return conj(ps)

    def prop_atom(self):
        if self.accept("tt"):
            return TT
        if self.at("(") and self.attempt(lambda: self._paren_prop()) is not None:
            return self._last_prop
        i = self.index()
        if self.accept("##"):
            cls = Apart
        elif self.accept("=="):
            cls = Equiv
        else:
            self.error("expected '##' or '=='")
        j = self.index()
        sort = NMSET
        if self.accept(":"):
            sort = self.sort()
        return cls(i, j, sort)

    def _paren_prop(self):
        self.expect("(")
        p = self.prop()
        self.expect(")")
        self._last_prop = p
        return p

    # ------------------------------------------------------------ types
    def quant(self):
        a = self.ident()
        self.expect(":")
        if self.at("Type"):
            return a, self.kind(), None
        s = self.sort()
        self.push({a: s})
        p = TT
        if self.accept("|"):
            p = self.prop()
        self.pop()
        return a, s, p

    def vtype(self):
        if self.at("forall", "exists"):
            q = self.advance().text
            a, s, p = self.quant()
            self.expect(".")
            self.push({a: s})
            body = self.vtype()
            self.pop()
            return (T.AllIdx if q == "forall" else T.ExistsIdx)(a, s, p, body)
        a = self.vtype_prod()
        if self.accept("+"):
            return T.Sum(a, self.vtype())
        return a

    def vtype_prod(self):
        a = self.vtype_app()
        if self.at("x"):
            self.advance()
            return T.Prod(a, self.vtype_prod())
        return a

    def vtype_app(self):
        if self.at("Ref"):
            self.advance()
            self.expect("[")
            i = self.index()
            self.expect("]")
            return T.RefT(i, self.vtype_post())
        if self.at("Thk"):
            self.advance()
            self.expect("[")
            i = self.index()
            self.expect("]")
            self.expect("(")
            e = self.eff_type()
            self.expect(")")
            return T.ThkT(i, e)
        a = self.vtype_post()
        while self.at("(") and self.peek().text != ")":
            self.advance()
            b = self.vtype()
            self.expect(")")
            a = T.TypeApp(a, b)
        return a

    def vtype_post(self):
        a = self.vtype_atom()
        while self.accept("[["):
            i = self.index()
            self.expect("]]")
            a = T.IdxApp(a, i)
        return a

    def vtype_atom(self):
        t = self.tok
        if self.at("Unit"):
            self.advance()
            return T.UNIT
        if self.at("Bool"):
            self.advance()
            return T.BOOL
        if self.at("Nm"):
            self.advance()
            self.expect("[")
            i = self.index()
            self.expect("]")
            return T.NmT(i)
        if self.accept("("):
            if self.at("Nm") and self.peek().text == "->":
                self.advance()
                self.advance()
                self.expect("Nm")
                self.expect(")")
                self.expect("[")
                m = self.name_term()
                self.expect("]")
                return T.NmFnT(m)
            a = self.vtype()
            self.expect(")")
            return a
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            return T.TVar(t.text) if t.text in self.tyvars[-1] else T.TCon(t.text)
        self.error("expected a type")

    def comp_type(self):
        if self.at("F"):
            self.advance()
            return T.Lift(self.vtype_post_or_paren())
        a = self.vtype_app()
        self.expect("->")
        return T.Arrow(a, self.eff_type())

    def vtype_post_or_paren(self):
        if self.at("Ref", "Thk"):
            return self.vtype_app()
        return self.vtype_post()

    def eff_type(self):
        if self.at("forall"):
            self.advance()
            a, s, p = self.quant()
            self.expect(".")
            if p is None:
                self.push(tyvars={a})
                body = self.eff_type()
                self.pop()
                return T.AllType(a, s, body)
            self.push({a: s})
            body = self.eff_type()
            self.pop()
            return T.AllIdxE(a, s, p, body)
        if self.at("("):
            c = self.attempt(self._paren_comp)
            if c is None:
                c = self.comp_type()
        else:
            c = self.comp_type()
        if isinstance(c, T.EFF_TYPES) and not self.at("|>"):
            return c
        if isinstance(c, T.EFF_TYPES):
            self.error("effect annotation on a type that already has one")
        eff = T.PURE
        if self.accept("|>"):
            eff = self.effect()
        return T.WithEff(c, eff)

    def _paren_comp(self):
        self.expect("(")
        if self.at("forall"):
            c = self.eff_type()
        else:
            c = self.comp_type()
            if self.at("|>"):
                self.advance()
                c = T.WithEff(c, self.effect())
        self.expect(")")
        return c

    def effect(self):
        self.expect("<")
        w = self.index()
        self.expect(";")
        r = self.index()
        self.expect(">")
        return T.Effect(w, r)

    def any_type(self):
        """A value type or a type-with-effects (cell declarations)."""
        save = self.i
        t = self.attempt(self._value_type_only)
        if t is not None:
            return t
        self.i = save
        return self.eff_type()

    def _value_type_only(self):
        t = self.vtype()
        if not self.at(";", "=", ")"):
            self.error("not a value type")
        return t

    def ctor_sig(self):
        quants = []
        pushed = 0
        while self.accept("forall"):
            a, s, p = self.quant()
            self.expect(".")
            quants.append((a, s, p))
            self.push({a: s})
            pushed += 1
        args = [self.vtype()]
        while self.accept("->"):
            args.append(self.vtype())
        for _ in range(pushed):
            self.pop()
        return T.CtorSig(tuple(quants), tuple(args[:-1]), args[-1])

    # ------------------------------------------------------------ values
    def sp(self):
        return self.tok.span

    def value(self):
        sp = self.sp()
        v = self.value_post()
        return v

    def value_post(self):
        v = self.value_atom()
        while self.at("[") and not isinstance(v, S.Con):
            sp = self.sp()
            self.advance()
            i = self.index()
            self.expect("]")
            v = S.VInst(v, i, span=sp)
        return v

    def _value_start(self):
        t = self.tok
        if t.kind in ("num", "sym"):
            return True
        if t.kind == "ident":
            return t.text not in KEYWORDS or t.text in (
                "true", "false", "inj1", "inj2", "pack", "nmfn", "ptr", "susp")
        return t.kind == "punct" and t.text in ("(", "@")

    def value_atom(self):
        sp = self.sp()
        t = self.tok
        if t.kind == "num":
            self.advance()
            return S.NatV(int(t.text), span=sp)
        if self.accept("@"):
            return S.NameV(self.name_literal(), span=sp)
        if self.accept("true"):
            return S.Inj(1, S.UnitV(span=sp), span=sp)
        if self.accept("false"):
            return S.Inj(2, S.UnitV(span=sp), span=sp)
        if self.at("inj1", "inj2"):
            i = 1 if self.advance().text == "inj1" else 2
            return S.Inj(i, self.value_atom(), span=sp)
        if self.accept("nmfn"):
            self.expect("(")
            m = self.name_term()
            self.expect(")")
            return S.NameFnV(m, span=sp)
        if self.at("ptr", "susp"):
            which = self.advance().text
            self.expect("(")
            start = self.tok
            m = self.name_term()
            if not isinstance(m, N.NLit):
                self.error("expected a literal name", start)
            n = m.n
            self.expect(")")
            return (S.RefV if which == "ptr" else S.ThunkV)(n, span=sp)
        if self.accept("pack"):
            i = None
            if self.accept("["):
                i = self.index()
                self.expect("]")
            self.expect("(")
            v = self.value()
            self.expect(")")
            return S.Pack(i, v, span=sp)
        if self.accept("("):
            if self.accept(")"):
                return S.UnitV(span=sp)
            v = self.value()
            if self.accept(","):
                w = self.value()
                self.expect(")")
                return S.PairV(v, w, span=sp)
            if self.accept(":"):
                ty = self.vtype()
                self.expect(")")
                return S.Anno(v, ty, span=sp)
            self.expect(")")
            return v
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            if t.text in self.ctors:
                return self.con_rest(t.text, sp)
            return S.Var(t.text, span=sp)
        self.error("expected a value")

    def con_rest(self, c, sp):
        idx = ()
        if self.accept("["):
            idx = [self.index()]
            while self.accept(","):
                idx.append(self.index())
            self.expect("]")
            idx = tuple(idx)
        args = ()
        if self.at("(") and self.peek().text != ")":
            self.advance()
            args = [self.value()]
            while self.accept(","):
                args.append(self.value())
            self.expect(")")
            args = tuple(args)
        return S.Con(c, idx, args, span=sp)

    # ------------------------------------------------------------ expressions
    def expr(self):
        sp = self.sp()
        if self.accept("fun"):
            x = self.ident()
            self.expect(".")
            return S.Lam(x, self.expr(), span=sp)
        if self.accept("let"):
            if self.accept("("):
                x1 = self.ident()
                self.expect(",")
                x2 = self.ident()
                self.expect(")")
                self.expect("=")
                e1 = self.expr()
                self.expect("in")
                e2 = self.expr()
                tmp = "p~" + x1 + "~" + x2
                return S.Let(e1, tmp, S.Split(S.Var(tmp, span=sp), x1, x2, e2, span=sp), span=sp)
            x = self.ident()
            self.expect("=")
            e1 = self.expr()
            self.expect("in")
            return S.Let(e1, x, self.expr(), span=sp)
        if self.accept("if"):
            v = self.value()
            self.expect("then")
            e1 = self.expr()
            self.expect("else")
            return S.If(v, e1, self.expr(), span=sp)
        if self.accept("split"):
            v = self.value()
            self.expect("as")
            self.expect("(")
            x1 = self.ident()
            self.expect(",")
            x2 = self.ident()
            self.expect(")")
            self.expect("in")
            return S.Split(v, x1, x2, self.expr(), span=sp)
        if self.accept("case"):
            v = self.value()
            self.expect("of")
            self.expect("inj1")
            x1 = self.ident()
            self.expect("=>")
            e1 = self.expr()
            self.expect("|")
            self.expect("inj2")
            x2 = self.ident()
            self.expect("=>")
            e2 = self.expr()
            self.expect("end")
            return S.Case(v, x1, e1, x2, e2, span=sp)
        if self.accept("match"):
            v = self.value()
            self.expect("with")
            arms = []
            self.accept("|")
            while True:
                arms.append(self.arm())
                if not self.accept("|"):
                    break
            self.expect("end")
            return S.Match(v, tuple(arms), span=sp)
        if self.accept("unpack"):
            v = self.value()
            self.expect("as")
            self.expect("(")
            a = self.ident()
            self.expect(",")
            x = self.ident()
            self.expect(")")
            self.expect("in")
            self.push({a: NMSET})
            e = self.expr()
            self.pop()
            return S.Unpack(v, a, x, e, span=sp)
        if self.accept("thunk"):
            v = self.bracket_value()
            return S.Thunk(v, self.expr(), span=sp)
        if self.accept("scope"):
            v = self.scope_value()
            return S.Scope(v, self.expr(), span=sp)
        return self.app()

    def bracket_value(self):
        self.expect("[")
        v = self.value()
        self.expect("]")
        return v

    def scope_value(self):
        self.expect("[")
        sp = self.sp()
        if self.tok.kind == "sym":
            n = self.name_literal()
            v = S.NameFnV(N.NLam("a", N.NBin(N.NLit(n), N.NVar("a"))), span=sp)
        else:
            v = self.value()
        self.expect("]")
        return v

    def arm(self):
        sp = self.sp()
        c = self.ident("constructor")
        idx = ()
        if self.accept("["):
            idx = [self.ident()]
            while self.accept(","):
                idx.append(self.ident())
            self.expect("]")
            idx = tuple(idx)
        xs = []
        while self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
            xs.append(self.advance().text)
        self.expect("=>")
        self.push({a: NMSET for a in idx})
        e = self.expr()
        self.pop()
        return S.Arm(c, idx, tuple(xs), e, span=sp)

    def app(self):
        e = self.eatom()
        while True:
            sp = self.sp()
            if self.at("["):
                self.advance()
                if self.accept("type"):
                    t = self.vtype()
                    self.expect("]")
                    e = S.EInstTy(e, t, span=sp)
                else:
                    i = self.index()
                    self.expect("]")
                    e = S.EInstIdx(e, i, span=sp)
            elif self._value_start() and not self.at("in", "then", "else", "end", "|"):
                e = S.App(e, self.value_post(), span=getattr(e, "span", sp))
            else:
                return e

    def eatom(self):
        sp = self.sp()
        t = self.tok
        if self.accept("ret"):
            return S.Ret(self.value_post(), span=sp)
        if self.accept("force"):
            return S.Force(self.value_post(), span=sp)
        if self.accept("get"):
            return S.Get(self.value_post(), span=sp)
        if self.accept("ref"):
            v = self.bracket_value()
            return S.Ref(v, self.value_post(), span=sp)
        if self.accept("nmapp"):
            f = self.value_post()
            return S.NameApp(f, self.value_post(), span=sp)
        if self.accept("nmbin"):
            a = self.value_post()
            return S.NmBin(a, self.value_post(), span=sp)
        if t.kind == "ident" and t.text in S.PRIMS:
            self.advance()
            args = tuple(self.value_post() for _ in range(S.PRIMS[t.text]))
            return S.Prim(t.text, args, span=sp)
        if self.accept("("):
            e = self.expr()
            if self.accept(":"):
                ty = self.eff_type()
                self.expect(")")
                return S.EAnno(e, ty, span=sp)
            self.expect(")")
            return e
        if t.kind == "ident" and t.text not in KEYWORDS and t.text not in self.ctors:
            self.advance()
            return S.Force(S.Var(t.text, span=sp), span=sp)
        self.error("expected an expression")

    # ------------------------------------------------------------ declarations
    def program(self):
        decls = []
        main = None
        if self.tok.kind == "eof":
            self.error("expected declaration")
        while self.tok.kind != "eof":
            d = self.decl()
            if isinstance(d, S.MainDecl):
                if main is not None:
                    self.error("duplicate main")
                main = d
            else:
                decls.append(d)
        return S.Program(tuple(decls), main)

    def decl(self):
        sp = self.sp()
        if self.accept("nmtm"):
            name = self.ident()
            self.expect(":")
            s = self.sort()
            self.expect("=")
            m = self.name_term()
            self.expect(";")
            self.scope[-1][name] = s
            return S.NmtmDecl(name, s, m, span=sp)
        if self.accept("idxtm"):
            name = self.ident()
            self.expect(":")
            s = self.sort()
            self.expect("=")
            i = self.index()
            self.expect(";")
            self.scope[-1][name] = s
            return S.IdxtmDecl(name, s, i, span=sp)
        if self.accept("type"):
            name = self.ident()
            params = []
            while self.tok.kind == "ident" and not self.at("="):
                params.append(self.ident())
            self.expect("=")
            self.push({p: NMSET for p in params})
            t = self.vtype()
            self.pop()
            self.expect(";")
            return S.TypeAlias(name, tuple(params), t, span=sp)
        if self.accept("data"):
            name = self.ident()
            self.expect(":")
            k = self.kind()
            self.expect("=")
            ctors = []
            while self.accept("|"):
                csp = self.sp()
                c = self.ident("constructor")
                self.expect(":")
                ctors.append(S.CtorDecl(c, self.ctor_sig(), span=csp))
                self.ctors.add(c)
            self.expect(";")
            return S.DataDecl(name, k, tuple(ctors), span=sp)
        if self.accept("def"):
            name = self.ident()
            self.expect(":")
            t = self.eff_type()
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return S.DefDecl(name, t, e, span=sp)
        if self.accept("cell"):
            n = self.name_literal()
            self.expect(":")
            t = self.any_type()
            self.expect("=")
            v = self.value()
            self.expect(";")
            return S.CellDecl(n, t, v, span=sp)
        if self.accept("main"):
            self.expect(":")
            t = self.eff_type()
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return S.MainDecl(t, e, span=sp)
        self.error("expected a declaration")

    def done(self):
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")


def _nbin(a, b):
    if isinstance(a, N.NLit) and isinstance(b, N.NLit):
        return N.NLit(N.Bin(a.n, b.n))
    return N.NBin(a, b)


# ---------------------------------------------------------------- entry points

def _run(text, method, file="<input>", scope=None, ctors=None):
    p = Parser(text, file, scope, ctors)
    out = getattr(p, method)()
    p.done()
    return out


def parse_program(text, file="<input>"):
    return _run(text, "program", file)


def parse_expr(text, scope=None, ctors=None):
    return _run(text, "expr", scope=scope, ctors=ctors)


def parse_value(text, scope=None, ctors=None):
    return _run(text, "value", scope=scope, ctors=ctors)


def parse_name_term(text, scope=None):
    return _run(text, "name_term", scope=scope)


def parse_index(text, scope=None):
    return _run(text, "index", scope=scope)


def parse_sort(text):
    return _run(text, "sort")


def parse_prop(text, scope=None):
    return _run(text, "prop", scope=scope)


def parse_type(text, scope=None):
    return _run(text, "vtype", scope=scope)


def parse_eff_type(text, scope=None):
    return _run(text, "eff_type", scope=scope)


# ---------------------------------------------------------------- solver input lines

@dataclass(frozen=True)
class ObligationLine:
    sorts: dict
    props: tuple
    kind: str
    lhs: object
    rhs: object
    sort: object
    span: Span


def parse_obligation(line, file="<input>", lineno=1):
    """CTX |- LHS == RHS : SORT  or  CTX |- LHS ## RHS : SORT.

    CTX is a comma-separated list of 'a : S' declarations and propositions.
    """
    p = Parser(line, file)
    for k, t in enumerate(p.toks):
        p.toks[k] = Tok(t.kind, t.text, Span(file, lineno, t.span.col))
    sorts = {}
    props = []
    if not p.at("|-"):
        while True:
            if p.tok.kind == "ident" and p.peek().text == ":" and p.tok.text not in KEYWORDS:
                a = p.ident()
                p.expect(":")
                sorts[a] = p.sort()
                p.scope[-1][a] = sorts[a]
            else:
                props.append(p.prop())
            if not p.accept(","):
                break
    p.expect("|-")
    start = p.i
    # the sort comes last; find it first so sides can be parsed at the right class
    colon = max((k for k, t in enumerate(p.toks) if t.text == ":" and k > start), default=None)
    if colon is None:
        p.error("missing ': SORT'")
    q = Parser("", file)
    q.toks = p.toks[colon + 1:]
    q.scope = p.scope
    sort = q.sort()
    q.done()
    p.toks = p.toks[:colon] + [Tok("eof", "", p.toks[colon].span)]
    name_sort = N.is_name_sort(sort)
    lhs = p.name_term() if name_sort else p.index()
    if p.accept("=="):
        kind = "equiv"
    elif p.accept("##"):
        kind = "apart"
    else:
        p.error("expected '==' or '##'")
    rhs = p.name_term() if name_sort else p.index()
    p.done()
    return ObligationLine(sorts, tuple(props), kind, lhs, rhs, sort, Span(file, lineno, 1))
