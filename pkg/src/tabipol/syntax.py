"""Concrete syntax: formula parser/printer and the JSON tableau format.

Grammar (loosest binding first)::

    formula := impl ('<->' impl)*
    impl    := disj ('->' impl)?
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '~' unary | ('all' | 'ex') VAR+ '.' formula | primary
    primary := 'true' | 'false' | '(' formula ')' | atom | term ('=' | '!=') term

Variables start with an uppercase letter or ``_``; predicate and function
symbols start lowercase.  ``%`` starts a comment running to end of line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .clausify import ClauseTag
from .logic import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bot,
    Exists,
    ExistsRel,
    Fn,
    Forall,
    ForallRel,
    Formula,
    Lit,
    Not,
    Or,
    Term,
    Top,
    Var,
    conj,
    disj,
    iff,
    implies,
    term_str,
)
from .tableau import SIDES, Node, Tableau


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None) -> None:
        self.span = span
        where = f" at {span.start}..{span.end}" if span else ""
        super().__init__(message + where)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<op><->|->|!=|[~&|().,=])
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<sym>[a-z0-9][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"all", "ex", "true", "false"}


@dataclass
class _Tok:
    kind: str
    text: str
    start: int
    end: int


def _lex(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos = 0
    raw = text.encode("utf-8")
    # byte offsets for spans; tokens themselves are ASCII
    def boff(i: int) -> int:
        return len(text[:i].encode("utf-8"))

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(boff(pos), boff(pos + 1)))
        kind = m.lastgroup
        if kind != "ws":
            t = m.group()
            if kind == "sym" and t in _KEYWORDS:
                kind = t
            out.append(_Tok(kind, t, boff(m.start()), boff(m.end())))
        pos = m.end()
    out.append(_Tok("eof", "", len(raw), len(raw)))
    return out


class _Parser:
    def __init__(self, text: str, arities: dict | None = None) -> None:
        self.toks = _lex(text)
        self.i = 0
        self.preds: dict[str, int] = {} if arities is None else arities.setdefault("preds", {})
        self.funs: dict[str, int] = {} if arities is None else arities.setdefault("funs", {})

    # helpers
    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t.text == text and t.kind in ("op", text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", SourceSpan(t.start, t.end))
        return self.next()

    def _arity(self, table: dict, name: str, n: int, tok: _Tok, kind: str) -> None:
        prior = table.setdefault(name, n)
        if prior != n:
            raise ParseError(f"arity conflict for {kind} {name}: {prior} vs {n}", SourceSpan(tok.start, tok.end))

    # grammar
    def formula(self) -> Formula:
        f = self.impl()
        while self.accept("<->"):
            f = iff(f, self.impl())
        return f

    def impl(self) -> Formula:
        f = self.disj()
        if self.accept("->"):
            return implies(f, self.impl())
        return f

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.accept("|"):
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        t = self.peek()
        if self.accept("~"):
            return Not(self.unary())
        if t.kind in ("all", "ex"):
            self.next()
            vs = []
            while self.peek().kind == "var":
                vs.append(self.next().text)
            if not vs:
                u = self.peek()
                raise ParseError("quantifier needs at least one variable", SourceSpan(u.start, u.end))
            self.expect(".")
            body = self.formula()
            q = Forall if t.kind == "all" else Exists
            for v in reversed(vs):
                body = q(v, body)
            return body
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t.kind == "true":
            self.next()
            return TRUE
        if t.kind == "false":
            self.next()
            return FALSE
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "sym":
            save = self.i
            name = self.next().text
            args = self.arglist()
            nxt = self.peek()
            if nxt.text in ("=", "!="):
                self.i = save
                return self.equation()
            self._arity(self.preds, name, len(args), t, "predicate")
            return Atom(name, args)
        if t.kind == "var":
            return self.equation()
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", SourceSpan(t.start, t.end))

    def equation(self) -> Formula:
        lhs = self.term()
        t = self.next()
        if t.text not in ("=", "!="):
            raise ParseError("expected '=' or '!='", SourceSpan(t.start, t.end))
        rhs = self.term()
        self._arity(self.preds, "eq", 2, t, "predicate")
        a = Atom("eq", (lhs, rhs))
        return a if t.text == "=" else Not(a)

    def arglist(self) -> tuple:
        if not self.accept("("):
            return ()
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self) -> Term:
        t = self.next()
        if t.kind == "var":
            return Var(t.text)
        if t.kind == "sym":
            args = self.arglist()
            self._arity(self.funs, t.text, len(args), t, "function")
            return Fn(t.text, args)
        raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", SourceSpan(t.start, t.end))

    def done(self) -> None:
        t = self.peek()
        if t.kind != "eof":
            raise ParseError(f"trailing input {t.text!r}", SourceSpan(t.start, t.end))


def parse_formula(text: str, arities: dict | None = None) -> Formula:
    """Parse one formula.  Pass a shared ``arities`` dict to enforce
    consistent symbol arities across several formulas of one problem."""
    p = _Parser(text, arities)
    f = p.formula()
    p.done()
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.done()
    return t


def parse_literal(text: str) -> Lit:
    f = parse_formula(text)
    if type(f) is Atom:
        return f.lit(True)
    if type(f) is Not and type(f.arg) is Atom:
        return f.arg.lit(False)
    raise ParseError(f"not a literal: {text!r}")


# --------------------------------------------------------------------------
# printing

_PREC = {Or: 1, And: 2}


def _atom_str(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({','.join(term_str(x) for x in a.args)})"


def print_formula(f: Formula) -> str:
    return _pr(f)


def _operand(f: Formula, parent: type) -> str:
    t = type(f)
    s = _pr(f)
    if t in (Forall, Exists, ForallRel, ExistsRel):
        return f"({s})"
    if t in _PREC and parent in _PREC:
        return f"({s})"
    return s


def _pr(f: Formula) -> str:
    t = type(f)
    if t is Top:
        return "true"
    if t is Bot:
        return "false"
    if t is Atom:
        return _atom_str(f)
    if t is Not:
        inner = f.arg
        s = _pr(inner)
        if type(inner) in (Atom, Top, Bot, Not):
            return "~" + s
        return f"~({s})"
    if t is And:
        return " & ".join(_operand(a, And) for a in f.args)
    if t is Or:
        return " | ".join(_operand(a, Or) for a in f.args)
    if t is Forall or t is Exists:
        vs = [f.var]
        body = f.body
        while type(body) is t:
            vs.append(body.var)
            body = body.body
        kw = "all" if t is Forall else "ex"
        return f"{kw} {' '.join(vs)}. {_body(body)}"
    if t is ForallRel:
        inner = f"~{_atom_str(f.guard)} | {_operand(f.body, Or) if type(f.body) is not Or else _pr(f.body)}"
        if not f.vars:
            return f"({inner})"
        return f"all {' '.join(f.vars)}. ({inner})"
    if t is ExistsRel:
        inner = f"{_atom_str(f.guard)} & {_operand(f.body, And) if type(f.body) is not And else _pr(f.body)}"
        if not f.vars:
            return f"({inner})"
        return f"ex {' '.join(f.vars)}. ({inner})"
    raise TypeError(f"cannot print {f!r}")


def _body(f: Formula) -> str:
    s = _pr(f)
    if type(f) in (And, Or):
        return f"({s})"
    return s


# --------------------------------------------------------------------------
# tableau JSON


def _node_to_obj(n: Node) -> dict:
    obj: dict = {}
    if n.lit is not None:
        obj["lit"] = str(n.lit)
    if n.side is not None:
        obj["side"] = n.side
    if n.tag is not None:
        obj["tag"] = str(n.tag)
    obj["children"] = [_node_to_obj(c) for c in n.children]
    return obj


def tableau_to_obj(t: Tableau) -> dict:
    obj = _node_to_obj(t.root)
    if t.empty_side is not None:
        obj["empty_side"] = t.empty_side
    return obj


def print_tableau(t: Tableau) -> str:
    return json.dumps(tableau_to_obj(t), indent=1, ensure_ascii=False) + "\n"


class TableauFormatError(ValueError):
    pass


def tableau_from_obj(obj: dict) -> Tableau:
    def mk(o, is_root: bool) -> Node:
        if not isinstance(o, dict):
            raise TableauFormatError("tableau node must be an object")
        unknown = set(o) - {"lit", "side", "tag", "children", "empty_side", "id"}
        if unknown:
            raise TableauFormatError(f"unknown node fields {sorted(unknown)}")
        lit = None
        if "lit" in o:
            if is_root:
                raise TableauFormatError("the root must not carry a literal")
            try:
                lit = parse_literal(o["lit"])
            except ParseError as e:
                raise TableauFormatError(f"bad literal {o['lit']!r}: {e}") from e
        elif not is_root:
            raise TableauFormatError("non-root node without 'lit'")
        side = o.get("side")
        if side is not None and side not in SIDES:
            raise TableauFormatError(f"unknown side tag {side!r}")
        tag = None
        if o.get("tag") is not None:
            try:
                tag = ClauseTag.parse(o["tag"])
            except ValueError as e:
                raise TableauFormatError(str(e)) from e
        kids = o.get("children", [])
        if not isinstance(kids, list):
            raise TableauFormatError("'children' must be an array")
        return Node(lit, side, tag, [mk(k, False) for k in kids])

    root = mk(obj, True)
    es = obj.get("empty_side")
    if es is not None and es not in SIDES:
        raise TableauFormatError(f"unknown side tag {es!r}")
    return Tableau(root, es)


def parse_tableau(text: str) -> Tableau:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise TableauFormatError(f"malformed tableau: {e}") from e
    return tableau_from_obj(obj)


__all__ = [
    "SourceSpan",
    "ParseError",
    "TableauFormatError",
    "parse_formula",
    "parse_term",
    "parse_literal",
    "print_formula",
    "parse_tableau",
    "print_tableau",
    "tableau_to_obj",
    "tableau_from_obj",
]
