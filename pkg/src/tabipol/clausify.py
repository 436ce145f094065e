"""Clausal normal forms.

Two translations live here.  ``clausify`` is the plain one (NNF, inner
Skolemization, CNF by distribution) used for Craig-Lyndon interpolation.
``definitional_clausify_rqfo`` introduces a definer predicate per position of
an RQFO formula and emits clauses tagged with one of eight forms; the access
interpolation machinery depends on those tags.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

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
    FreshNames,
    Lit,
    Not,
    Or,
    Term,
    Top,
    Var,
    atoms_with_polarity,
    clause_str,
    conj,
    disj,
    free_vars,
    is_sentence,
    nnf,
    rename_bound,
    subst_term,
    term_vars,
    unfold_relativized,
    vocabulary,
)

RED, BLUE = "red", "blue"
EQ = "eq"


class NotRQFOError(ValueError):
    def __init__(self, message: str, subformula: Formula | None = None) -> None:
        self.subformula = subformula
        if subformula is not None:
            from .syntax import print_formula

            message = f"{message}: {print_formula(subformula)}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class GlobalPosition:
    side: str  # "L" or "R"
    path: tuple = ()

    def child(self, i: int) -> "GlobalPosition":
        return GlobalPosition(self.side, self.path + (i,))

    def __str__(self) -> str:
        return self.side + ("".join(map(str, self.path)) if self.path else "e")

    @staticmethod
    def parse(text: str) -> "GlobalPosition":
        side, rest = text[0], text[1:]
        if side not in "LR" or not rest:
            raise ValueError(f"bad global position {text!r}")
        return GlobalPosition(side, () if rest == "e" else tuple(int(c) for c in rest))


@dataclass(frozen=True)
class ClauseTag:
    position: GlobalPosition
    form: int

    def __str__(self) -> str:
        return f"{self.position}:{self.form}"

    @staticmethod
    def parse(text: str) -> "ClauseTag":
        pos_text, _, form = text.partition(":")
        f = int(form)
        if not 1 <= f <= 8:
            raise ValueError(f"form tag must be within 1..8, got {f}")
        return ClauseTag(GlobalPosition.parse(pos_text), f)


@dataclass(frozen=True)
class InputClause:
    lits: tuple
    side: str | None = None
    tag: ClauseTag | None = None
    label: str = ""

    def __str__(self) -> str:
        return clause_str(self.lits)


@dataclass(frozen=True)
class PositionInfo:
    """What the definitional translation recorded for one position."""

    position: GlobalPosition
    kind: str  # true false and or forall exists
    definer: Lit  # positive D_p
    guard: Lit | None = None  # positive R_p
    qvars: tuple = ()
    sigma: Mapping[str, Term] = field(default_factory=dict)
    children: tuple = ()
    trivial: bool = False  # subformula is `true`: no clause mentions D_p positively


@dataclass(frozen=True)
class ClausalForm:
    clauses: tuple
    skolem_funs: frozenset = frozenset()
    side: str | None = None
    source: Formula | None = None
    positions: Mapping[GlobalPosition, PositionInfo] = field(default_factory=dict)

    def lit_lists(self) -> list[tuple]:
        return [c.lits for c in self.clauses]

    def __len__(self) -> int:
        return len(self.clauses)

    def with_side(self, side: str) -> "ClausalForm":
        cs = tuple(InputClause(c.lits, side, c.tag, c.label) for c in self.clauses)
        return ClausalForm(cs, self.skolem_funs, side, self.source, self.positions)

    def __str__(self) -> str:
        out = []
        for c in self.clauses:
            extra = f"   % {c.tag}" if c.tag else (f"   % {c.label}" if c.label else "")
            out.append(f"{c}{extra}")
        return "\n".join(out)


# --------------------------------------------------------------------------
# plain clausification


class ClausificationTooLarge(ValueError):
    pass


def _skolemize(f: Formula, names: FreshNames, introduced: list[str]) -> Formula:
    def go(g: Formula, env: dict[str, Term]) -> Formula:
        t = type(g)
        if t is Atom:
            return Atom(g.pred, tuple(subst_term(a, env) for a in g.args))
        if t is Not:
            return Not(go(g.arg, env))
        if t is And or t is Or:
            return t(tuple(go(a, env) for a in g.args))
        if t is Forall:
            return Forall(g.var, go(g.body, env))
        if t is Exists:
            args: set[str] = set()
            for v in free_vars(g):
                tv = env.get(v, Var(v))
                term_vars(tv, args)
            name = names()
            introduced.append(name)
            sk = Fn(name, tuple(Var(v) for v in sorted(args)))
            return go(g.body, {**env, g.var: sk})
        return g

    return go(f, {})


def _strip_universals(f: Formula) -> Formula:
    t = type(f)
    if t is Forall:
        return _strip_universals(f.body)
    if t is And or t is Or:
        return t(tuple(_strip_universals(a) for a in f.args))
    return f


def _cnf(f: Formula, limit: int) -> list[frozenset]:
    t = type(f)
    if t is Top:
        return []
    if t is Bot:
        return [frozenset()]
    if t is Atom:
        return [frozenset([f.lit(True)])]
    if t is Not:
        return [frozenset([f.arg.lit(False)])]
    if t is And:
        out: list[frozenset] = []
        for a in f.args:
            out.extend(_cnf(a, limit))
        return out
    if t is Or:
        acc: list[frozenset] = [frozenset()]
        for a in f.args:
            part = _cnf(a, limit)
            if len(acc) * len(part) > limit:
                raise ClausificationTooLarge(f"CNF exceeds {limit} clauses")
            acc = [x | y for x in acc for y in part]
            acc = [c for c in acc if not _tautology(c)]
        return acc
    raise TypeError(f"unexpected node in CNF conversion: {f!r}")


def _tautology(c: frozenset) -> bool:
    return any(l.complement() in c for l in c if l.positive)


def _ordered_clause(c: frozenset, order: dict[Lit, int]) -> tuple:
    return tuple(sorted(c, key=lambda l: order[l]))


def rename_clause_vars(lits: Iterable[Lit], prefix: str = "X") -> tuple:
    mapping: dict[str, Term] = {}
    for l in lits:
        for a in l.args:
            for v in _vars_in_order(a):
                if v not in mapping:
                    mapping[v] = Var(f"{prefix}{len(mapping) + 1}")
    return tuple(l.substitute(mapping) for l in lits)


def _vars_in_order(t: Term) -> list[str]:
    if type(t) is Var:
        return [t.name]
    out: list[str] = []
    for a in t.args:
        out.extend(_vars_in_order(a))
    return out


def clausify(
    f: Formula,
    side: str | None = None,
    skolem_names: FreshNames | None = None,
    limit: int = 200_000,
) -> ClausalForm:
    """NNF, inner Skolemization, distribution.  ``f`` must be a sentence."""
    if not is_sentence(f):
        raise ValueError(f"clausify expects a sentence; free variables {sorted(free_vars(f))}")
    if skolem_names is None:
        skolem_names = FreshNames("sk", avoid=vocabulary(f).funs, start=0)
    g = nnf(unfold_relativized(f))
    g = rename_bound(g, FreshNames("_v"))
    introduced: list[str] = []
    g = _strip_universals(_skolemize(g, skolem_names, introduced))
    # literal order: first occurrence in the formula, for stable clause layout
    order: dict[Lit, int] = {}
    for atom, polarity in atoms_with_polarity(g):
        order.setdefault(atom.lit(polarity), len(order))
    seen: set[frozenset] = set()
    clauses = []
    for c in _cnf(g, limit):
        if c in seen:
            continue
        seen.add(c)
        lits = rename_clause_vars(_ordered_clause(c, order))
        clauses.append(InputClause(lits, side))
    return ClausalForm(tuple(clauses), frozenset(introduced), side, f)


def clauses_from_lits(clauses: Iterable[Iterable[Lit]], side: str | None = None) -> ClausalForm:
    return ClausalForm(tuple(InputClause(tuple(c), side) for c in clauses), frozenset(), side)


def is_horn_clause(lits: Iterable[Lit]) -> bool:
    return sum(1 for l in lits if l.positive) <= 1


def horn_matrix_ok(f: Formula) -> bool:
    """Is the (NNF) quantifier-free formula a conjunction of Horn clauses?"""
    g = nnf(f)
    parts = g.args if type(g) is And else (g,)
    for c in parts:
        lits = c.args if type(c) is Or else (c,)
        npos = 0
        for l in lits:
            if type(l) is Atom:
                npos += 1
            elif type(l) is Not and type(l.arg) is Atom:
                pass
            elif type(l) in (Top, Bot):
                pass
            else:
                return False
        if npos > 1:
            return False
    return True


def strip_prefix(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    prefix = []
    while type(f) in (Forall, Exists):
        prefix.append(("all" if type(f) is Forall else "ex", f.var))
        f = f.body
    return prefix, f


def is_horn_sentence(f: Formula) -> bool:
    _, matrix = strip_prefix(f)
    if any(type(x) in (Forall, Exists, ForallRel, ExistsRel) for x in _walk(matrix)):
        return False
    return horn_matrix_ok(matrix)


def _walk(f: Formula):
    yield f
    t = type(f)
    if t is Not:
        yield from _walk(f.arg)
    elif t is And or t is Or:
        for a in f.args:
            yield from _walk(a)
    elif t in (Forall, Exists, ForallRel, ExistsRel):
        yield from _walk(f.body)


# --------------------------------------------------------------------------
# RQFO recognition and negation


def _relational(atom: Atom) -> None:
    for a in atom.args:
        if type(a) is Fn and a.args:
            raise NotRQFOError("not RQFO (non-relational argument)", atom)


def _atom_vars(a: Atom) -> set[str]:
    acc: set[str] = set()
    for t in a.args:
        term_vars(t, acc)
    return acc


def to_rqfo(f: Formula) -> Formula:
    """Recognize relativized quantification after pushing negation inward."""
    return _rq(nnf(unfold_relativized(f)))


def _rq(f: Formula) -> Formula:
    t = type(f)
    if t is Top or t is Bot:
        return f
    if t is Atom:
        _relational(f)
        return ExistsRel((), f, TRUE)
    if t is Not:
        _relational(f.arg)
        return ForallRel((), f.arg, FALSE)
    if t is And:
        for i, a in enumerate(f.args):
            if type(a) is Atom:
                _relational(a)
                rest = f.args[:i] + f.args[i + 1 :]
                return ExistsRel((), a, _rq(conj(*rest)))
        return And(tuple(_rq(a) for a in f.args))
    if t is Or:
        for i, a in enumerate(f.args):
            if type(a) is Not:
                _relational(a.arg)
                rest = f.args[:i] + f.args[i + 1 :]
                return ForallRel((), a.arg, _rq(disj(*rest)))
        return Or(tuple(_rq(a) for a in f.args))
    if t is Forall or t is Exists:
        vs: list[str] = []
        body = f
        while type(body) is t:
            vs.append(body.var)
            body = body.body
        live = [v for v in dict.fromkeys(vs) if v in free_vars(body)]
        if not live:
            return _rq(body)
        want = set(live)
        if t is Forall:
            cands = body.args if type(body) is Or else (body,)
            for i, c in enumerate(cands):
                if type(c) is Not and type(c.arg) is Atom and want <= _atom_vars(c.arg):
                    _relational(c.arg)
                    rest = cands[:i] + cands[i + 1 :]
                    return ForallRel(tuple(live), c.arg, _rq(disj(*rest)))
        else:
            cands = body.args if type(body) is And else (body,)
            for i, c in enumerate(cands):
                if type(c) is Atom and want <= _atom_vars(c):
                    _relational(c)
                    rest = cands[:i] + cands[i + 1 :]
                    return ExistsRel(tuple(live), c, _rq(conj(*rest)))
        raise NotRQFOError("not RQFO (unrelativized quantifier)", f)
    if t is ForallRel or t is ExistsRel:
        _relational(f.guard)
        return t(f.vars, f.guard, _rq(f.body))
    raise NotRQFOError("not RQFO", f)


def is_rqfo(f: Formula) -> bool:
    t = type(f)
    if t is Top or t is Bot:
        return True
    if t is And or t is Or:
        return all(is_rqfo(a) for a in f.args)
    if t is ForallRel or t is ExistsRel:
        return all(not (type(a) is Fn and a.args) for a in f.guard.args) and is_rqfo(f.body)
    return False


def negate_rqfo(f: Formula) -> Formula:
    t = type(f)
    if t is Top:
        return FALSE
    if t is Bot:
        return TRUE
    if t is And:
        return Or(tuple(negate_rqfo(a) for a in f.args))
    if t is Or:
        return And(tuple(negate_rqfo(a) for a in f.args))
    if t is ForallRel:
        return ExistsRel(f.vars, f.guard, negate_rqfo(f.body))
    if t is ExistsRel:
        return ForallRel(f.vars, f.guard, negate_rqfo(f.body))
    raise NotRQFOError("not RQFO", f)


def rqfo_children(f: Formula) -> tuple:
    """Immediate subformulas under the binary reading of n-ary connectives."""
    t = type(f)
    if t is And or t is Or:
        rest = f.args[1:]
        second = rest[0] if len(rest) == 1 else t(rest)
        return (f.args[0], second)
    if t is ForallRel or t is ExistsRel:
        return (f.body,)
    return ()


# --------------------------------------------------------------------------
# definitional clausification


def definer_name(pos: GlobalPosition) -> str:
    return f"d_{pos}"


def skolem_name(pos: GlobalPosition, i: int) -> str:
    path = "".join(map(str, pos.path)) if pos.path else "e"
    return f"sk_{pos.side}_{path}_{i}"


def definitional_clausify_rqfo(f: Formula, side: str) -> ClausalForm:
    """Definitional clause form with (position, form) tags.

    ``side`` is "L" for the first interpolation input and "R" for the
    negated second one.  Clauses whose positive definer names a ``true``
    subformula are valid and omitted.
    """
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    if not is_rqfo(f):
        f = to_rqfo(f)
    if not is_sentence(f):
        raise ValueError("definitional clausification expects a sentence")
    colour = RED if side == "L" else BLUE
    infos: dict[GlobalPosition, PositionInfo] = {}
    clauses: list[InputClause] = []
    skolems: list[str] = []

    def definer(sub: Formula, pos: GlobalPosition) -> Lit:
        return Lit(True, definer_name(pos), tuple(Var(v) for v in sorted(free_vars(sub))))

    def emit(lits: Iterable[Lit], pos: GlobalPosition, form: int) -> None:
        c = InputClause(tuple(lits), colour, ClauseTag(pos, form))
        _check_restrictions(c, infos)
        clauses.append(c)

    root = GlobalPosition(side)

    def walk(sub: Formula, pos: GlobalPosition) -> None:
        d = definer(sub, pos)
        t = type(sub)
        kids = rqfo_children(sub)
        kid_pos = tuple(pos.child(i + 1) for i in range(len(kids)))
        kid_defs = [definer(k, p) for k, p in zip(kids, kid_pos)]
        kid_true = [type(k) is Top for k in kids]
        nd = d.complement()
        if t is Top:
            infos[pos] = PositionInfo(pos, "true", d, trivial=True)
        elif t is Bot:
            infos[pos] = PositionInfo(pos, "false", d)
            emit([nd], pos, 2)
        elif t is And:
            infos[pos] = PositionInfo(pos, "and", d, children=kid_pos)
            for i, form in ((0, 3), (1, 4)):
                if not kid_true[i]:
                    emit([nd, kid_defs[i]], pos, form)
        elif t is Or:
            infos[pos] = PositionInfo(pos, "or", d, children=kid_pos)
            if not any(kid_true):
                emit([nd, kid_defs[0], kid_defs[1]], pos, 5)
        elif t is ForallRel:
            g = sub.guard.lit(True)
            infos[pos] = PositionInfo(pos, "forall", d, g, sub.vars, {}, kid_pos)
            if not kid_true[0]:
                emit([nd, g.complement(), kid_defs[0]], pos, 6)
        elif t is ExistsRel:
            xs = tuple(Var(v) for v in sorted(free_vars(sub)))
            sigma: dict[str, Term] = {}
            for i, v in enumerate(sub.vars, start=1):
                name = skolem_name(pos, i)
                skolems.append(name)
                sigma[v] = Fn(name, xs)
            g = sub.guard.lit(True)
            infos[pos] = PositionInfo(pos, "exists", d, g, sub.vars, sigma, kid_pos)
            emit([nd, g.substitute(sigma)], pos, 7)
            if not kid_true[0]:
                emit([nd, kid_defs[0].substitute(sigma)], pos, 8)
        else:
            raise NotRQFOError("not RQFO", sub)
        for k, p in zip(kids, kid_pos):
            walk(k, p)

    d_root = definer(f, root)
    clauses.append(InputClause((d_root,), colour, ClauseTag(root, 1)))
    walk(f, root)
    return ClausalForm(tuple(clauses), frozenset(skolems), colour, f, infos)


def _check_restrictions(c: InputClause, infos: Mapping[GlobalPosition, PositionInfo]) -> None:
    """Argument/variable restrictions of the eight clause forms (variables only)."""
    lits = c.lits
    form = c.tag.form

    def vs(*ls: Lit) -> set[str]:
        acc: set[str] = set()
        for l in ls:
            acc |= l.vars()
        return acc

    ok = True
    if form in (3, 4, 5):
        ok = vs(*lits[1:]) <= vs(lits[0])
    elif form == 6:
        info = infos[c.tag.position]
        ok = vs(lits[2]) <= vs(lits[0], lits[1]) and vs(lits[1], lits[2]) <= vs(lits[0]) | set(info.qvars)
    elif form in (7, 8):
        ok = vs(lits[1]) <= vs(lits[0])
    if not ok:
        raise AssertionError(f"definitional clause {c} violates the restriction of form {form}")


# --------------------------------------------------------------------------
# equality


def _symbols(cf: ClausalForm) -> tuple[dict[str, int], dict[str, int]]:
    preds: dict[str, int] = {}
    funs: dict[str, int] = {}
    for c in cf.clauses:
        for l in c.lits:
            preds[l.pred] = len(l.args)
            for a in l.args:
                stack = [a]
                while stack:
                    s = stack.pop()
                    if type(s) is Fn:
                        funs[s.name] = len(s.args)
                        stack.extend(s.args)
    return preds, funs


def _eq(a: Term, b: Term, positive: bool = True) -> Lit:
    return Lit(positive, EQ, (a, b))


def equality_core_axioms(side: str | None) -> list[InputClause]:
    x, y, z = Var("X"), Var("Y"), Var("Z")
    return [
        InputClause((_eq(x, x),), side, None, "eq-reflexivity"),
        InputClause((_eq(x, y, False), _eq(y, x)), side, None, "eq-symmetry"),
        InputClause((_eq(x, y, False), _eq(y, z, False), _eq(x, z)), side, None, "eq-transitivity"),
    ]


def substitutivity_axioms(preds: Mapping[str, int], funs: Mapping[str, int], side: str | None) -> list[InputClause]:
    out: list[InputClause] = []
    x, y = Var("X"), Var("Y")
    for p in sorted(preds):
        n = preds[p]
        if p == EQ:
            continue
        for i in range(n):
            zs = [Var(f"Z{j + 1}") for j in range(n)]
            a1 = tuple(x if j == i else zs[j] for j in range(n))
            a2 = tuple(y if j == i else zs[j] for j in range(n))
            out.append(InputClause((_eq(x, y, False), Lit(False, p, a1), Lit(True, p, a2)), side, None, f"eq-subst-{p}-{i + 1}"))
    for f in sorted(funs):
        n = funs[f]
        for i in range(n):
            zs = [Var(f"Z{j + 1}") for j in range(n)]
            a1 = tuple(x if j == i else zs[j] for j in range(n))
            a2 = tuple(y if j == i else zs[j] for j in range(n))
            out.append(InputClause((_eq(x, y, False), _eq(Fn(f, a1), Fn(f, a2))), side, None, f"eq-subst-{f}-{i + 1}"))
    return out


def add_equality_axioms(red: ClausalForm, blue: ClausalForm) -> tuple[ClausalForm, ClausalForm]:
    rp, rf = _symbols(red)
    bp, bf = _symbols(blue)
    if EQ not in rp and EQ not in bp:
        return red, blue

    def augment(cf: ClausalForm, preds, funs, side) -> ClausalForm:
        extra = equality_core_axioms(side) + substitutivity_axioms(preds, funs, side)
        return ClausalForm(cf.clauses + tuple(extra), cf.skolem_funs, cf.side, cf.source, cf.positions)

    return augment(red, rp, rf, red.side or RED), augment(blue, bp, bf, blue.side or BLUE)


def equality_axiom_formula(symbols_from: Iterable[Formula]) -> Formula:
    """Conjunction of all equality axioms for the symbols of the given formulas."""
    preds: dict[str, int] = {}
    funs: dict[str, int] = {}
    from .logic import function_arities, predicate_arities

    for f in symbols_from:
        preds.update(predicate_arities(f))
        funs.update(function_arities(f))
    axioms = equality_core_axioms(None) + substitutivity_axioms(preds, funs, None)
    parts = []
    for c in axioms:
        vs = sorted(set().union(*(l.vars() for l in c.lits)))
        body = disj(*(l.as_formula() for l in c.lits))
        for v in reversed(vs):
            body = Forall(v, body)
        parts.append(body)
    return conj(*parts)


def mentions_equality(*fs: Formula) -> bool:
    return any(a.pred == EQ for f in fs for a, _ in atoms_with_polarity(f))


__all__ = [n for n in dir() if not n.startswith("_")]
