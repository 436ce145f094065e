"""First-order syntax objects and the symbol/substitution calculus.

Terms and literals are hand-rolled slotted classes with a cached hash because
the provers hash and compare them in their inner loops.  Formulas are frozen
dataclasses; ``And``/``Or`` flatten on construction so that structural
equality is the only equality the rest of the package needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Union


# --------------------------------------------------------------------------
# terms


class Var:
    __slots__ = ("name", "_hash")

    def __init__(self, name: str) -> None:
        self.name = name
        self._hash = hash(("$v", name))

    def __eq__(self, other: object) -> bool:
        return type(other) is Var and other.name == self.name  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Var({self.name!r})"

    def __str__(self) -> str:
        return self.name


class Fn:
    """Compound term; a constant is an ``Fn`` with no arguments."""

    __slots__ = ("name", "args", "_hash")

    def __init__(self, name: str, args: Iterable["Term"] = ()) -> None:
        self.name = name
        self.args = tuple(args)
        self._hash = hash((name, self.args))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            type(other) is Fn
            and self._hash == other._hash  # type: ignore[attr-defined]
            and self.name == other.name  # type: ignore[attr-defined]
            and self.args == other.args  # type: ignore[attr-defined]
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.args:
            return f"Fn({self.name!r})"
        return f"Fn({self.name!r}, {list(self.args)!r})"

    def __str__(self) -> str:
        return term_str(self)


Term = Union[Var, Fn]


def const(name: str) -> Fn:
    return Fn(name, ())


def term_str(t: Term) -> str:
    if type(t) is Var:
        return t.name
    if not t.args:
        return t.name
    return f"{t.name}({','.join(term_str(a) for a in t.args)})"


def term_vars(t: Term, acc: set[str] | None = None) -> set[str]:
    acc = set() if acc is None else acc
    stack = [t]
    while stack:
        s = stack.pop()
        if type(s) is Var:
            acc.add(s.name)
        else:
            stack.extend(s.args)
    return acc


def is_ground_term(t: Term) -> bool:
    if type(t) is Var:
        return False
    return all(is_ground_term(a) for a in t.args)


def term_size(t: Term) -> int:
    if type(t) is Var:
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_depth(t: Term) -> int:
    if type(t) is Var or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if type(t) is Fn:
        for a in t.args:
            yield from subterms(a)


def term_funs(t: Term, acc: set[str]) -> None:
    if type(t) is Fn:
        acc.add(t.name)
        for a in t.args:
            term_funs(a, acc)


def subst_term(t: Term, sigma: Mapping[str, Term]) -> Term:
    if type(t) is Var:
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return Fn(t.name, tuple(subst_term(a, sigma) for a in t.args))


# --------------------------------------------------------------------------
# literals and clauses


class Lit:
    __slots__ = ("positive", "pred", "args", "_hash")

    def __init__(self, positive: bool, pred: str, args: Iterable[Term] = ()) -> None:
        self.positive = positive
        self.pred = pred
        self.args = tuple(args)
        self._hash = hash((positive, pred, self.args))

    def complement(self) -> "Lit":
        return Lit(not self.positive, self.pred, self.args)

    def atom(self) -> "Atom":
        return Atom(self.pred, self.args)

    def as_formula(self) -> "Formula":
        a = Atom(self.pred, self.args)
        return a if self.positive else Not(a)

    def substitute(self, sigma: Mapping[str, Term]) -> "Lit":
        return Lit(self.positive, self.pred, tuple(subst_term(a, sigma) for a in self.args))

    def vars(self) -> set[str]:
        acc: set[str] = set()
        for a in self.args:
            term_vars(a, acc)
        return acc

    def is_ground(self) -> bool:
        return all(is_ground_term(a) for a in self.args)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            type(other) is Lit
            and self._hash == other._hash  # type: ignore[attr-defined]
            and self.positive == other.positive  # type: ignore[attr-defined]
            and self.pred == other.pred  # type: ignore[attr-defined]
            and self.args == other.args  # type: ignore[attr-defined]
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Lit({str(self)!r})"

    def __str__(self) -> str:
        body = self.pred if not self.args else f"{self.pred}({','.join(term_str(a) for a in self.args)})"
        return body if self.positive else "~" + body


def pos(pred: str, *args: Term) -> Lit:
    return Lit(True, pred, args)


def neg(pred: str, *args: Term) -> Lit:
    return Lit(False, pred, args)


Clause = tuple  # tuple[Lit, ...]; the empty tuple is falsity


def clause_vars(c: Iterable[Lit]) -> set[str]:
    acc: set[str] = set()
    for lit in c:
        for a in lit.args:
            term_vars(a, acc)
    return acc


def clause_str(c: Iterable[Lit]) -> str:
    lits = [str(l) for l in c]
    return " | ".join(lits) if lits else "false"


# --------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ()

    def __str__(self) -> str:  # pragma: no cover - delegated
        from .syntax import print_formula

        return print_formula(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "TRUE"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self) -> str:
        return "FALSE"


TRUE = Top()
FALSE = Bot()


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple = ()

    def lit(self, positive: bool = True) -> Lit:
        return Lit(positive, self.pred, self.args)

    def __repr__(self) -> str:
        return f"Atom({str(self.lit())!r})"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


def _flatten(kind: type, items: Iterable[Formula]) -> tuple:
    out: list[Formula] = []
    for f in items:
        if type(f) is kind:
            out.extend(f.args)  # type: ignore[attr-defined]
        else:
            out.append(f)
    return tuple(out)


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", _flatten(And, self.args))


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", _flatten(Or, self.args))


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallRel(Formula):
    """``forall vars (~guard | body)``; ``vars`` is kept sorted."""

    vars: tuple
    guard: Atom
    body: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", tuple(sorted(set(self.vars))))
        _check_guard(self.vars, self.guard)


@dataclass(frozen=True)
class ExistsRel(Formula):
    """``exists vars (guard & body)``."""

    vars: tuple
    guard: Atom
    body: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", tuple(sorted(set(self.vars))))
        _check_guard(self.vars, self.guard)


def _check_guard(vs: tuple, guard: Atom) -> None:
    gv: set[str] = set()
    for a in guard.args:
        term_vars(a, gv)
    missing = [v for v in vs if v not in gv]
    if missing:
        raise ValueError(f"relativized quantifier variables {missing} missing from guard")


# constructors with the usual conveniences


def conj(*fs: Formula) -> Formula:
    items = _flatten(And, fs)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(*fs: Formula) -> Formula:
    items = _flatten(Or, fs)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


def forall(vs: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Forall(v, body)
    return body


def exists(vs: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Exists(v, body)
    return body


def lit_formula(l: Lit) -> Formula:
    return l.as_formula()


def clause_formula(c: Iterable[Lit]) -> Formula:
    return disj(*(l.as_formula() for l in c))


def simplify_constants(f: Formula) -> Formula:
    """True/false absorption through And/Or/Not; nothing else."""
    t = type(f)
    if t is And:
        items = []
        for a in f.args:
            s = simplify_constants(a)
            if s == FALSE:
                return FALSE
            if s != TRUE:
                items.append(s)
        return conj(*items)
    if t is Or:
        items = []
        for a in f.args:
            s = simplify_constants(a)
            if s == TRUE:
                return TRUE
            if s != FALSE:
                items.append(s)
        return disj(*items)
    if t is Not:
        s = simplify_constants(f.arg)
        if s == TRUE:
            return FALSE
        if s == FALSE:
            return TRUE
        return Not(s)
    if t is Forall or t is Exists:
        b = simplify_constants(f.body)
        return b if b in (TRUE, FALSE) else t(f.var, b)
    if t is ForallRel or t is ExistsRel:
        return t(f.vars, f.guard, simplify_constants(f.body))
    return f


# --------------------------------------------------------------------------
# traversal helpers


def atoms_with_polarity(f: Formula, positive: bool = True) -> Iterator[tuple[Atom, bool]]:
    t = type(f)
    if t is Atom:
        yield f, positive
    elif t is Not:
        yield from atoms_with_polarity(f.arg, not positive)
    elif t is And or t is Or:
        for a in f.args:
            yield from atoms_with_polarity(a, positive)
    elif t is Forall or t is Exists:
        yield from atoms_with_polarity(f.body, positive)
    elif t is ForallRel:
        yield f.guard, not positive
        yield from atoms_with_polarity(f.body, positive)
    elif t is ExistsRel:
        yield f.guard, positive
        yield from atoms_with_polarity(f.body, positive)


def free_vars(e: Term | Lit | Formula) -> set[str]:
    if isinstance(e, (Var, Fn)):
        return term_vars(e)
    if isinstance(e, Lit):
        return e.vars()
    return _fv(e)


def _fv(f: Formula) -> set[str]:
    t = type(f)
    if t is Atom:
        acc: set[str] = set()
        for a in f.args:
            term_vars(a, acc)
        return acc
    if t is Not:
        return _fv(f.arg)
    if t is And or t is Or:
        acc = set()
        for a in f.args:
            acc |= _fv(a)
        return acc
    if t is Forall or t is Exists:
        return _fv(f.body) - {f.var}
    if t is ForallRel or t is ExistsRel:
        return (_fv(f.guard) | _fv(f.body)) - set(f.vars)
    return set()


def is_sentence(f: Formula) -> bool:
    return not _fv(f)


@dataclass(frozen=True)
class Vocabulary:
    preds: frozenset  # of (pred, "+"/"-")
    funs: frozenset
    consts: frozenset
    pargs: frozenset


def vocabulary(f: Formula) -> Vocabulary:
    preds: set[tuple[str, str]] = set()
    funs: set[str] = set()
    consts: set[str] = set()
    pargs: set[Term] = set()
    for atom, polarity in atoms_with_polarity(f):
        preds.add((atom.pred, "+" if polarity else "-"))
        for a in atom.args:
            pargs.add(a)
            for s in subterms(a):
                if type(s) is Fn:
                    funs.add(s.name)
                    if not s.args:
                        consts.add(s.name)
    return Vocabulary(frozenset(preds), frozenset(funs), frozenset(consts), frozenset(pargs))


def clauses_vocabulary(clauses: Iterable[Iterable[Lit]]) -> Vocabulary:
    return vocabulary(conj(*(clause_formula(c) for c in clauses)) if clauses else TRUE)


def predicate_arities(f: Formula) -> dict[str, int]:
    return {a.pred: len(a.args) for a, _ in atoms_with_polarity(f)}


def function_arities(f: Formula) -> dict[str, int]:
    out: dict[str, int] = {}
    for atom, _ in atoms_with_polarity(f):
        for a in atom.args:
            for s in subterms(a):
                if type(s) is Fn:
                    out[s.name] = len(s.args)
    return out


def garg(f: Formula | Iterable[Lit]) -> set[Term]:
    if isinstance(f, Formula):
        return {t for t in vocabulary(f).pargs if is_ground_term(t)}
    return {a for l in f for a in l.args if is_ground_term(a)}


# --------------------------------------------------------------------------
# substitutions


class CaptureError(ValueError):
    pass


def map_atoms(f: Formula, fn: Callable[[Atom], Formula | Atom]) -> Formula:
    t = type(f)
    if t is Atom:
        return fn(f)
    if t is Not:
        return Not(map_atoms(f.arg, fn))
    if t is And:
        return And(tuple(map_atoms(a, fn) for a in f.args))
    if t is Or:
        return Or(tuple(map_atoms(a, fn) for a in f.args))
    if t is Forall or t is Exists:
        return t(f.var, map_atoms(f.body, fn))
    if t is ForallRel or t is ExistsRel:
        g = fn(f.guard)
        assert type(g) is Atom
        return t(f.vars, g, map_atoms(f.body, fn))
    return f


def _bound_vars(f: Formula) -> set[str]:
    t = type(f)
    if t is Not:
        return _bound_vars(f.arg)
    if t is And or t is Or:
        out: set[str] = set()
        for a in f.args:
            out |= _bound_vars(a)
        return out
    if t is Forall or t is Exists:
        return {f.var} | _bound_vars(f.body)
    if t is ForallRel or t is ExistsRel:
        return set(f.vars) | _bound_vars(f.body)
    return set()


def apply_subst(e, sigma: Mapping[str, Term]):
    """Simultaneous substitution on a term, literal, clause or formula."""
    sigma = {k: v for k, v in sigma.items() if not (type(v) is Var and v.name == k)}
    if not sigma:
        return e
    if isinstance(e, (Var, Fn)):
        return subst_term(e, sigma)
    if isinstance(e, Lit):
        return e.substitute(sigma)
    if isinstance(e, tuple):
        return tuple(l.substitute(sigma) for l in e)
    return _subst_formula(e, sigma)


def _subst_formula(f: Formula, sigma: Mapping[str, Term]) -> Formula:
    t = type(f)
    if t is Atom:
        return Atom(f.pred, tuple(subst_term(a, sigma) for a in f.args))
    if t is Not:
        return Not(_subst_formula(f.arg, sigma))
    if t is And or t is Or:
        return t(tuple(_subst_formula(a, sigma) for a in f.args))
    if t in (Forall, Exists, ForallRel, ExistsRel):
        bound = {f.var} if t in (Forall, Exists) else set(f.vars)
        inner = {k: v for k, v in sigma.items() if k not in bound}
        introduced: set[str] = set()
        for k, v in inner.items():
            if k in _fv(f):
                term_vars(v, introduced)
        if introduced & bound:
            raise CaptureError(f"capture of {sorted(introduced & bound)}")
        if t in (Forall, Exists):
            return t(f.var, _subst_formula(f.body, inner))
        return t(f.vars, _subst_formula(f.guard, inner), _subst_formula(f.body, inner))
    return f


def compose(s1: Mapping[str, Term], s2: Mapping[str, Term]) -> dict[str, Term]:
    """Juxtaposition ``s1 s2``: apply s1 first, then s2."""
    out = {k: subst_term(v, s2) for k, v in s1.items()}
    for k, v in s2.items():
        out.setdefault(k, v)
    return {k: v for k, v in out.items() if not (type(v) is Var and v.name == k)}


def restrict(sigma: Mapping[str, Term], xs: Iterable[str]) -> dict[str, Term]:
    xs = set(xs)
    return {k: v for k, v in sigma.items() if k in xs}


def _inverse_map(sigma: Mapping[str, Term]) -> dict[Term, Var]:
    inv: dict[Term, Var] = {}
    for k, v in sigma.items():
        if type(v) is Var and v.name == k:
            continue
        if v in inv:
            raise ValueError("inverse substitution requires an injective substitution")
        inv[v] = Var(k)
    return inv


def _inv_term(t: Term, inv: Mapping[Term, Var]) -> Term:
    hit = inv.get(t)
    if hit is not None:
        return hit
    if type(t) is Var or not t.args:
        return t
    return Fn(t.name, tuple(_inv_term(a, inv) for a in t.args))


def inverse_subst(e, sigma: Mapping[str, Term]):
    """Replace range-term occurrences not nested in another range-term occurrence."""
    inv = _inverse_map(sigma)
    if not inv:
        return e
    if isinstance(e, (Var, Fn)):
        return _inv_term(e, inv)
    if isinstance(e, Lit):
        return Lit(e.positive, e.pred, tuple(_inv_term(a, inv) for a in e.args))
    return map_atoms(e, lambda a: Atom(a.pred, tuple(_inv_term(x, inv) for x in a.args)))


def top_inverse_subst(f: Formula, sigma: Mapping[str, Term]) -> Formula:
    """Replace only occurrences that are direct arguments of atoms."""
    inv = _inverse_map(sigma)
    if not inv:
        return f
    for t in inv:
        if not is_ground_term(t):
            raise ValueError(f"top-level inverse substitution needs ground range terms, got {t}")
    ga = garg(f)
    if not set(inv) <= ga:
        raise ValueError("range of substitution must lie within garg of the formula")
    clash = set(sigma) & (_fv(f) | _bound_vars(f))
    if clash:
        raise ValueError(f"domain variables {sorted(clash)} are not fresh")
    return map_atoms(f, lambda a: Atom(a.pred, tuple(inv.get(x, x) for x in a.args)))


# --------------------------------------------------------------------------
# renaming, alpha-equivalence


class FreshNames:
    """Monotone counter producing names with a reserved prefix."""

    def __init__(self, prefix: str = "_v", avoid: Iterable[str] = (), start: int = 1) -> None:
        self.prefix = prefix
        self.avoid = set(avoid)
        self._counter = itertools.count(start)

    def __call__(self) -> str:
        while True:
            name = f"{self.prefix}{next(self._counter)}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def rename_bound(f: Formula, fresh: FreshNames) -> Formula:
    """Give every binder a fresh variable name (no shadowing afterwards)."""

    def go(g: Formula, env: dict[str, Term]) -> Formula:
        t = type(g)
        if t is Atom:
            return Atom(g.pred, tuple(subst_term(a, env) for a in g.args))
        if t is Not:
            return Not(go(g.arg, env))
        if t is And or t is Or:
            return t(tuple(go(a, env) for a in g.args))
        if t is Forall or t is Exists:
            n = fresh()
            return t(n, go(g.body, {**env, g.var: Var(n)}))
        if t is ForallRel or t is ExistsRel:
            names = {v: fresh() for v in g.vars}
            env2 = {**env, **{v: Var(n) for v, n in names.items()}}
            return t(tuple(names.values()), go(g.guard, env2), go(g.body, env2))
        return g

    return go(f, {})


def alpha_equivalent(a: Formula, b: Formula) -> bool:
    def term_eq(s: Term, t: Term, env: dict[str, str]) -> bool:
        if type(s) is Var:
            return type(t) is Var and env.get(s.name, "#free:" + s.name) == env.get("#r:" + t.name, "#free:" + t.name)
        return type(t) is Fn and s.name == t.name and len(s.args) == len(t.args) and all(
            term_eq(x, y, env) for x, y in zip(s.args, t.args)
        )

    counter = itertools.count()

    def bind(env: dict[str, str], lv: Iterable[str], rv: Iterable[str]) -> dict[str, str]:
        env = dict(env)
        for x, y in zip(lv, rv):
            tag = f"#b{next(counter)}"
            env[x] = tag
            env["#r:" + y] = tag
        return env

    def go(f: Formula, g: Formula, env: dict[str, str]) -> bool:
        if type(f) is not type(g):
            return False
        t = type(f)
        if t is Atom:
            return f.pred == g.pred and len(f.args) == len(g.args) and all(
                term_eq(x, y, env) for x, y in zip(f.args, g.args)
            )
        if t is Not:
            return go(f.arg, g.arg, env)
        if t is And or t is Or:
            return len(f.args) == len(g.args) and all(go(x, y, env) for x, y in zip(f.args, g.args))
        if t is Forall or t is Exists:
            return go(f.body, g.body, bind(env, [f.var], [g.var]))
        if t is ForallRel or t is ExistsRel:
            if len(f.vars) != len(g.vars):
                return False
            # variable sets are unordered: try every bijection (sets are tiny)
            for perm in itertools.permutations(g.vars):
                e2 = bind(env, f.vars, perm)
                if go(f.guard, g.guard, e2) and go(f.body, g.body, e2):
                    return True
            return False
        return f == g

    return go(a, b, {})


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form; relativized quantifiers are unfolded."""
    t = type(f)
    if t is Top:
        return TRUE if positive else FALSE
    if t is Bot:
        return FALSE if positive else TRUE
    if t is Atom:
        return f if positive else Not(f)
    if t is Not:
        return nnf(f.arg, not positive)
    if t is And:
        parts = tuple(nnf(a, positive) for a in f.args)
        return And(parts) if positive else Or(parts)
    if t is Or:
        parts = tuple(nnf(a, positive) for a in f.args)
        return Or(parts) if positive else And(parts)
    if t is Forall:
        return (Forall if positive else Exists)(f.var, nnf(f.body, positive))
    if t is Exists:
        return (Exists if positive else Forall)(f.var, nnf(f.body, positive))
    if t is ForallRel:
        return nnf(forall(f.vars, Or((Not(f.guard), f.body))), positive)
    if t is ExistsRel:
        return nnf(exists(f.vars, And((f.guard, f.body))), positive)
    raise TypeError(f"not a formula: {f!r}")


def unfold_relativized(f: Formula) -> Formula:
    """Rewrite ForallRel/ExistsRel into plain quantifiers."""
    t = type(f)
    if t is Not:
        return Not(unfold_relativized(f.arg))
    if t is And or t is Or:
        return t(tuple(unfold_relativized(a) for a in f.args))
    if t is Forall or t is Exists:
        return t(f.var, unfold_relativized(f.body))
    if t is ForallRel:
        return forall(f.vars, Or((Not(f.guard), unfold_relativized(f.body))))
    if t is ExistsRel:
        return exists(f.vars, And((f.guard, unfold_relativized(f.body))))
    return f


def formula_size(f: Formula) -> int:
    t = type(f)
    if t is Not:
        return 1 + formula_size(f.arg)
    if t is And or t is Or:
        return 1 + sum(formula_size(a) for a in f.args)
    if t is Forall or t is Exists:
        return 1 + formula_size(f.body)
    if t is ForallRel or t is ExistsRel:
        return 2 + formula_size(f.body)
    return 1


__all__ = [name for name in dir() if not name.startswith("_")]
