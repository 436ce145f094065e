"""Reference semantics used as test oracles.

Everything here is deliberately naive and independent of the prover code:
truth tables, evaluation in explicit finite structures, and a tiny DPLL over
ground clause sets obtained by Herbrand instantiation over a finite universe.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from tabipol.logic import (
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
    Top,
    Var,
    atoms_with_polarity,
)

# --------------------------------------------------------------------------
# truth tables


def prop_atoms(f: Formula) -> set[str]:
    out = set()
    for a, _ in atoms_with_polarity(f):
        assert not a.args, "propositional oracle given a non-nullary atom"
        out.add(a.pred)
    return out


def prop_eval(f: Formula, val: Mapping[str, bool]) -> bool:
    t = type(f)
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Atom:
        return val[f.pred]
    if t is Not:
        return not prop_eval(f.arg, val)
    if t is And:
        return all(prop_eval(a, val) for a in f.args)
    if t is Or:
        return any(prop_eval(a, val) for a in f.args)
    raise TypeError(f"not propositional: {f!r}")


def assignments(names: Iterable[str]):
    names = sorted(names)
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))


def tt_entails(f: Formula, g: Formula, extra: Iterable[str] = ()) -> bool:
    names = prop_atoms(f) | prop_atoms(g) | set(extra)
    return all(prop_eval(g, v) for v in assignments(names) if prop_eval(f, v))


def polar_literals(f: Formula) -> set[tuple[str, bool]]:
    """(predicate, polarity) pairs of atom occurrences, after pushing negations in."""
    return {(a.pred, p) for a, p in atoms_with_polarity(f)}


# --------------------------------------------------------------------------
# finite structures


class Structure:
    def __init__(self, dom: Iterable, preds: Mapping[str, set], funs: Mapping[str, Mapping]) -> None:
        self.dom = list(dom)
        self.preds = dict(preds)
        self.funs = dict(funs)

    def term(self, t, env: Mapping[str, object]):
        if type(t) is Var:
            return env[t.name]
        vals = tuple(self.term(a, env) for a in t.args)
        return self.funs[t.name][vals]

    def holds(self, f: Formula, env: Mapping[str, object] | None = None) -> bool:
        env = env or {}
        t = type(f)
        if t is Top:
            return True
        if t is Bot:
            return False
        if t is Atom:
            return tuple(self.term(a, env) for a in f.args) in self.preds.get(f.pred, set())
        if t is Not:
            return not self.holds(f.arg, env)
        if t is And:
            return all(self.holds(a, env) for a in f.args)
        if t is Or:
            return any(self.holds(a, env) for a in f.args)
        if t is Forall:
            return all(self.holds(f.body, {**env, f.var: d}) for d in self.dom)
        if t is Exists:
            return any(self.holds(f.body, {**env, f.var: d}) for d in self.dom)
        if t is ForallRel or t is ExistsRel:
            hits = []
            for ds in itertools.product(self.dom, repeat=len(f.vars)):
                e = {**env, **dict(zip(f.vars, ds))}
                if self.holds(f.guard, e):
                    hits.append(self.holds(f.body, e))
            return all(hits) if t is ForallRel else any(hits)
        raise TypeError(f"unknown formula {f!r}")


def structures(preds: Mapping[str, int], funs: Mapping[str, int], size: int):
    """Every structure over the domain {0..size-1} for the given signature."""
    dom = list(range(size))
    pred_items = sorted(preds.items())
    fun_items = sorted(funs.items())
    pred_choices = []
    for _, n in pred_items:
        tuples = list(itertools.product(dom, repeat=n))
        pred_choices.append([{t for t, b in zip(tuples, bits) if b} for bits in itertools.product((0, 1), repeat=len(tuples))])
    fun_choices = []
    for _, n in fun_items:
        args = list(itertools.product(dom, repeat=n))
        fun_choices.append([dict(zip(args, vals)) for vals in itertools.product(dom, repeat=len(args))])
    for ps in itertools.product(*pred_choices):
        for fs in itertools.product(*fun_choices):
            yield Structure(dom, {n: s for (n, _), s in zip(pred_items, ps)}, {n: m for (n, _), m in zip(fun_items, fs)})


def finite_countermodel(f: Formula, g: Formula, preds, funs, max_size: int = 2) -> Structure | None:
    """A structure of size <= max_size satisfying f and falsifying g, if any."""
    for n in range(1, max_size + 1):
        for m in structures(preds, funs, n):
            if m.holds(f) and not m.holds(g):
                return m
    return None


# --------------------------------------------------------------------------
# Herbrand instantiation + DPLL (function-free clause sets)


def ground_instances(clauses: Iterable[Iterable[Lit]], universe: Iterable[str]) -> list[frozenset]:
    consts = [Fn(c, ()) for c in sorted(universe)]
    out = []
    for c in clauses:
        c = tuple(c)
        vs = sorted({v for l in c for a in l.args for v in _vars(a)})
        for vals in itertools.product(consts, repeat=len(vs)):
            sigma = dict(zip(vs, vals))
            out.append(frozenset((l.positive, l.pred, tuple(_sub(a, sigma) for a in l.args)) for l in c))
    return out


def _vars(t):
    if type(t) is Var:
        yield t.name
    else:
        for a in t.args:
            yield from _vars(a)


def _sub(t, sigma):
    if type(t) is Var:
        return sigma[t.name]
    return Fn(t.name, tuple(_sub(a, sigma) for a in t.args))


def dpll(clauses: list[frozenset]) -> bool:
    """Satisfiability of ground clauses whose literals are (sign, pred, args) triples."""
    clauses = [c for c in clauses if not any((not s, p, a) in c for s, p, a in c)]
    return _dpll(clauses, {})


def _dpll(clauses, assign) -> bool:
    while True:
        simplified = []
        unit = None
        for c in clauses:
            if any(assign.get((p, a)) == s for s, p, a in c):
                continue
            rest = frozenset(l for l in c if (l[1], l[2]) not in assign)
            if not rest:
                return False
            if len(rest) == 1 and unit is None:
                unit = next(iter(rest))
            simplified.append(rest)
        clauses = simplified
        if not clauses:
            return True
        if unit is None:
            break
        assign = {**assign, (unit[1], unit[2]): unit[0]}
    s, p, a = next(iter(clauses[0]))
    return _dpll(clauses, {**assign, (p, a): s}) or _dpll(clauses, {**assign, (p, a): not s})
