"""Proof search producing closed clausal tableaux.

``prove_connection`` is a goal-directed connection-tableau prover with rigid
variables, iterative deepening on the path length and regularity pruning.
``prove_hyper`` builds positive hyper tableaux bottom-up by forward chaining
over ground instances, bounded by term depth.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import _kernels as K
from .clausify import ClausalForm, InputClause, clausify
from .logic import Fn, Formula, Lit, Not, Term, Var, conj, term_depth, term_vars
from .tableau import Node, Tableau


@dataclass(frozen=True)
class ProofBudget:
    max_depth: int = 12
    max_inferences: int = 1_000_000
    timeout_ms: int = 10_000

    def __post_init__(self) -> None:
        if self.max_depth <= 0 or self.max_inferences <= 0 or self.timeout_ms <= 0:
            raise ValueError("budget fields must be positive")


DEFAULT_BUDGET = ProofBudget()


class Exhausted(Exception):
    """No proof found within the budget (not a satisfiability verdict),
    or the search space was exhausted (``saturated``)."""

    def __init__(self, reason: str, saturated: bool = False) -> None:
        super().__init__(reason)
        self.saturated = saturated


class _Meter:
    __slots__ = ("left", "deadline", "count")

    def __init__(self, budget: ProofBudget) -> None:
        self.left = budget.max_inferences
        self.deadline = time.monotonic() + budget.timeout_ms / 1000.0
        self.count = 0

    def tick(self) -> None:
        self.left -= 1
        self.count += 1
        if self.left <= 0:
            raise Exhausted("inference limit reached")
        if not self.count & 1023 and time.monotonic() > self.deadline:
            raise Exhausted("time limit reached")


def _input_clauses(clauses) -> list[InputClause]:
    if isinstance(clauses, ClausalForm):
        return list(clauses.clauses)
    out = []
    for c in clauses:
        out.append(c if isinstance(c, InputClause) else InputClause(tuple(c)))
    return out


def _ordered(cls: list[InputClause]) -> list[int]:
    return sorted(range(len(cls)), key=lambda i: (len(cls[i].lits), i))


def _empty_clause_tableau(cls: list[InputClause]) -> Tableau | None:
    for c in cls:
        if not c.lits:
            return Tableau(Node(), empty_side=c.side)
    return None


# --------------------------------------------------------------------------
# connection tableaux


class _Conn:
    def __init__(self, cls: list[InputClause], meter: _Meter) -> None:
        self.cls = cls
        self.meter = meter
        self.b: dict[str, Term] = {}
        self.trail: list[str] = []
        self.fresh = itertools.count(1)
        self.vars = [sorted(set().union(*(l.vars() for l in c.lits))) if c.lits else [] for c in cls]
        self.index: dict[tuple[bool, str], list[tuple[int, int]]] = {}
        for ci in _ordered(cls):
            for li, l in enumerate(cls[ci].lits):
                self.index.setdefault((l.positive, l.pred), []).append((ci, li))
        self.depth_hit = False

    def copy(self, ci: int) -> tuple:
        c = self.cls[ci].lits
        vs = self.vars[ci]
        if not vs:
            return c
        n = next(self.fresh)
        sigma = {v: Var(f"_v{n}_{i}") for i, v in enumerate(vs)}
        return tuple(l.substitute(sigma) for l in c)

    def same(self, a: Lit, b: Lit) -> bool:
        if a.positive != b.positive or a.pred != b.pred:
            return False
        bd = self.b
        return all(K.resolve(x, bd) == K.resolve(y, bd) for x, y in zip(a.args, b.args))

    def solve_clause(self, lits: Sequence[Lit], path: tuple, limit: int) -> Iterator[list]:
        if not lits:
            yield []
            return
        first, rest = lits[0], lits[1:]
        for p in self.solve_lit(first, path, limit):
            for q in self.solve_clause(rest, path, limit):
                yield [p] + q

    def solve_lit(self, lit: Lit, path: tuple, limit: int) -> Iterator[tuple]:
        b, trail, meter = self.b, self.trail, self.meter
        for p in path:
            if self.same(lit, p):
                return
        # reduction, nearest ancestor first
        for i in range(len(path) - 1, -1, -1):
            p = path[i]
            if p.positive != lit.positive and p.pred == lit.pred:
                meter.tick()
                mark = len(trail)
                if K.unify_args(lit.args, p.args, b, trail):
                    yield ("red", i)
                K.undo(b, trail, mark)
        if len(path) + 1 > limit:
            self.depth_hit = True
            return
        new_path = path + (lit,)
        for ci, li in self.index.get((not lit.positive, lit.pred), ()):
            meter.tick()
            copy = self.copy(ci)
            mark = len(trail)
            if K.unify_args(lit.args, copy[li].args, b, trail):
                rest = copy[:li] + copy[li + 1 :]
                for sub in self.solve_clause(rest, new_path, limit):
                    yield ("ext", ci, copy, li, sub)
            K.undo(b, trail, mark)

    def build(self, ci: int, copy: tuple, proofs: list, skip: int | None = None) -> list[Node]:
        c = self.cls[ci]
        kids: list[Node] = []
        it = iter(proofs)
        for li, l in enumerate(copy):
            n = Node(l.__class__(l.positive, l.pred, tuple(K.resolve(a, self.b) for a in l.args)), c.side, c.tag)
            if li != skip:
                pr = next(it)
                if pr[0] == "ext":
                    _, cj, cp, lj, sub = pr
                    n.set_children(self.build(cj, cp, sub, lj))
            kids.append(n)
        return kids


def prove_connection(
    clauses: ClausalForm | Iterable,
    goal_policy: str = "negative",
    budget: ProofBudget = DEFAULT_BUDGET,
) -> Tableau:
    """Closed connection tableau, or raise :class:`Exhausted`.

    ``goal_policy``: ``negative`` (all-negative clauses; falls back to all
    clauses if there are none), ``blue`` (clauses with side blue), ``all``.
    """
    cls = _input_clauses(clauses)
    if not cls:
        raise Exhausted("no clauses", saturated=True)
    empty = _empty_clause_tableau(cls)
    if empty is not None:
        return empty
    meter = _Meter(budget)
    if goal_policy == "negative":
        starts = [i for i in _ordered(cls) if all(not l.positive for l in cls[i].lits)]
        if not starts:
            raise Exhausted("no negative clause: satisfiable", saturated=True)
    elif goal_policy == "blue":
        starts = [i for i in _ordered(cls) if cls[i].side == "blue"] or _ordered(cls)
    elif goal_policy == "all":
        starts = _ordered(cls)
    else:
        raise ValueError(f"unknown goal policy {goal_policy!r}")
    search = _Conn(cls, meter)
    for limit in range(1, budget.max_depth + 1):
        search.depth_hit = False
        for ci in starts:
            copy = search.copy(ci)
            for proofs in search.solve_clause(copy, (), limit):
                root = Node()
                root.set_children(search.build(ci, copy, proofs))
                return Tableau(root)
            K.undo(search.b, search.trail, 0)
        if not search.depth_hit:
            raise Exhausted("search space exhausted without proof", saturated=True)
    raise Exhausted("depth limit reached")


# --------------------------------------------------------------------------
# positive hyper tableaux


class _Hyper:
    def __init__(self, cls: list[InputClause], meter: _Meter, fresh_constant: str) -> None:
        self.cls = cls
        self.meter = meter
        self.order = _ordered(cls)
        self.negative = [i for i in self.order if all(not l.positive for l in cls[i].lits)]
        self.definite = [i for i in self.order if sum(l.positive for l in cls[i].lits) == 1]
        self.splitting = [i for i in self.order if sum(l.positive for l in cls[i].lits) >= 2]
        funs: dict[str, int] = {}
        for c in cls:
            for l in c.lits:
                for a in l.args:
                    stack = [a]
                    while stack:
                        s = stack.pop()
                        if type(s) is Fn:
                            funs[s.name] = len(s.args)
                            stack.extend(s.args)
        if not any(n == 0 for n in funs.values()):
            funs[fresh_constant] = 0
        self.funs = sorted(funs.items(), key=lambda kv: (kv[1], kv[0]))
        self._universe: dict[int, list[Term]] = {}
        self.bound = 0
        self.bound_hit = False

    def universe(self, depth: int) -> list[Term]:
        if depth in self._universe:
            return self._universe[depth]
        if depth == 0:
            terms = [Fn(f, ()) for f, n in self.funs if n == 0]
        else:
            smaller = self.universe(depth - 1)
            terms = list(smaller)
            seen = set(terms)
            for f, n in self.funs:
                if n == 0:
                    continue
                for args in itertools.product(smaller, repeat=n):
                    t = Fn(f, args)
                    if t not in seen:
                        seen.add(t)
                        terms.append(t)
        self._universe[depth] = terms
        return terms

    def instances(self, ci: int, atoms: dict[str, list[Lit]]) -> Iterator[dict]:
        lits = self.cls[ci].lits
        negs = [l for l in lits if not l.positive]
        free_pos = sorted(set().union(*(l.vars() for l in lits if l.positive)) - set().union(*(l.vars() for l in negs))) if lits else []

        def go(i: int, b: dict) -> Iterator[dict]:
            if i == len(negs):
                if not free_pos:
                    yield b
                    return
                for combo in itertools.product(self.universe(self.bound), repeat=len(free_pos)):
                    self.meter.tick()
                    yield {**b, **dict(zip(free_pos, combo))}
                return
            l = negs[i]
            for a in atoms.get(l.pred, ()):
                self.meter.tick()
                b2 = dict(b)
                if K.match_args(l.args, a.args, b2):
                    yield from go(i + 1, b2)

        yield from go(0, {})

    def within(self, l: Lit) -> bool:
        if any(term_depth(a) > self.bound for a in l.args):
            self.bound_hit = True
            return False
        return True

    def attach(self, node: Node, ci: int, b: dict) -> list[Node]:
        c = self.cls[ci]
        kids = [Node(l.substitute(b), c.side, c.tag) for l in c.lits]
        node.set_children(kids)
        return kids

    def expand(self, node: Node, branch: list[Lit]) -> bool:
        atoms: dict[str, list[Lit]] = {}
        onbranch = set(branch)
        for a in branch:
            atoms.setdefault(a.pred, []).append(a)
        while True:
            self.meter.tick()
            for ci in self.negative:
                for b in self.instances(ci, atoms):
                    self.attach(node, ci, b)
                    return True
            extended = False
            for ci in self.definite:
                for b in self.instances(ci, atoms):
                    head = next(l for l in self.cls[ci].lits if l.positive).substitute(b)
                    if head in onbranch or not self.within(head):
                        continue
                    kids = self.attach(node, ci, b)
                    node = next(k for k in kids if k.lit.positive)
                    onbranch.add(head)
                    atoms.setdefault(head.pred, []).append(head)
                    extended = True
                    break
                if extended:
                    break
            if extended:
                continue
            for ci in self.splitting:
                for b in self.instances(ci, atoms):
                    heads = [l.substitute(b) for l in self.cls[ci].lits if l.positive]
                    if any(h in onbranch for h in heads) or not all(self.within(h) for h in heads):
                        continue
                    kids = self.attach(node, ci, b)
                    base = list(onbranch)
                    for k in kids:
                        if k.lit.positive and not self.expand(k, base + [k.lit]):
                            return False
                    return True
            return False


def _prune_unused(t: Tableau) -> Tableau:
    """Drop extension steps whose positive literal no leaf below uses."""

    def used(h: Node) -> bool:
        want = h.lit.complement()
        return any(m.lit == want for m in h.preorder() if m is not h and not m.children)

    changed = True
    while changed:
        changed = False
        for n in list(t.nodes()):
            for k in n.children:
                if k.children and not used(k):
                    n.set_children(k.children)
                    changed = True
                    break
            if changed:
                break
    return t.renumber()


def prove_hyper(
    clauses: ClausalForm | Iterable,
    budget: ProofBudget = DEFAULT_BUDGET,
    fresh_constant: str = "k",
    prune: bool = True,
) -> Tableau:
    """Closed positive hyper tableau (ground), or raise :class:`Exhausted`."""
    cls = _input_clauses(clauses)
    if not cls:
        raise Exhausted("no clauses", saturated=True)
    empty = _empty_clause_tableau(cls)
    if empty is not None:
        return empty
    meter = _Meter(budget)
    h = _Hyper(cls, meter, fresh_constant)
    start = max([term_depth(a) for c in cls for l in c.lits for a in l.args if not term_vars(a)] + [0])
    for bound in range(start, start + budget.max_depth):
        h.bound = bound
        h.bound_hit = False
        root = Node()
        if h.expand(root, []):
            t = Tableau(root)
            return _prune_unused(t) if prune else t
        if not h.bound_hit:
            raise Exhausted("saturated without contradiction", saturated=True)
    raise Exhausted("term depth limit reached")


# --------------------------------------------------------------------------
# entailment


def refute(f: Formula, budget: ProofBudget = DEFAULT_BUDGET, prover: str = "connection") -> Tableau:
    cf = clausify(f)
    if prover == "hyper":
        return prove_hyper(cf, budget)
    return prove_connection(cf, "negative", budget)


def entails(f: Formula, g: Formula, budget: ProofBudget = DEFAULT_BUDGET, background: Formula | None = None) -> str:
    """``"yes"`` if a refutation of f & ~g (& background) was found, else ``"unknown"``."""
    parts = [f, Not(g)] if background is None else [background, f, Not(g)]
    try:
        refute(conj(*parts), budget)
    except Exhausted:
        return "unknown"
    return "yes"


__all__ = [
    "ProofBudget",
    "DEFAULT_BUDGET",
    "Exhausted",
    "prove_connection",
    "prove_hyper",
    "refute",
    "entails",
]
