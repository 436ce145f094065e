"""Clausal tableaux: the tree, its structural properties, targets, sides, grounding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from . import _kernels as K
from .clausify import BLUE, RED, ClausalForm, ClauseTag, InputClause
from .logic import Fn, Lit, Term, Var, clause_str, subst_term, term_vars

SIDES = (RED, BLUE)


class TableauError(ValueError):
    pass


class Node:
    __slots__ = ("id", "lit", "side", "tag", "children", "parent", "tgt")

    def __init__(
        self,
        lit: Lit | None = None,
        side: str | None = None,
        tag: ClauseTag | None = None,
        children: Iterable["Node"] = (),
        id: int = -1,
    ) -> None:
        self.id = id
        self.lit = lit
        self.side = side
        self.tag = tag
        self.children: list[Node] = []
        self.parent: Node | None = None
        self.tgt: Node | None = None
        for c in children:
            self.add(c)

    def add(self, child: "Node") -> "Node":
        child.parent = self
        self.children.append(child)
        return child

    def set_children(self, kids: Iterable["Node"]) -> None:
        self.children = list(kids)
        for k in self.children:
            k.parent = self

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_root(self) -> bool:
        return self.parent is None

    def ancestors(self) -> Iterator["Node"]:
        """Proper ancestors, nearest first (the root included)."""
        n = self.parent
        while n is not None:
            yield n
            n = n.parent

    def labelled_ancestors(self) -> Iterator["Node"]:
        for a in self.ancestors():
            if a.lit is not None:
                yield a

    def depth(self) -> int:
        return sum(1 for _ in self.ancestors())

    def preorder(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def clause(self) -> tuple:
        return tuple(c.lit for c in self.children)

    def __repr__(self) -> str:
        return f"Node(#{self.id} {self.lit} {self.side or ''})"


class Tableau:
    """Ordered tree with an unlabelled root.

    Public operations treat tableaux as values and return fresh copies;
    mutation happens only on private copies inside this package.
    ``empty_side`` records the side of the empty clause when the root has no
    children (a refutation by an input empty clause).
    """

    __slots__ = ("root", "empty_side")

    def __init__(self, root: Node | None = None, empty_side: str | None = None, number: bool = True) -> None:
        self.root = root if root is not None else Node()
        self.empty_side = empty_side
        if number:
            self.renumber()

    # --- traversal
    def nodes(self) -> Iterator[Node]:
        return self.root.preorder()

    def leaves(self) -> list[Node]:
        return [n for n in self.nodes() if n.is_leaf and not n.is_root]

    def inner(self) -> list[Node]:
        return [n for n in self.nodes() if n.children]

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def find(self, node_id: int) -> Node:
        for n in self.nodes():
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def clauses(self) -> list[tuple]:
        return [n.clause() for n in self.inner()]

    def max_id(self) -> int:
        return max(n.id for n in self.nodes())

    def renumber(self) -> "Tableau":
        for i, n in enumerate(self.nodes()):
            n.id = i
        return self

    def copy(self) -> "Tableau":
        mapping: dict[int, Node] = {}

        def cp(n: Node) -> Node:
            m = Node(n.lit, n.side, n.tag, id=n.id)
            mapping[id(n)] = m
            m.set_children(cp(c) for c in n.children)
            return m

        root = cp(self.root)
        for n in self.nodes():
            if n.tgt is not None:
                mapping[id(n)].tgt = mapping.get(id(n.tgt))
        return Tableau(root, self.empty_side, number=False)

    def __repr__(self) -> str:
        return f"Tableau({self.size()} nodes)"

    def __str__(self) -> str:
        return render(self)


def clause_of(n: Node) -> tuple:
    if not n.children:
        raise TableauError(f"node {n.id} is a leaf and has no clause")
    return n.clause()


def render(t: Tableau) -> str:
    """Indented text rendering, one node per line."""
    lines = []

    def go(n: Node, indent: int) -> None:
        if n.is_root:
            lines.append("*")
        else:
            side = f" [{n.side}]" if n.side else ""
            tag = f" {{{n.tag}}}" if n.tag else ""
            lines.append("  " * indent + f"{n.lit}{side}{tag}")
        for c in n.children:
            go(c, indent + 1)

    go(t.root, 0)
    return "\n".join(lines)


# --------------------------------------------------------------------------
# closedness and targets


def complementary_ancestor(n: Node) -> Node | None:
    if n.lit is None:
        return None
    want = n.lit.complement()
    for a in n.labelled_ancestors():
        if a.lit == want:
            return a
    return None


def is_closed_node(n: Node) -> bool:
    return complementary_ancestor(n) is not None


def open_leaves(t: Tableau) -> list[Node]:
    return [l for l in t.leaves() if not is_closed_node(l)]


def is_closed(t: Tableau) -> bool:
    return not open_leaves(t)


def assign_targets(t: Tableau) -> Tableau:
    """Copy with every closed leaf pointing at its nearest complementary ancestor."""
    out = t.copy()
    for n in out.nodes():
        n.tgt = complementary_ancestor(n) if n.is_leaf and not n.is_root else None
    return out


def target_of(n: Node) -> Node:
    if n.tgt is not None:
        return n.tgt
    a = complementary_ancestor(n)
    if a is None:
        raise TableauError(f"node {n.id} ({n.lit}) is open")
    return a


# --------------------------------------------------------------------------
# diagnostics


@dataclass
class TableauDiagnostics:
    results: dict = field(default_factory=dict)  # property -> tuple of offending ids
    notes: dict = field(default_factory=dict)

    def record(self, prop: str, offenders: Iterable[int], note: str = "") -> "TableauDiagnostics":
        self.results[prop] = tuple(sorted(set(offenders)))
        if note:
            self.notes[prop] = note
        return self

    @property
    def ok(self) -> bool:
        return all(not v for v in self.results.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.results.items() if v]

    def passed(self, prop: str) -> bool:
        return not self.results.get(prop, ())

    def merge(self, other: "TableauDiagnostics") -> "TableauDiagnostics":
        self.results.update(other.results)
        self.notes.update(other.notes)
        return self

    def __str__(self) -> str:
        rows = []
        for k, v in self.results.items():
            status = "PASS" if not v else "FAIL"
            extra = f" nodes {list(v)}" if v else ""
            note = f" ({self.notes[k]})" if k in self.notes else ""
            rows.append(f"{k}: {status}{extra}{note}")
        return "\n".join(rows)


def check_closed(t: Tableau) -> TableauDiagnostics:
    return TableauDiagnostics().record("closed", (n.id for n in open_leaves(t)))


def check_regular(t: Tableau) -> TableauDiagnostics:
    bad = []
    for n in t.nodes():
        if n.lit is not None and any(a.lit == n.lit for a in n.labelled_ancestors()):
            bad.append(n.id)
    return TableauDiagnostics().record("regular", bad)


def check_leaf_only(t: Tableau, s: Iterable[Lit]) -> TableauDiagnostics:
    s = set(s)
    return TableauDiagnostics().record("leaf-only", (n.id for n in t.nodes() if n.children and n.lit in s))


def check_eager(t: Tableau) -> TableauDiagnostics:
    """No closed node is a descendant of another closed node."""
    bad = []

    def go(n: Node, closed_above: bool) -> None:
        c = is_closed_node(n)
        if c and closed_above:
            bad.append(n.id)
        for k in n.children:
            go(k, closed_above or c)

    go(t.root, False)
    return TableauDiagnostics().record("eager", bad)


def check_contiguous(t: Tableau, pairs: Iterable[frozenset]) -> TableauDiagnostics:
    bad = []
    pairs = [tuple(p) for p in pairs]
    partner: dict[Lit, set[Lit]] = {}
    for a, b in pairs:
        partner.setdefault(a, set()).add(b)
        partner.setdefault(b, set()).add(a)
    for n in t.nodes():
        others = partner.get(n.lit) if n.lit is not None else None
        if not others:
            continue
        for a in n.labelled_ancestors():
            if a.lit in others and a is not n.parent:
                bad.append(n.id)
    return TableauDiagnostics().record("contiguous", bad)


def check_ground(t: Tableau) -> TableauDiagnostics:
    return TableauDiagnostics().record("ground", (n.id for n in t.nodes() if n.lit is not None and not n.lit.is_ground()))


def check_two_sided(t: Tableau) -> TableauDiagnostics:
    bad = []
    for n in t.inner():
        sides = {c.side for c in n.children}
        if len(sides) != 1 or None in sides or not sides <= set(SIDES):
            bad.extend(c.id for c in n.children)
    return TableauDiagnostics().record("two-sided", bad)


def check_targets(t: Tableau) -> TableauDiagnostics:
    bad = []
    for n in t.nodes():
        if n.tgt is not None:
            if n.tgt not in list(n.ancestors()) or n.tgt.lit != n.lit.complement():
                bad.append(n.id)
    return TableauDiagnostics().record("targets", bad)


def is_positive_hyper(t: Tableau) -> bool:
    if not t.root.children:
        return True
    negs = {n.lit for n in t.nodes() if n.lit is not None and not n.lit.positive}
    return check_regular(t).ok and check_leaf_only(t, negs).ok


# --------------------------------------------------------------------------
# clause instances, validity, sides


def _match_clause(pattern: Sequence[Lit], lits: Sequence[Lit]) -> bool:
    if len(pattern) != len(lits):
        return False
    b: dict = {}
    for p, l in zip(pattern, lits):
        if p.positive != l.positive or p.pred != l.pred or not K.match_args(p.args, l.args, b):
            return False
    return True


def is_instance(lits: Sequence[Lit], pattern: Sequence[Lit]) -> bool:
    """Is the clause ``lits`` an instance of ``pattern``? Order-sensitive first,
    then any order of the pattern's literals (short clauses only)."""
    if _match_clause(pattern, lits):
        return True
    if len(pattern) != len(lits) or len(pattern) > 6:
        return False
    for perm in itertools.permutations(pattern):
        if _match_clause(perm, lits):
            return True
    return False


def clause_index(cf: Iterable[InputClause]) -> dict:
    """Bucket input clauses by their multiset of (sign, predicate, arity)."""
    idx: dict = {}
    for c in cf:
        key = tuple(sorted((l.positive, l.pred, len(l.args)) for l in c.lits))
        idx.setdefault(key, []).append(c)
    return idx


def _key(lits: Sequence[Lit]):
    return tuple(sorted((l.positive, l.pred, len(l.args)) for l in lits))


def matching_clauses(lits: Sequence[Lit], idx: Mapping) -> list[InputClause]:
    return [c for c in idx.get(_key(lits), ()) if is_instance(lits, c.lits)]


def check_valid(t: Tableau, clauses: Iterable[InputClause]) -> TableauDiagnostics:
    """Structural validity: every clause is an instance of an input clause, targets ok, closed."""
    idx = clause_index(clauses)
    bad = [n.id for n in t.inner() if not matching_clauses(n.clause(), idx)]
    d = TableauDiagnostics().record("clause-instances", bad)
    d.merge(check_targets(t))
    d.merge(check_closed(t))
    return d


def assign_sides(
    t: Tableau,
    red: ClausalForm | Iterable[InputClause],
    blue: ClausalForm | Iterable[InputClause],
    policy: str = "prefer-red",
) -> Tableau:
    """Colour every clause of ``t`` by finding input clauses it instantiates.

    Policies: ``prefer-red``/``prefer-blue`` pick a side when the clause
    matches both inputs; ``keep`` leaves existing side labels untouched when
    they are consistent with a match.  The matched clause's tag is copied.
    """
    red_cl = list(red.clauses if isinstance(red, ClausalForm) else red)
    blue_cl = list(blue.clauses if isinstance(blue, ClausalForm) else blue)
    ridx, bidx = clause_index(red_cl), clause_index(blue_cl)
    out = t.copy()
    unmatched = []
    for n in out.inner():
        lits = n.clause()
        rm, bm = matching_clauses(lits, ridx), matching_clauses(lits, bidx)
        if not rm and not bm:
            unmatched.append(clause_str(lits))
            continue
        current = n.children[0].side
        if policy == "keep" and current in SIDES and (rm if current == RED else bm):
            side = current
        elif rm and bm:
            side = BLUE if policy == "prefer-blue" else RED
        else:
            side = RED if rm else BLUE
        chosen = (rm if side == RED else bm)[0]
        for c in n.children:
            c.side = side
            c.tag = chosen.tag
    if unmatched:
        raise TableauError("clauses not instances of any input clause: " + "; ".join(unmatched))
    if not out.root.children and out.empty_side is None:
        out.empty_side = RED if any(not c.lits for c in red_cl) else (BLUE if any(not c.lits for c in blue_cl) else None)
    return out


# --------------------------------------------------------------------------
# grounding


def tableau_vars(t: Tableau) -> set[str]:
    acc: set[str] = set()
    for n in t.nodes():
        if n.lit is not None:
            for a in n.lit.args:
                term_vars(a, acc)
    return acc


def ground_tableau(t: Tableau, k: str | Term = "k", strategy: str | Mapping[str, Term] = "uniform") -> Tableau:
    """Instantiate remaining rigid variables.

    ``strategy`` is ``"uniform"`` (every variable to ``k``) or a mapping
    from variable names to ground terms, with unlisted variables sent to ``k``.
    """
    kt = Fn(k, ()) if isinstance(k, str) else k
    vs = tableau_vars(t)
    if not vs:
        return t.copy()
    explicit = {} if strategy == "uniform" else dict(strategy)  # type: ignore[arg-type]
    sigma = {v: explicit.get(v, kt) for v in vs}
    out = t.copy()
    for n in out.nodes():
        if n.lit is not None:
            n.lit = n.lit.substitute(sigma)
    return out


# --------------------------------------------------------------------------
# misc helpers


def branch_lits(n: Node, side: str | None = None) -> list[Lit]:
    """Labels on the branch to ``n`` (``n`` included), optionally one side only."""
    out = []
    m: Node | None = n
    while m is not None:
        if m.lit is not None and (side is None or m.side == side):
            out.append(m.lit)
        m = m.parent
    out.reverse()
    return out


def canonical(t: Tableau | Node, with_sides: bool = True):
    """Order-insensitive canonical form used by golden comparisons.

    Children are sorted by the printed canonical form of their subtrees.
    """
    n = t.root if isinstance(t, Tableau) else t

    def go(m: Node):
        kids = sorted((go(c) for c in m.children), key=repr)
        label = str(m.lit) if m.lit is not None else "*"
        side = m.side if with_sides else None
        return (label, side, tuple(kids))

    return go(n)


def structurally_equal(a: Tableau, b: Tableau, ordered: bool = True, with_sides: bool = True) -> bool:
    if not ordered:
        return canonical(a, with_sides) == canonical(b, with_sides)

    def go(x: Node, y: Node) -> bool:
        return (
            x.lit == y.lit
            and (not with_sides or x.side == y.side)
            and len(x.children) == len(y.children)
            and all(go(c, d) for c, d in zip(x.children, y.children))
        )

    return go(a.root, b.root)


def build(spec, side: str | None = None) -> Tableau:
    """Tiny builder for tests: ``[(lit, [children...]), ...]`` under an implicit root."""
    from .syntax import parse_literal

    def mk(item) -> Node:
        if isinstance(item, tuple):
            lit, kids = item
        else:
            lit, kids = item, []
        l = parse_literal(lit) if isinstance(lit, str) else lit
        return Node(l, side, None, [mk(k) for k in kids])

    return Tableau(Node(None, None, None, [mk(i) for i in spec]))


__all__ = [n for n in dir() if not n.startswith("_")]
