"""Tableau restructurings that turn a closed clausal tableau into an ACI-tableau.

All procedures copy their input and return a fresh tableau.  After every
procedure two invariants are asserted: each clause of the output is a clause
of the input, and a closed input stays closed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

from .logic import Lit
from .tableau import (
    Node,
    Tableau,
    TableauDiagnostics,
    TableauError,
    assign_targets,
    check_eager,
    check_regular,
    is_closed,
    is_closed_node,
)


class TransformError(TableauError):
    """A precondition of a restructuring procedure does not hold."""

    def __init__(self, message: str, diagnostics: TableauDiagnostics | None = None) -> None:
        self.diagnostics = diagnostics
        super().__init__(message + (f"\n{diagnostics}" if diagnostics is not None else ""))


class TransformInvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class TraceEntry:
    procedure: str
    touched: tuple
    before: int
    after: int
    measure: tuple | None = None
    path_measure: tuple | None = None

    def __str__(self) -> str:
        m = ""
        if self.measure is not None:
            m = " measure=" + ".".join("w" if math.isinf(x) else str(x) for x in self.measure)
        if self.path_measure is not None:
            m += " path=" + ".".join(map(str, self.path_measure))
        return f"{self.procedure}: nodes {list(self.touched)} size {self.before}->{self.after}{m}"


@dataclass
class TransformTrace:
    entries: list = field(default_factory=list)

    def add(self, entry: TraceEntry) -> None:
        self.entries.append(entry)

    def measures(self, procedure: str = "leaf-only", kind: str = "code") -> list[tuple]:
        """Per-round measures: ``kind="code"`` for code(N')|badlits(N')|, ``"path"`` for the path measure."""
        attr = "measure" if kind == "code" else "path_measure"
        return [getattr(e, attr) for e in self.entries if e.procedure == procedure and getattr(e, attr) is not None]

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return "\n".join(str(e) for e in self.entries)


# --------------------------------------------------------------------------
# bookkeeping


class _Ids:
    def __init__(self, t: Tableau) -> None:
        self._c = itertools.count(t.max_id() + 1)

    def __call__(self) -> int:
        return next(self._c)


def _copy_subtree(n: Node, ids: _Ids, hollow: Node | None = None) -> Node:
    """Fresh copy of the subtree at ``n``; the copy of ``hollow`` gets no children."""
    m = Node(n.lit, n.side, n.tag, id=ids())
    if n is not hollow:
        m.set_children(_copy_subtree(c, ids, hollow) for c in n.children)
    return m


def _clause_set(t: Tableau) -> set:
    return {(tuple(c.lit for c in n.children), n.children[0].side) for n in t.inner()}


def _check_invariants(name: str, before: Tableau, after: Tableau, was_closed: bool) -> None:
    extra = _clause_set(after) - _clause_set(before)
    if extra:
        raise TransformInvariantError(f"{name} introduced clauses absent from its input: {len(extra)}")
    if was_closed and not is_closed(after):
        raise TransformInvariantError(f"{name} lost closedness")


def _finish(name: str, src: Tableau, out: Tableau) -> Tableau:
    _check_invariants(name, src, out, is_closed(src))
    return assign_targets(out)


# --------------------------------------------------------------------------
# eager / regular


def _eager_inplace(t: Tableau) -> list[int]:
    cut: list[int] = []
    stack = [t.root]
    while stack:
        n = stack.pop()
        if n.children and is_closed_node(n):
            cut.append(n.id)
            n.set_children(())
            continue
        stack.extend(reversed(n.children))
    return cut


def remove_uneagerness(t: Tableau, trace: TransformTrace | None = None) -> Tableau:
    out = t.copy()
    before = out.size()
    cut = _eager_inplace(out)
    if trace is not None and cut:
        trace.add(TraceEntry("eager", tuple(cut), before, out.size()))
    return _finish("eager", t, out)


def _first_irregular(t: Tableau) -> Node | None:
    seen: list[Lit] = []

    def go(n: Node) -> Node | None:
        if n.lit is not None and n.lit in seen:
            return n
        if n.lit is not None:
            seen.append(n.lit)
        for c in n.children:
            hit = go(c)
            if hit is not None:
                return hit
        if n.lit is not None:
            seen.pop()
        return None

    return go(t.root)


def _regular_inplace(t: Tableau) -> list[int]:
    touched: list[int] = []
    while True:
        n = _first_irregular(t)
        if n is None:
            return touched
        p = n.parent
        touched.append(n.id)
        p.set_children(n.children)


def remove_irregularities(t: Tableau, trace: TransformTrace | None = None) -> Tableau:
    """Closedness is only guaranteed when the input is eager."""
    out = t.copy()
    before = out.size()
    touched = _regular_inplace(out)
    if trace is not None and touched:
        trace.add(TraceEntry("regular", tuple(touched), before, out.size()))
    return _finish("regular", t, out)


# --------------------------------------------------------------------------
# leaf-only


def node_code(n: Node) -> tuple:
    """Right-sibling counts from the root down to ``n`` (the root contributes 0)."""
    path = [n, *n.ancestors()]
    path.reverse()
    out = []
    for m in path:
        if m.parent is None:
            out.append(0)
        else:
            sibs = m.parent.children
            out.append(len(sibs) - 1 - next(i for i, s in enumerate(sibs) if s is m))
    return tuple(out)


def badlits(n: Node, s: set) -> set:
    return {m.lit for m in n.preorder() if m is not n and m.children and m.lit in s}


def leaf_only_measure(p: Node, s: set) -> tuple:
    """code(p) followed by omega and |badlits(p)|; recorded, not asserted (see path_measure)."""
    return node_code(p) + (math.inf, len(badlits(p, s)))


def path_measure(p: Node, s: set) -> tuple:
    """|badlits| of each node from the root down to ``p``, interleaved with right-sibling counts.

    Compared lexicographically with a proper prefix counting as smaller, this
    decreases strictly from round to round.  A round at ``p`` shrinks
    badlits(p) and never grows badlits of an ancestor.  A later round at an
    ancestor yields a proper prefix.  A round to the right branches off at a
    smaller sibling count.
    """
    path = [p, *p.ancestors()]
    path.reverse()
    out: list[int] = []
    for m in path:
        if m.parent is not None:
            sibs = m.parent.children
            out.append(len(sibs) - 1 - next(i for i, x in enumerate(sibs) if x is m))
        out.append(len(badlits(m, s)))
    return tuple(out)


def _require(t: Tableau, closed: bool = True, eager: bool = True, regular: bool = True) -> None:
    d = TableauDiagnostics()
    if closed:
        d.record("closed", (n.id for n in t.leaves() if not is_closed_node(n)))
    if eager:
        d.merge(check_eager(t))
    if regular:
        d.merge(check_regular(t))
    if not d.ok:
        raise TransformError("input tableau violates preconditions: " + ", ".join(d.failed()), d)


def make_leaf_only(
    t: Tableau,
    s: Iterable[Lit],
    rounds: int | None = None,
    trace: TransformTrace | None = None,
) -> Tableau:
    """Move every node labelled with a member of ``s`` to leaf position.

    ``rounds`` caps the number of rounds, which is useful for replaying the
    conversion stage by stage.  The termination measure of each round is
    recorded in ``trace``.  The path measure is asserted to decrease strictly.
    """
    s = set(s)
    for l in s:
        if l.complement() in s:
            raise ValueError(f"literal set contains the complementary pair {l} / {l.complement()}")
    _require(t)
    out = t.copy()
    ids = _Ids(out)
    last: tuple | None = None
    done = 0
    while rounds is None or done < rounds:
        n = next((m for m in out.nodes() if m.children and m.lit in s), None)
        if n is None:
            break
        p = n.parent
        measure = leaf_only_measure(p, s)
        pm = path_measure(p, s)
        if last is not None and not pm < last:
            raise TransformInvariantError(f"leaf-only path measure did not decrease: {last} -> {pm}")
        last = pm
        before = out.size()
        u = _copy_subtree(p, ids, hollow=n)
        p.set_children(n.children)
        want = n.lit.complement()
        fixed = [m for m in p.preorder() if m is not p and m.is_leaf and m.lit == want]
        for m in fixed:
            m.set_children(_copy_subtree(c, ids) for c in u.children)
        _eager_inplace(out)
        _regular_inplace(out)
        done += 1
        if trace is not None:
            trace.add(TraceEntry("leaf-only", (n.id, p.id, *(m.id for m in fixed)), before, out.size(), measure, pm))
    return _finish("leaf-only", t, out)


# --------------------------------------------------------------------------
# contiguity


def _partners(pairs: Iterable[frozenset]) -> dict:
    partner: dict[Lit, set[Lit]] = {}
    for pr in pairs:
        a, b = tuple(pr)
        partner.setdefault(a, set()).add(b)
        partner.setdefault(b, set()).add(a)
    return partner


def check_contiguity_preconditions(t: Tableau, pairs: Iterable[frozenset]) -> TableauDiagnostics:
    """The structural conditions under which contiguity can be established."""
    labels = {n.lit for n in t.nodes() if n.lit is not None}
    d = TableauDiagnostics()
    bad_shape: list[int] = []
    bad_leaf: list[int] = []
    for pr in pairs:
        if not pr <= labels:
            continue
        l0s = set()
        for n in t.inner():
            kids = n.children
            if not any(k.lit in pr for k in kids):
                continue
            if len(kids) != 2 or all(k.lit in pr for k in kids):
                bad_shape.append(n.id)
                continue
            l0s.add(next(k.lit for k in kids if k.lit not in pr))
        if len(l0s) > 1:
            bad_shape.extend(n.id for n in t.inner() if any(k.lit in pr for k in n.children))
        for l0 in l0s:
            bad_leaf.extend(n.id for n in t.nodes() if n.lit == l0 and n.children)
    d.record("contiguity-shape", bad_shape)
    d.record("contiguity-l0-leaves", bad_leaf)
    return d


def _find_contiguity_violation(t: Tableau, partner: dict) -> tuple[Node, Node] | None:
    for n in t.nodes():
        if not n.children or n.lit not in partner:
            continue
        others = partner[n.lit]
        for m in n.preorder():
            if m is not n and m.parent is not n and m.lit in others:
                return n, m
    return None


def make_contiguous(
    t: Tableau,
    pairs: Iterable[frozenset],
    regularize: bool = True,
    rounds: int | None = None,
    trace: TransformTrace | None = None,
) -> Tableau:
    """Establish contiguity for literal pairs shaped like guard/definer pairs.

    With ``regularize=False`` only the restructuring steps run, and a single
    round is done unless ``rounds`` says otherwise; this mirrors the staged
    figures where the regularity pass is shown separately.
    """
    pairs = [frozenset(p) for p in pairs]
    for p in pairs:
        if len(p) != 2:
            raise ValueError(f"contiguity pairs need two distinct literals, got {set(p)}")
    _require(t, closed=False)
    pre = check_contiguity_preconditions(t, pairs)
    if not pre.ok:
        raise TransformError("contiguity preconditions violated", pre)
    if not regularize and rounds is None:
        rounds = 1
    partner = _partners(pairs)
    out = t.copy()
    ids = _Ids(out)
    done = 0
    while rounds is None or done < rounds:
        hit = _find_contiguity_violation(out, partner)
        if hit is None:
            break
        n, m = hit
        q = m.parent
        sib = next(k for k in q.children if k is not m)
        m0p = Node(sib.lit, sib.side, sib.tag, id=ids())
        mp = Node(m.lit, m.side, m.tag, id=ids())
        before = out.size()
        mp.set_children(n.children)
        n.set_children([m0p, mp] if q.children.index(sib) < q.children.index(m) else [mp, m0p])
        touched = [n.id, m.id]
        if regularize:
            touched += _regular_inplace(out)
        done += 1
        if trace is not None:
            trace.add(TraceEntry("contiguous", tuple(touched), before, out.size()))
    return _finish("contiguous", t, out)


# --------------------------------------------------------------------------
# pipeline


def negative_labels(t: Tableau) -> set:
    return {n.lit for n in t.nodes() if n.lit is not None and not n.lit.positive}


def to_aci(t: Tableau, ctx, trace: TransformTrace | None = None, check: bool = True) -> Tableau:
    """eager, regular, leaf-only for negative labels, then contiguity.

    ``ctx`` supplies ``contiguity_pairs(tableau)``; when ``check`` is set the
    result is validated with the access-interpolation checker.
    """
    if not is_closed(t):
        raise TransformError("to_aci needs a closed tableau")
    out = remove_uneagerness(t, trace)
    out = remove_irregularities(out, trace)
    out = make_leaf_only(out, negative_labels(out), trace=trace)
    out = make_contiguous(out, ctx.contiguity_pairs(out), trace=trace)
    _check_invariants("to-aci", t, out, True)
    if check:
        from .access import check_aci

        d = check_aci(out, ctx)
        if not d.ok:
            raise TransformInvariantError(f"to_aci result is not an ACI-tableau:\n{d}")
    return out


__all__ = [
    "TransformError",
    "TransformInvariantError",
    "TraceEntry",
    "TransformTrace",
    "remove_uneagerness",
    "remove_irregularities",
    "make_leaf_only",
    "make_contiguous",
    "check_contiguity_preconditions",
    "negative_labels",
    "node_code",
    "badlits",
    "leaf_only_measure",
    "to_aci",
]
