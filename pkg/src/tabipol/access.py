"""Access interpolation: binding patterns, ACI-tableau validation and extraction.

An access interpolant is an RQFO sentence whose relativized quantifiers only
access relations in ways licensed by the inputs.  It is read off a tableau
for the definitional clause forms of F and of the negation of G once that
tableau is closed, ground, regular, leaf-only for its negative labels and
contiguous for every guard/definer pair of an existential position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import _kernels as K
from .clausify import (
    BLUE,
    RED,
    ClausalForm,
    ClauseTag,
    GlobalPosition,
    InputClause,
    NotRQFOError,
    PositionInfo,
    definitional_clausify_rqfo,
    is_rqfo,
    negate_rqfo,
    to_rqfo,
)
from .craig import InterpolationResult, NoProofError, VerificationReport
from .logic import (
    FALSE,
    TRUE,
    And,
    Bot,
    ExistsRel,
    Fn,
    ForallRel,
    Formula,
    FreshNames,
    Lit,
    Or,
    Term,
    Top,
    Var,
    garg,
    is_ground_term,
    is_sentence,
    term_size,
    term_str,
    top_inverse_subst,
    vocabulary,
)
from .provers import DEFAULT_BUDGET, Exhausted, ProofBudget, entails, prove_connection, prove_hyper
from .tableau import (
    Node,
    Tableau,
    TableauDiagnostics,
    assign_sides,
    branch_lits,
    clause_index,
    check_closed,
    check_contiguous,
    check_ground,
    check_leaf_only,
    check_regular,
    check_two_sided,
    complementary_ancestor,
    ground_tableau,
    is_instance,
    matching_clauses,
    tableau_vars,
)
from .transforms import TransformTrace, negative_labels, to_aci


class AipolError(ValueError):
    pass


# --------------------------------------------------------------------------
# binding patterns


@dataclass(frozen=True, order=True)
class BindingPattern:
    sign: str  # "+" existential, "-" universal
    predicate: str
    inputs: frozenset = frozenset()

    def __post_init__(self) -> None:
        if self.sign not in "+-" or len(self.sign) != 1:
            raise ValueError(f"bad binding pattern sign {self.sign!r}")
        if any(i < 1 for i in self.inputs):
            raise ValueError("input positions start at 1")
        object.__setattr__(self, "inputs", frozenset(self.inputs))

    def __str__(self) -> str:
        return f"<{self.sign},{self.predicate},{{{','.join(map(str, sorted(self.inputs)))}}}>"


def _pattern(sign: str, guard, vs: tuple) -> BindingPattern:
    inputs = frozenset(i for i, a in enumerate(guard.args, start=1) if not (type(a) is Var and a.name in vs))
    return BindingPattern(sign, guard.pred, inputs)


def binding_patterns(f: Formula) -> frozenset:
    if not is_rqfo(f):
        f = to_rqfo(f)
    out: set[BindingPattern] = set()

    def go(g: Formula) -> None:
        t = type(g)
        if t is And or t is Or:
            for a in g.args:
                go(a)
        elif t is ForallRel:
            out.add(_pattern("-", g.guard, g.vars))
            go(g.body)
        elif t is ExistsRel:
            out.add(_pattern("+", g.guard, g.vars))
            go(g.body)

    go(f)
    return frozenset(out)


def covered(b: BindingPattern, by: BindingPattern) -> bool:
    return b.sign == by.sign and b.predicate == by.predicate and by.inputs <= b.inputs


def covered_set(bs: Iterable[BindingPattern], by: Iterable[BindingPattern]) -> bool:
    by = list(by)
    return all(any(covered(b, c) for c in by) for b in bs)


def uncovered(bs: Iterable[BindingPattern], by: Iterable[BindingPattern]) -> list[BindingPattern]:
    by = list(by)
    return sorted(b for b in bs if not any(covered(b, c) for c in by))


# --------------------------------------------------------------------------
# context


@dataclass
class AciContext:
    f: Formula
    g: Formula
    red: ClausalForm
    blue: ClausalForm
    garg_f: frozenset
    garg_ng: frozenset
    positions: Mapping[GlobalPosition, PositionInfo] = field(default_factory=dict)
    skolems: Mapping[str, GlobalPosition] = field(default_factory=dict)
    by_tag: Mapping[ClauseTag, InputClause] = field(default_factory=dict)
    index: Mapping = field(default_factory=dict)

    @property
    def clauses(self) -> list[InputClause]:
        return list(self.red.clauses) + list(self.blue.clauses)

    def _pair_patterns(self, pos: GlobalPosition):
        info = self.positions[pos]
        child = self.positions.get(pos.child(1))
        if info.kind != "exists" or child is None or child.trivial:
            return None
        return info.guard.substitute(info.sigma), child.definer.substitute(info.sigma)

    def contiguity_pairs(self, t: Tableau) -> set:
        """Pairs {R_p s_p m, D_p1 s_p m} whose members both label nodes of ``t``."""
        labels = sorted({n.lit for n in t.nodes() if n.lit is not None and n.lit.positive}, key=str)
        out: set = set()
        for pos in sorted(self.positions):
            pats = self._pair_patterns(pos)
            if pats is None:
                continue
            r_pat, d_pat = pats
            for l1 in labels:
                if l1.pred != r_pat.pred:
                    continue
                b: dict = {}
                if not K.match_args(r_pat.args, l1.args, b):
                    continue
                for l2 in labels:
                    if l2.pred != d_pat.pred:
                        continue
                    b2 = dict(b)
                    if K.match_args(d_pat.args, l2.args, b2):
                        out.add(frozenset((l1, l2)))
        return out

    def introducers(self, t: Term) -> frozenset:
        """Introducer literals of a Skolem-headed ground term (empty if not Skolem)."""
        if type(t) is not Fn or t.name not in self.skolems:
            return frozenset()
        pos = self.skolems[t.name]
        info = self.positions[pos]
        mu = {v.name: a for v, a in zip(info.definer.args, t.args)}
        out = {info.guard.substitute(info.sigma).substitute(mu)}
        child = self.positions.get(pos.child(1))
        if child is not None and not child.trivial:
            out.add(child.definer.substitute(info.sigma).substitute(mu))
        return frozenset(out)

    def tag_of(self, n: Node) -> ClauseTag | None:
        """Tag of the clause below ``n``: recorded on the children or found by matching."""
        tag = n.children[0].tag
        if tag is not None and tag in self.by_tag:
            return tag
        cands = matching_clauses(n.clause(), self.index)
        return cands[0].tag if cands else None


def make_aci_context(f: Formula, g: Formula) -> AciContext:
    f_rq = f if is_rqfo(f) else to_rqfo(f)
    g_rq = g if is_rqfo(g) else to_rqfo(g)
    for x, name in ((f_rq, "F"), (g_rq, "G")):
        if not is_sentence(x):
            raise ValueError(f"{name} must be a sentence")
    ng = negate_rqfo(g_rq)
    red = definitional_clausify_rqfo(f_rq, "L")
    blue = definitional_clausify_rqfo(ng, "R")
    positions = {**red.positions, **blue.positions}
    skolems: dict[str, GlobalPosition] = {}
    for pos, info in positions.items():
        for term in info.sigma.values():
            skolems[term.name] = pos
    by_tag = {c.tag: c for c in list(red.clauses) + list(blue.clauses)}
    return AciContext(
        f_rq, g_rq, red, blue, frozenset(garg(f_rq)), frozenset(garg(ng)), positions, skolems, by_tag,
        clause_index(list(red.clauses) + list(blue.clauses)),
    )


# --------------------------------------------------------------------------
# ACI check


def check_introducers(t: Tableau, ctx: AciContext) -> TableauDiagnostics:
    bad = []
    for n in t.nodes():
        if n.lit is None:
            continue
        for a in n.lit.args:
            intro = ctx.introducers(a) if is_ground_term(a) else frozenset()
            if not intro:
                continue
            if n.lit in intro or any(m.lit in intro for m in n.labelled_ancestors()):
                continue
            bad.append(n.id)
    return TableauDiagnostics().record("introducers", bad)


def check_aci(t: Tableau, ctx: AciContext) -> TableauDiagnostics:
    d = TableauDiagnostics()
    bad = []
    for n in t.inner():
        side = n.children[0].side
        cf = ctx.red if side == RED else ctx.blue if side == BLUE else None
        if cf is None:
            bad.append(n.id)
            continue
        tag = n.children[0].tag
        src = ctx.by_tag.get(tag) if tag is not None else None
        if src is not None:
            ok = src.side == side and is_instance(n.clause(), src.lits)
        else:
            ok = any(is_instance(n.clause(), c.lits) for c in cf.clauses)
        if not ok:
            bad.append(n.id)
    d.record("clause-forms", bad)
    d.merge(check_two_sided(t))
    d.merge(check_closed(t))
    d.merge(check_ground(t))
    d.merge(check_regular(t))
    d.merge(check_leaf_only(t, negative_labels(t)))
    d.merge(check_contiguous(t, ctx.contiguity_pairs(t)))
    d.merge(check_introducers(t, ctx))
    return d


# --------------------------------------------------------------------------
# extraction


def _term_key(t: Term):
    return (term_size(t), term_str(t))


def _split_form6(n: Node, info: PositionInfo) -> tuple[Node, Node, Node]:
    d_name = info.definer.pred
    n1 = next(c for c in n.children if not c.lit.positive and c.lit.pred == d_name)
    n3 = next(c for c in n.children if c.lit.positive)
    n2 = next(c for c in n.children if c is not n1 and c is not n3)
    return n1, n2, n3


def _theta_discipline(r: Lit, info: PositionInfo, ts: list[Term]) -> None:
    qv = set(info.qvars)
    for t in ts:
        for i, a in enumerate(r.args):
            if a == t:
                src = info.guard.args[i]
                if not (type(src) is Var and src.name in qv):
                    raise AipolError(
                        f"quantified term {term_str(t)} sits at input position {i + 1} of {r}"
                    )


def aipol(t: Tableau, ctx: AciContext) -> Formula:
    """Extract an access interpolant from an ACI-tableau.

    Red and blue cases are one routine: the blue case swaps the connective,
    the quantifier and the set subtracted from the guard's ground arguments.
    """
    if not t.root.children:
        if t.empty_side is None:
            raise AipolError("tableau without clauses and without an empty-clause side")
        return FALSE if t.empty_side == RED else TRUE
    fresh = FreshNames("V", start=1)

    def go(n: Node) -> Formula:
        tag = ctx.tag_of(n)
        if tag is None:
            raise AipolError(f"clause below node {n.id} is not a definitional clause")
        kids = n.children
        if tag.form == 1:
            return go(kids[0])
        info = ctx.positions[tag.position]
        if tag.form != 6:
            n1 = next((c for c in kids if not c.lit.positive and c.lit.pred == info.definer.pred), kids[0])
            rest = [go(c) for c in kids if c is not n1]
            if n1.side == RED:
                return rest[0] if len(rest) == 1 else (Or(tuple(rest)) if rest else FALSE)
            return rest[0] if len(rest) == 1 else (And(tuple(rest)) if rest else TRUE)
        n1, n2, n3 = _split_form6(n, info)
        tgt = complementary_ancestor(n2)
        if tgt is None:
            raise AipolError(f"node {n2.id} is open")
        body = go(n3)
        if tgt.side == n1.side:
            return body
        red_clause = n1.side == RED
        guard = n2.lit.atom()
        exclude = set(ctx.garg_f if red_clause else ctx.garg_ng)
        exclude |= garg(branch_lits(n, RED if red_clause else BLUE))
        ts = sorted(set(garg([n2.lit])) - exclude, key=_term_key)
        _theta_discipline(n2.lit.complement(), info, ts)
        names = [fresh() for _ in ts]
        theta = dict(zip(names, ts))
        kind = ForallRel if red_clause else ExistsRel
        inner = top_inverse_subst(kind((), guard, body), theta)
        return kind(tuple(names), inner.guard, inner.body)

    return go(t.root)


# --------------------------------------------------------------------------
# verification


def _consts(f: Formula) -> set:
    return set(vocabulary(f).consts)


def verify_access(
    f: Formula, g: Formula, h: Formula, budget: ProofBudget = DEFAULT_BUDGET
) -> VerificationReport:
    rep = VerificationReport()
    f_rq = f if is_rqfo(f) else to_rqfo(f)
    g_rq = g if is_rqfo(g) else to_rqfo(g)
    try:
        h_rq = h if is_rqfo(h) else to_rqfo(h)
        rep.checks["rqfo"] = is_sentence(h_rq)
    except NotRQFOError as e:
        rep.checks["rqfo"] = False
        rep.details["rqfo"] = str(e)
        h_rq = None
    rep.checks["F|=H"] = entails(f_rq, h, budget)
    rep.checks["H|=G"] = entails(h, g_rq, budget)
    ph, pf, pg = set(vocabulary(h).preds), set(vocabulary(f_rq).preds), set(vocabulary(g_rq).preds)
    extra = ph - (pf & pg)
    rep.checks["pred(H) in pred(F)&pred(G)"] = not extra
    if extra:
        rep.details["pred(H) in pred(F)&pred(G)"] = "extra: " + ", ".join(f"{p}{s}" for p, s in sorted(extra))
    if h_rq is not None:
        bh, bf, bg = binding_patterns(h_rq), binding_patterns(f_rq), binding_patterns(g_rq)
        ex = uncovered((b for b in bh if b.sign == "+"), (b for b in bg if b.sign == "+"))
        un = uncovered((b for b in bh if b.sign == "-"), (b for b in bf if b.sign == "-"))
        rep.checks["existential patterns covered by G"] = not ex
        rep.checks["universal patterns covered by F"] = not un
        if ex:
            rep.details["existential patterns covered by G"] = "uncovered: " + ", ".join(map(str, ex))
        if un:
            rep.details["universal patterns covered by F"] = "uncovered: " + ", ".join(map(str, un))
    ch = _consts(h)
    shared = _consts(f_rq) & _consts(g_rq)
    rep.checks["const(H) in const(F)&const(G)"] = ch <= shared
    if ch - shared:
        rep.details["const(H) in const(F)&const(G)"] = "extra: " + ", ".join(sorted(ch - shared))
    return rep


# --------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class AccessOptions:
    prover: str = "hyper"  # or "connection"
    goal_policy: str = "negative"
    budget: ProofBudget = DEFAULT_BUDGET
    verify: bool = True
    verify_budget: ProofBudget | None = None


def _fresh_constant(ctx: AciContext) -> str:
    used = set()
    for c in ctx.clauses:
        for l in c.lits:
            for a in l.args:
                used |= {s.name for s in _fns(a)}
    used |= set(ctx.skolems)
    k, i = "k", 0
    while k in used:
        i += 1
        k = f"k{i}"
    return k


def _fns(t: Term):
    if type(t) is Fn:
        yield t
        for a in t.args:
            yield from _fns(a)


def access_interpolate(
    f: Formula, g: Formula, options: AccessOptions = AccessOptions(), trace: TransformTrace | None = None
) -> InterpolationResult:
    ctx = make_aci_context(f, g)
    clauses = ctx.clauses
    k = _fresh_constant(ctx)
    try:
        if options.prover == "hyper":
            tab = prove_hyper(clauses, options.budget, fresh_constant=k)
        elif options.prover == "connection":
            tab = prove_connection(clauses, options.goal_policy, options.budget)
        else:
            raise ValueError(f"unknown prover {options.prover!r}")
    except Exhausted as e:
        raise NoProofError(str(e)) from e
    tab = assign_sides(tab, ctx.red, ctx.blue, "keep")
    if tableau_vars(tab):
        tab = ground_tableau(tab, k)
    trace = trace if trace is not None else TransformTrace()
    aci = to_aci(tab, ctx, trace)
    h = aipol(aci, ctx)
    res = InterpolationResult(h, aci, None, None, None, ctx.red, ctx.blue)
    res.notes["k"] = k
    res.notes["trace"] = trace
    res.notes["source_tableau"] = tab
    if options.verify:
        res.verification = verify_access(ctx.f, ctx.g, h, options.verify_budget or options.budget)
    return res


__all__ = [
    "AipolError",
    "BindingPattern",
    "binding_patterns",
    "covered",
    "covered_set",
    "uncovered",
    "AciContext",
    "make_aci_context",
    "check_aci",
    "check_introducers",
    "aipol",
    "verify_access",
    "AccessOptions",
    "access_interpolate",
]
