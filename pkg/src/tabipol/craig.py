"""Craig-Lyndon interpolation from two-sided clausal tableaux.

Pipeline: clausify F and the negation of G, refute their union, colour the
tableau clauses, ground leftover rigid variables with a fresh constant ``k``,
read off a ground interpolant node by node, then lift side-exclusive terms
to quantified variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .clausify import (
    BLUE,
    RED,
    ClausalForm,
    add_equality_axioms,
    clausify,
    equality_axiom_formula,
    horn_matrix_ok,
    is_horn_clause,
    is_horn_sentence,
    mentions_equality,
    strip_prefix,
)
from .logic import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bot,
    Exists,
    Fn,
    Forall,
    Formula,
    FreshNames,
    Lit,
    Not,
    Or,
    Term,
    Top,
    Var,
    atoms_with_polarity,
    conj,
    disj,
    inverse_subst,
    is_ground_term,
    is_sentence,
    simplify_constants,
    subterms,
    term_size,
    term_str,
    vocabulary,
)
from .provers import DEFAULT_BUDGET, Exhausted, ProofBudget, entails, prove_connection, prove_hyper
from .tableau import Node, Tableau, TableauError, assign_sides, ground_tableau, tableau_vars, target_of


class NoProofError(RuntimeError):
    """The prover gave up; says nothing about whether F entails G."""


class NotHornError(ValueError):
    pass


# --------------------------------------------------------------------------
# ground extraction


def ipol_node(n: Node) -> Formula:
    if not n.children:
        if n.side is None:
            raise TableauError(f"leaf {n.id} has no side")
        tgt = target_of(n)
        if tgt.side is None:
            raise TableauError(f"target {tgt.id} has no side")
        if n.side == RED:
            return FALSE if tgt.side == RED else n.lit.as_formula()
        return n.lit.complement().as_formula() if tgt.side == RED else TRUE
    side = n.children[0].side
    if side is None:
        raise TableauError(f"children of node {n.id} have no side")
    parts = [ipol_node(c) for c in n.children]
    return disj(*parts) if side == RED else conj(*parts)


def ipol_ground(t: Tableau, simplify: bool = True) -> Formula:
    """Ground interpolant of a closed two-sided ground tableau."""
    if not t.root.children:
        if t.empty_side is None:
            raise TableauError("empty tableau without the side of its empty clause")
        return FALSE if t.empty_side == RED else TRUE
    h = ipol_node(t.root)
    return simplify_constants(h) if simplify else h


# --------------------------------------------------------------------------
# lifting


@dataclass(frozen=True)
class LiftingContext:
    f_set: frozenset
    g_set: frozenset
    stt: Mapping[str, Term]
    prefix: tuple  # ((var, "all"|"ex"), ...)
    h_q: Formula


def _marked_terms(f: Formula, marked: frozenset) -> list[Term]:
    found: dict[Term, None] = {}

    def visit(t: Term) -> None:
        if type(t) is Fn:
            if t.name in marked:
                found.setdefault(t)
                return
            for a in t.args:
                visit(a)

    for atom, _ in atoms_with_polarity(f):
        for a in atom.args:
            visit(a)
    return list(found)


def lift(h_b: Formula, f_set: Iterable[str], g_set: Iterable[str]) -> tuple[Formula, LiftingContext]:
    """Replace maximal side-exclusive terms by variables and quantify them.

    Universal for terms headed by ``g_set`` symbols, existential for
    ``f_set``; the prefix lists subterms before the terms containing them.
    """
    f_set, g_set = frozenset(f_set), frozenset(g_set)
    if f_set & g_set:
        raise ValueError("f and g symbol sets must be disjoint")
    terms = _marked_terms(h_b, f_set | g_set)
    for t in terms:
        if not is_ground_term(t):
            raise ValueError("lift expects a ground formula")
    terms.sort(key=lambda t: (term_size(t), term_str(t)))
    nx = ny = 0
    stt: dict[str, Term] = {}
    prefix = []
    for t in terms:
        if t.name in g_set:
            nx += 1
            v = f"X{nx}"
            prefix.append((v, "all"))
        else:
            ny += 1
            v = f"Y{ny}"
            prefix.append((v, "ex"))
        stt[v] = t
    h_q = inverse_subst(h_b, stt) if stt else h_b
    out = h_q
    for v, q in reversed(prefix):
        out = Forall(v, out) if q == "all" else Exists(v, out)
    ctx = LiftingContext(f_set, g_set, stt, tuple(prefix), h_q)
    _check_prefix_order(ctx)
    return out, ctx


def _check_prefix_order(ctx: LiftingContext) -> None:
    order = [v for v, _ in ctx.prefix]
    for i, vi in enumerate(order):
        for j, vj in enumerate(order):
            ti, tj = ctx.stt[vi], ctx.stt[vj]
            if ti != tj and any(s == ti for s in subterms(tj)) and not i < j:
                raise AssertionError("lifting prefix violates the subterm order")


# --------------------------------------------------------------------------
# interpolation


@dataclass
class VerificationReport:
    checks: dict = field(default_factory=dict)  # name -> "yes"/"no"/"unknown" or bool
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v in (True, "yes") for v in self.checks.values())

    def __str__(self) -> str:
        rows = []
        for k, v in self.checks.items():
            status = "PASS" if v in (True, "yes") else ("UNKNOWN" if v == "unknown" else "FAIL")
            d = f"  ({self.details[k]})" if k in self.details else ""
            rows.append(f"{k}: {status}{d}")
        return "\n".join(rows)


@dataclass
class InterpolationResult:
    interpolant: Formula
    tableau: Tableau
    verification: VerificationReport | None = None
    ground_interpolant: Formula | None = None
    lifting: LiftingContext | None = None
    red: ClausalForm | None = None
    blue: ClausalForm | None = None
    notes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InterpolationOptions:
    prover: str = "connection"  # or "hyper"
    goal_policy: str = "negative"
    side_policy: str = "prefer-red"
    k_placement: str = "g"  # "g", "f" or "auto"
    grounding: str | Mapping[str, Term] = "uniform"
    equality: bool = False
    verify: bool = True
    budget: ProofBudget = DEFAULT_BUDGET
    verify_budget: ProofBudget | None = None


def _funs_of_clauses(cf: ClausalForm) -> set[str]:
    acc: set[str] = set()
    for c in cf.clauses:
        for l in c.lits:
            for a in l.args:
                for s in subterms(a):
                    if type(s) is Fn:
                        acc.add(s.name)
    return acc


def _fresh_constant(used: Iterable[str], base: str = "k") -> str:
    used = set(used)
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def interpolate(f: Formula, g: Formula, options: InterpolationOptions = InterpolationOptions()) -> InterpolationResult:
    for x, name in ((f, "F"), (g, "G")):
        if not is_sentence(x):
            raise ValueError(f"{name} must be a sentence")
    vf, vg = vocabulary(f), vocabulary(g)
    sk = FreshNames("sk", avoid=vf.funs | vg.funs, start=0)
    red = clausify(f, RED, sk)
    blue = clausify(Not(g), BLUE, sk)
    return _interpolate_clauses(f, g, red, blue, options)


def _interpolate_clauses(
    f: Formula, g: Formula, red: ClausalForm, blue: ClausalForm, options: InterpolationOptions, horn: bool = False
) -> InterpolationResult:
    if options.equality:
        red, blue = add_equality_axioms(red, blue)
    clauses = list(red.clauses) + list(blue.clauses)
    used = _funs_of_clauses(red) | _funs_of_clauses(blue)
    k = _fresh_constant(used)
    try:
        if options.prover == "hyper":
            tab = prove_hyper(clauses, options.budget, fresh_constant=k)
        else:
            tab = prove_connection(clauses, options.goal_policy, options.budget)
    except Exhausted as e:
        raise NoProofError(str(e)) from e
    tab = assign_sides(tab, red, blue, options.side_policy)
    grounded = ground_tableau(tab, k, options.grounding)
    h_b = ipol_ground(grounded)
    if horn:
        h_b = horn_cnf(h_b)
    fun_red, fun_blue = _funs_of_clauses(red), _funs_of_clauses(blue)
    f_hat = set(fun_red - fun_blue)
    g_hat = set(fun_blue - fun_red)
    placement = options.k_placement
    if placement == "auto":
        # universals from k are unjustified when G has none and adds no symbols
        blue_adds = bool(blue.skolem_funs) or bool(fun_blue - fun_red)
        red_adds = bool(red.skolem_funs) or bool(fun_red - fun_blue)
        placement = "f" if (not blue_adds and red_adds) else "g"
    if placement == "f":
        f_hat.add(k)
    else:
        g_hat.add(k)
    h, ctx = lift(h_b, f_hat, g_hat)
    res = InterpolationResult(h, grounded, None, h_b, ctx, red, blue)
    res.notes["k"] = k
    res.notes["prefix_items"] = prefix_properties(ctx, red, blue, k)
    if options.verify:
        res.verification = verify_craig_lyndon(f, g, h, options.verify_budget or options.budget, equality=options.equality)
    return res


def prefix_properties(ctx: LiftingContext, red: ClausalForm, blue: ClausalForm, k: str) -> dict:
    """Evidence for the structural prefix claims.

    Each existential variable must stem from a symbol only in the red clauses
    (a Skolem function of F, i.e. an existential of F's prenex form, or a
    function of F absent from G); dually for universals.  Variables that
    lift a term headed by ``k`` are reported separately: ``k`` is neither
    in F nor in G.
    """
    out = {"exists_justified": True, "forall_justified": True, "k_quantified": False}
    for v, q in ctx.prefix:
        head = ctx.stt[v].name
        if head == k:
            out["k_quantified"] = True
            continue
        if q == "ex" and head not in ctx.f_set:
            out["exists_justified"] = False
        if q == "all" and head not in ctx.g_set:
            out["forall_justified"] = False
    return out


# --------------------------------------------------------------------------
# Horn


def horn_cnf(h: Formula) -> Formula:
    """Distribute disjunction over conjunction in a ground formula."""
    clauses = _cnf_sets(simplify_constants(h))
    if clauses is None:
        return TRUE
    parts = []
    for c in clauses:
        parts.append(disj(*(l.as_formula() for l in c)))
    return conj(*parts) if parts else TRUE


def _cnf_sets(h: Formula):
    t = type(h)
    if t is Top:
        return []
    if t is Bot:
        return [()]
    if t is Atom:
        return [(h.lit(True),)]
    if t is Not and type(h.arg) is Atom:
        return [(h.arg.lit(False),)]
    if t is And:
        out = []
        for a in h.args:
            out.extend(_cnf_sets(a))
        return _dedupe(out)
    if t is Or:
        acc = [()]
        for a in h.args:
            part = _cnf_sets(a)
            acc = [_merge(x, y) for x in acc for y in part]
            acc = [c for c in acc if c is not None]
        return _dedupe(acc)
    raise TypeError(f"ground quantifier-free formula expected, got {h!r}")


def _merge(x: tuple, y: tuple):
    out = list(x)
    for l in y:
        if l.complement() in out:
            return None  # tautology
        if l not in out:
            out.append(l)
    return tuple(out)


def _dedupe(cs):
    seen = set()
    out = []
    for c in cs:
        key = frozenset(c)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


def is_universal(f: Formula) -> bool:
    prefix, matrix = strip_prefix(f)
    return all(q == "all" for q, _ in prefix) and _quantifier_free(matrix)


def is_existential(f: Formula) -> bool:
    prefix, matrix = strip_prefix(f)
    return all(q == "ex" for q, _ in prefix) and _quantifier_free(matrix)


def _quantifier_free(f: Formula) -> bool:
    t = type(f)
    if t in (Forall, Exists):
        return False
    if t is Not:
        return _quantifier_free(f.arg)
    if t in (And, Or):
        return all(_quantifier_free(a) for a in f.args)
    return t in (Atom, Top, Bot)


def interpolate_horn(f: Formula, g: Formula, options: InterpolationOptions | None = None) -> InterpolationResult:
    """Horn interpolant from a positive hyper tableau.

    The ground interpolant is brought to a conjunction of Horn clauses by
    distribution; lifting keeps that matrix.  ``k`` goes to the existential
    side when F and G are existential and G's functions all occur in F, and
    to the universal side otherwise.
    """
    if not is_horn_sentence(f):
        raise NotHornError("F is not a Horn sentence (prefix followed by a conjunction of Horn clauses)")
    options = options or InterpolationOptions(prover="hyper")
    vf, vg = vocabulary(f), vocabulary(g)
    sk = FreshNames("sk", avoid=vf.funs | vg.funs, start=0)
    red = clausify(f, RED, sk)
    for c in red.clauses:
        if not is_horn_clause(c.lits):
            raise NotHornError(f"clause {c} of F is not Horn")
    blue = clausify(Not(g), BLUE, sk)
    placement = options.k_placement
    if placement in ("auto", "g") and is_existential(f) and is_existential(g) and vg.funs <= vf.funs:
        placement = "f"
    opts = InterpolationOptions(
        prover="hyper",
        goal_policy=options.goal_policy,
        side_policy=options.side_policy,
        k_placement=placement,
        grounding=options.grounding,
        equality=options.equality,
        verify=options.verify,
        budget=options.budget,
        verify_budget=options.verify_budget,
    )
    res = _interpolate_clauses(f, g, red, blue, opts, horn=True)
    if not is_horn_sentence(res.interpolant):
        raise AssertionError("Horn interpolation produced a non-Horn matrix")
    res.notes["horn"] = True
    res.notes["universal"] = is_universal(res.interpolant)
    res.notes["existential"] = is_existential(res.interpolant)
    return res


# --------------------------------------------------------------------------
# verification


def _preds(f: Formula) -> set:
    return set(vocabulary(f).preds)


def verify_craig_lyndon(
    f: Formula, g: Formula, h: Formula, budget: ProofBudget = DEFAULT_BUDGET, equality: bool = False
) -> VerificationReport:
    rep = VerificationReport()
    background = equality_axiom_formula([f, g, h]) if equality else None
    if not is_sentence(h):
        rep.checks["sentence"] = False
        rep.details["sentence"] = "free variables; entailments not attempted"
    else:
        rep.checks["F|=H"] = entails(f, h, budget, background)
        rep.checks["H|=G"] = entails(h, g, budget, background)
    ph, pf, pg = _preds(h), _preds(f), _preds(g)
    rep.checks["pred(H) in pred(F)&pred(G)"] = ph <= (pf & pg)
    if ph - (pf & pg):
        rep.details["pred(H) in pred(F)&pred(G)"] = "extra: " + ", ".join(f"{p}{s}" for p, s in sorted(ph - (pf & pg)))
    fh, ff, fg = set(vocabulary(h).funs), set(vocabulary(f).funs), set(vocabulary(g).funs)
    rep.checks["fun(H) in fun(F)&fun(G)"] = fh <= (ff & fg)
    if fh - (ff & fg):
        rep.details["fun(H) in fun(F)&fun(G)"] = "extra: " + ", ".join(sorted(fh - (ff & fg)))
    return rep


__all__ = [
    "NoProofError",
    "NotHornError",
    "ipol_node",
    "ipol_ground",
    "LiftingContext",
    "lift",
    "VerificationReport",
    "InterpolationResult",
    "InterpolationOptions",
    "interpolate",
    "interpolate_horn",
    "horn_cnf",
    "is_universal",
    "is_existential",
    "prefix_properties",
    "verify_craig_lyndon",
]
