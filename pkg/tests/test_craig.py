import random

import pytest
from oracles import polar_literals, tt_entails
from strategies import random_closed_tableau, random_cnf, random_dnf

from tabipol.clausify import is_horn_sentence
from tabipol.craig import (
    InterpolationOptions,
    NotHornError,
    interpolate,
    interpolate_horn,
    ipol_ground,
    ipol_node,
    is_existential,
    is_universal,
    lift,
    verify_craig_lyndon,
)
from tabipol.logic import FALSE, TRUE, Not, alpha_equivalent, conj, disj, vocabulary
from tabipol.syntax import parse_formula
from tabipol.tableau import TableauError, assign_targets, branch_lits, build

P = parse_formula


def two_sided(spec, sides):
    """Build a tableau and colour sibling groups in pre-order with ``sides``."""
    t = build(spec)
    it = iter(sides)
    for n in t.nodes():
        if n.children:
            s = next(it)
            for c in n.children:
                c.side = s
    return assign_targets(t)


class TestGround:
    def test_red_over_blue(self):
        t = two_sided([("p", ["~p"])], ["red", "blue"])
        assert ipol_ground(t) == P("p")

    def test_blue_over_red(self):
        t = two_sided([("p", ["~p"])], ["blue", "red"])
        assert ipol_ground(t) == P("~p")

    def test_all_red(self):
        t = two_sided([("p", ["~p"])], ["red", "red"])
        assert ipol_ground(t) == FALSE

    def test_all_blue(self):
        t = two_sided([("p", ["~p"])], ["blue", "blue"])
        assert ipol_ground(t) == TRUE

    def test_unsimplified_keeps_constants(self):
        t = two_sided([("p", ["~p"]), ("q", ["~q"])], ["red", "red", "red"])
        assert ipol_ground(t, simplify=False) != FALSE
        assert ipol_ground(t) == FALSE

    def test_missing_side(self):
        t = assign_targets(build([("p", ["~p"])]))
        with pytest.raises(TableauError):
            ipol_ground(t)


def _group_clauses(t, side):
    out = []
    for n in t.nodes():
        if n.children and n.children[0].side == side:
            out.append(disj(*(c.lit.as_formula() for c in n.children)))
    return out


def test_node_interpolant_separates_branch():
    """Every node's ground interpolant separates the red and blue parts of its branch."""
    rng = random.Random(11)
    names = [f"p{i}" for i in range(4)]
    for _ in range(300):
        t = assign_targets(random_closed_tableau(rng))
        red = conj(*_group_clauses(t, "red"))
        blue = conj(*_group_clauses(t, "blue"))
        for n in t.nodes():
            h = ipol_node(n)
            br = conj(red, *(l.as_formula() for l in branch_lits(n, "red")))
            bb = conj(blue, *(l.as_formula() for l in branch_lits(n, "blue")))
            assert tt_entails(br, h, names)
            assert tt_entails(conj(h, bb), FALSE, names)
            assert polar_literals(h) <= polar_literals(br) & polar_literals(Not(bb))


class TestLift:
    A = "p(h(g2(h(f1(g1)))), h(f1(h(g2(h(f1(g1)))))), g1)"
    B = "p(g1, h(f1(g1)), h(g2(h(f1(g1)))))"

    def test_golden(self):
        h_b = P(f"{self.A} & {self.B}")
        h, ctx = lift(h_b, {"f1"}, {"g1", "g2", "k"})
        want = P("all X2. ex Y2. all X1. ex Y1. (p(h(X1),h(Y1),X2) & p(X2,h(Y2),h(X1)))")
        assert alpha_equivalent(h, want)
        assert [q for _, q in ctx.prefix] == ["all", "ex", "all", "ex"]

    def test_prefix_respects_subterms(self):
        _, ctx = lift(P(f"{self.A} & {self.B}"), {"f1"}, {"g1", "g2"})
        order = [ctx.stt[v] for v, _ in ctx.prefix]
        for i, t in enumerate(order):
            for later in order[i + 1:]:
                assert str(later) not in str(t)

    def test_single_universal(self):
        h, _ = lift(P("p(sk)"), set(), {"sk"})
        assert alpha_equivalent(h, P("all V. p(V)"))

    def test_nothing_marked(self):
        h, ctx = lift(P("p(a)"), set(), set())
        assert h == P("p(a)") and ctx.prefix == ()

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            lift(P("p(a)"), {"a"}, {"a"})

    def test_non_ground_rejected(self):
        with pytest.raises(ValueError):
            lift(P("all X. p(f(X))"), {"f"}, set())


class TestInterpolate:
    def test_propositional(self):
        r = interpolate(P("p & q"), P("p | r"))
        assert tt_entails(P("p & q"), r.interpolant) and tt_entails(r.interpolant, P("p | r"))
        assert polar_literals(r.interpolant) <= {("p", True)}
        assert r.verification.ok

    def test_false_premise(self):
        assert interpolate(FALSE, P("p")).interpolant == FALSE

    def test_true_conclusion(self):
        assert interpolate(P("p"), TRUE).interpolant == TRUE

    def test_lifting_pair(self):
        f = P("all X1. all X2. p(X1, h(f1(X1)), X2)")
        g = P("ex X1. ex X2. (p(h(g2(X1)), X2, g1) & p(g1, X1, h(g2(X1))))")
        r = interpolate(f, g)
        assert r.verification.ok
        assert vocabulary(r.interpolant).funs <= {"h"}
        assert r.notes["prefix_items"]["exists_justified"] and r.notes["prefix_items"]["forall_justified"]

    def test_rejects_open_formula(self):
        with pytest.raises(ValueError):
            interpolate(P("p(X)"), P("p(a)"))

    def test_hyper_prover(self):
        r = interpolate(P("q(a) & all X. (~q(X) | r(X))"), P("r(a)"), InterpolationOptions(prover="hyper"))
        assert r.verification.ok

    def test_equality(self):
        r = interpolate(P("~eq(r(a), r(b))"), P("~eq(a, b)"), InterpolationOptions(equality=True))
        assert r.verification.ok
        assert alpha_equivalent(r.interpolant, P("~eq(a, b)"))

    def test_random_propositional(self):
        rng = random.Random(5)
        done = 0
        while done < 60:
            f, g = random_cnf(rng, 5, 4), random_dnf(rng, 5, 4)
            if not tt_entails(f, g):
                continue
            done += 1
            h = interpolate(f, g, InterpolationOptions(verify=False)).interpolant
            assert tt_entails(f, h) and tt_entails(h, g)
            assert polar_literals(h) <= polar_literals(f) & polar_literals(g)


class TestHorn:
    def test_chain(self):
        f = P("all X. (q(a) & (~q(X) | r(X)))")
        r = interpolate_horn(f, P("r(a)"))
        assert is_horn_sentence(r.interpolant) and r.verification.ok

    def test_existential_pair(self):
        f = P("ex X. (q(X) & r(X))")
        r = interpolate_horn(f, P("ex Y. q(Y)"))
        assert r.verification.ok and is_existential(r.interpolant)

    def test_non_horn_rejected(self):
        with pytest.raises(NotHornError):
            interpolate_horn(P("p | q"), P("p | q"))

    def test_universal_pair(self):
        f = P("all X. (~q(X) | r(X))")
        r = interpolate_horn(f, P("all Y. (~q(Y) | r(Y) | s(Y))"))
        assert r.verification.ok and is_universal(r.interpolant)


class TestVerify:
    def test_good(self):
        assert verify_craig_lyndon(P("p & q"), P("p | r"), P("p")).ok

    def test_wrong_direction(self):
        rep = verify_craig_lyndon(P("p & q"), P("p | r"), P("r"))
        assert rep.checks["F|=H"] != "yes" and not rep.ok

    def test_extra_predicate(self):
        rep = verify_craig_lyndon(P("p & q"), P("p | r"), P("p & (q | ~q)"))
        assert rep.checks["pred(H) in pred(F)&pred(G)"] is False

    def test_extra_function(self):
        rep = verify_craig_lyndon(P("all X. s(X)"), P("s(a)"), P("s(a) & s(b)"))
        assert rep.checks["fun(H) in fun(F)&fun(G)"] is False
        assert "b" in rep.details["fun(H) in fun(F)&fun(G)"]

    def test_open_interpolant(self):
        rep = verify_craig_lyndon(P("p"), P("p"), P("q(X)"))
        assert rep.checks["sentence"] is False and not rep.ok

    def test_report_lines(self):
        text = str(verify_craig_lyndon(P("p"), P("p"), P("p")))
        assert all(line.endswith("PASS") for line in text.splitlines())
