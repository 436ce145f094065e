import random

import pytest
from oracles import assignments, dpll, ground_instances, prop_eval, structures
from strategies import random_cnf, random_dnf

from tabipol.clausify import (
    NotRQFOError,
    add_equality_axioms,
    clausify,
    definitional_clausify_rqfo,
    is_rqfo,
    negate_rqfo,
    rename_clause_vars,
    to_rqfo,
)
from tabipol.logic import FALSE, TRUE, And, ExistsRel, Fn, ForallRel, Lit, Not
from tabipol.syntax import parse_formula, parse_literal

P = parse_formula
FG = "all X. (~r(X) | ex Y. (s(X,Y) & true))"


def canon(clauses):
    """Clause sets modulo variable renaming and literal order."""
    out = set()
    for c in clauses:
        lits = rename_clause_vars(sorted(c, key=str))
        out.add(tuple(sorted(str(l) for l in lits)))
    return out


def clauses_of(text):
    return [tuple(parse_literal(x.strip()) for x in line.split("|")) for line in text]


class TestPlain:
    def test_universal_sentence(self):
        cf = clausify(P("all X1. all X2. p(X1, h(f1(X1)), X2)"))
        assert canon(cf.lit_lists()) == canon(clauses_of(["p(U1, h(f1(U1)), U2)"]))
        assert cf.skolem_funs == frozenset()

    def test_negated_goal(self):
        g = P("ex X1. ex X2. (p(h(g2(X1)), X2, g1) & p(g1, X1, h(g2(X1))))")
        cf = clausify(Not(g))
        assert canon(cf.lit_lists()) == canon(clauses_of(["~p(h(g2(V1)),V2,g1) | ~p(g1,V1,h(g2(V1)))"]))

    def test_skolem_constant(self):
        cf = clausify(P("ex Y. p(Y)"))
        (c,) = cf.lit_lists()
        (l,) = c
        assert l.args[0].name in cf.skolem_funs and not l.args[0].args

    def test_inner_skolemization(self):
        cf = clausify(P("all X. (q(X) | ex Y. r(Y))"))
        sk = [l.args[0] for c in cf.lit_lists() for l in c if l.pred == "r"]
        assert sk and not sk[0].args  # Y does not depend on X

    def test_tautologies_dropped(self):
        assert clausify(P("p | ~p")).lit_lists() == []

    def test_side_recorded(self):
        assert all(c.side == "blue" for c in clausify(P("p & q"), "blue").clauses)


def test_propositional_equisatisfiable():
    rng = random.Random(7)
    for _ in range(300):
        f = And((random_cnf(rng, 5, 4), Not(random_dnf(rng, 5, 4))))
        names = [f"p{i}" for i in range(5)]
        sat = any(prop_eval(f, v) for v in assignments(names))
        cls = [c for c in clausify(f).lit_lists()]
        ground = [frozenset((l.positive, l.pred, l.args) for l in c) for c in cls]
        assert dpll(ground) == sat


def test_first_order_equisatisfiable_herbrand():
    # function-free universal inputs: Herbrand universe is the constants
    for text, sat in [
        ("all X. (~q(X) | r(X)) & q(a) & ~r(a)", False),
        ("all X. (~q(X) | r(X)) & q(a) & ~r(b)", True),
        ("all X. all Y. (~s(X,Y) | s(Y,X)) & s(a,b) & ~s(b,a)", False),
    ]:
        cf = clausify(P(text))
        assert dpll(ground_instances(cf.lit_lists(), ["a", "b"])) == sat


class TestRqfo:
    def test_example(self):
        f = to_rqfo(P(FG))
        assert isinstance(f, ForallRel) and f.vars == ("X",)
        assert isinstance(f.body, ExistsRel) and f.body.body == TRUE
        assert is_rqfo(f)

    def test_true(self):
        assert to_rqfo(TRUE) == TRUE

    def test_unrelativized(self):
        with pytest.raises(NotRQFOError):
            to_rqfo(P("all X. p(X)"))

    def test_negation_rewrites(self):
        f = to_rqfo(P("ex X. (r(X) & q(X))"))
        n = negate_rqfo(f)
        assert isinstance(n, ForallRel) and n.guard == f.guard
        assert negate_rqfo(TRUE) == FALSE
        assert negate_rqfo(n) == f

    def test_negation_is_semantic_complement(self):
        f = to_rqfo(P(FG))
        n = negate_rqfo(f)
        for m in structures({"r": 1, "s": 2}, {}, 2):
            assert m.holds(n) == (not m.holds(f))


class TestDefinitional:
    RED = ["d_Le", "~d_Le | ~r(X) | d_L1(X)", "~d_L1(X) | s(X, sk_L_1_1(X))"]
    BLUE = ["d_Re", "~d_Re | r(sk_R_e_1)", "~d_Re | d_R1(sk_R_e_1)", "~d_R1(X) | ~s(X,Y) | d_R11", "~d_R11"]

    def test_side_l_three_clauses(self):
        cf = definitional_clausify_rqfo(to_rqfo(P(FG)), "L")
        assert canon(cf.lit_lists()) == canon(clauses_of(self.RED))
        assert [c.tag.form for c in cf.clauses] == [1, 6, 7]

    def test_side_r_five_clauses(self):
        cf = definitional_clausify_rqfo(negate_rqfo(to_rqfo(P(FG))), "R")
        assert canon(cf.lit_lists()) == canon(clauses_of(self.BLUE))
        assert all(1 <= c.tag.form <= 8 for c in cf.clauses)

    def test_true_generates_only_root(self):
        cf = definitional_clausify_rqfo(TRUE, "L")
        assert [str(c) for c in cf.clauses] == ["d_Le"]

    def test_definers_disjoint(self):
        red = definitional_clausify_rqfo(to_rqfo(P(FG)), "L")
        blue = definitional_clausify_rqfo(negate_rqfo(to_rqfo(P(FG))), "R")
        dl = {l.pred for c in red.lit_lists() for l in c if l.pred.startswith("d_")}
        dr = {l.pred for c in blue.lit_lists() for l in c if l.pred.startswith("d_")}
        assert dl and dr and not dl & dr

    def test_rejects_non_rqfo(self):
        with pytest.raises(NotRQFOError):
            definitional_clausify_rqfo(P("all X. p(X)"), "L")

    @pytest.mark.parametrize(
        "text, sat",
        [
            (FG, True),
            ("ex X. (r(X) & (q(X) | ex Y. (s(X,Y) & q(Y))))", True),
            ("(all X. (~r(X) | q(X))) & (ex Y. (r(Y) & ~q(Y)))", False),
            ("ex X. (r(X) & false)", False),
        ],
    )
    def test_satisfiability_preserved(self, text, sat):
        """Definitional clauses are satisfiable exactly when the sentence is.

        The sentence side uses finite models of size <= 2.  The clause side
        replaces each Skolem term by a constant and runs DPLL on the Herbrand
        instances, which is exact for these depth-one examples.
        """
        f = to_rqfo(P(text))
        has_model = any(m.holds(f) for n in (1, 2) for m in structures({"r": 1, "q": 1, "s": 2}, {}, n))
        assert has_model == sat
        cf = definitional_clausify_rqfo(f, "L")
        consts = {"c0"}
        flat = []
        for c in cf.lit_lists():
            flat.append(tuple(_flatten(l) for l in c))
            for l in c:
                consts.update(_flat_name(a) for a in l.args if type(a) is Fn)
        assert dpll(ground_instances(flat, consts)) == sat


def _flat_name(t):
    return t.name if not t.args else t.name + "_x"


def _flatten(l: Lit) -> Lit:
    args = tuple(Fn(_flat_name(a), ()) if type(a) is Fn else a for a in l.args)
    return Lit(l.positive, l.pred, args)


class TestEquality:
    def test_substitutivity_on_owner_side(self):
        red = clausify(P("~eq(r(a), r(b))"), "red")
        blue = clausify(Not(P("~eq(a, b)")), "blue")
        r2, b2 = add_equality_axioms(red, blue)
        red_strs = {str(c) for c in r2.clauses}
        blue_strs = {str(c) for c in b2.clauses}
        assert any("r(" in s and "eq(" in s for s in red_strs)
        assert not any("r(" in s and s.count("eq(") == 2 for s in blue_strs)
        assert len(r2.clauses) > len(red.clauses) and len(b2.clauses) > len(blue.clauses)

    def test_unchanged_without_eq(self):
        red = clausify(P("p(a)"), "red")
        blue = clausify(Not(P("p(a)")), "blue")
        assert add_equality_axioms(red, blue) == (red, blue)
