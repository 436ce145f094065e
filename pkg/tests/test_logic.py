import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import formulas, terms

from tabipol.logic import (
    Atom,
    CaptureError,
    Fn,
    Forall,
    ForallRel,
    Lit,
    Not,
    Var,
    alpha_equivalent,
    apply_subst,
    compose,
    free_vars,
    garg,
    inverse_subst,
    is_ground_term,
    restrict,
    subterms,
    top_inverse_subst,
    vocabulary,
)
from tabipol.syntax import parse_formula, parse_literal, parse_term

P, T = parse_formula, parse_term


class TestFreeVars:
    def test_term(self):
        assert free_vars(Atom("p", (Var("X"), T("f(Y)")))) == {"X", "Y"}

    def test_binder(self):
        assert free_vars(P("all X. p(X, Y)")) == {"Y"}

    def test_sentence_example(self):
        assert free_vars(P("all X1. all X2. p(X1, h(f1(X1)), X2)")) == set()

    def test_relativized(self):
        f = ForallRel(("X",), Atom("r", (Var("X"), Var("Z"))), Atom("q", (Var("X"),)))
        assert free_vars(f) == {"Z"}


class TestVocabulary:
    def test_direct_reading(self):
        v = vocabulary(P("~p(a) | q(f(b))"))
        assert v.preds == {("p", "-"), ("q", "+")}
        assert v.funs == {"a", "f", "b"}
        assert v.pargs == {T("a"), T("f(b)")}

    def test_double_negation(self):
        assert vocabulary(P("~(~p(a))")).preds == {("p", "+")}

    def test_functions_of_example(self):
        assert vocabulary(P("all X1. all X2. p(X1, h(f1(X1)), X2)")).funs == {"h", "f1"}

    def test_implication_expanded_before_polarity(self):
        assert vocabulary(P("p -> q")).preds == {("p", "-"), ("q", "+")}

    @given(formulas())
    def test_negation_swaps_polarity(self, f):
        flip = {"+": "-", "-": "+"}
        assert vocabulary(Not(f)).preds == {(p, flip[s]) for p, s in vocabulary(f).preds}


class TestSubstitution:
    def test_apply(self):
        assert apply_subst(P("p(X,Y)"), {"X": T("a")}) == P("p(a,Y)")

    def test_composition(self):
        s = compose({"X": T("f(Z)")}, {"Z": T("b")})
        assert apply_subst(Var("X"), s) == T("f(b)")

    def test_identity(self):
        f = P("p(h(f(a), g(f(a))))")
        assert apply_subst(f, {}) == f

    def test_capture_detected(self):
        with pytest.raises(CaptureError):
            apply_subst(P("all X. p(X,Y)"), {"Y": Var("X")})

    def test_restriction(self):
        assert restrict({"X": T("a"), "Y": T("b")}, ["X", "Z"]) == {"X": T("a")}

    @given(terms(), st.dictionaries(st.sampled_from(["X", "Y"]), terms(("X", "Y"), 1), max_size=2))
    def test_compose_is_sequential_application(self, t, s2):
        s1 = {"X": T("f(Y)")}
        assert apply_subst(apply_subst(t, s1), s2) == apply_subst(t, compose(s1, s2))


class TestInverseSubstitution:
    def test_nested_range_terms(self):
        e = P("p(h(f(a), g(f(a))))")
        assert inverse_subst(e, {"X": T("f(a)"), "Y": T("g(f(a))")}) == P("p(h(X, Y))")

    def test_identity(self):
        e = P("p(f(a))")
        assert inverse_subst(e, {}) == e

    def test_every_maximal_occurrence(self):
        assert inverse_subst(P("p(f(a), a)"), {"X": T("a")}) == P("p(f(X), X)")

    def test_non_injective_rejected(self):
        with pytest.raises(ValueError):
            inverse_subst(P("p(a)"), {"X": T("a"), "Y": T("a")})

    @given(terms(("U",), 3))
    def test_round_trip(self, t):
        # range terms: ground subterms of t, kept injective, domain fresh
        ground = sorted({s for s in subterms(t) if is_ground_term(s) and s != t}, key=str)[:2]
        sigma = {f"Z{i}": g for i, g in enumerate(ground)}
        lit = Lit(True, "p", (t,))
        assert apply_subst(inverse_subst(lit, sigma), sigma) == lit


class TestGarg:
    def test_worked_instance(self):
        assert garg(P("all X. p(a, g(a), g(b), X, f(Y,b))")) == {T("a"), T("g(a)"), T("g(b)")}

    def test_relational(self):
        f = P("r(a) & s(a, b)")
        v = vocabulary(f)
        assert {t.name for t in garg(f)} == v.consts == v.funs

    def test_variable_only(self):
        assert garg(P("p(X)")) == set()


class TestTopInverse:
    def test_argument_positions_only(self):
        assert top_inverse_subst(P("p(a, f(a))"), {"V": T("a")}) == P("p(V, f(a))")

    def test_empty(self):
        f = P("p(a)")
        assert top_inverse_subst(f, {}) == f

    def test_single(self):
        assert top_inverse_subst(P("r(g)"), {"V": T("g")}) == P("r(V)")

    def test_range_outside_garg(self):
        with pytest.raises(ValueError):
            top_inverse_subst(P("p(f(a))"), {"V": T("a")})

    def test_free_vars_grow_by_used_domain(self):
        f = P("p(a, Y) & q(b)")
        out = top_inverse_subst(f, {"V": T("a")})
        assert free_vars(out) == free_vars(f) | {"V"}


def test_complement_involution():
    l = parse_literal("~p(X, f(a))")
    assert l.complement().complement() == l
    assert l.complement() != l


@given(terms())
def test_complement_involution_random(t):
    l = Lit(False, "q", (t,))
    assert l.complement().complement() == l


def test_alpha_equivalence():
    assert alpha_equivalent(P("all X. ex Y. p(X,Y)"), P("all A. ex B. p(A,B)"))
    assert not alpha_equivalent(P("all X. ex Y. p(X,Y)"), P("all A. ex B. p(B,A)"))
    assert Forall("X", P("q(X)")) != Forall("Y", P("q(Y)"))


def test_relativizer_vars_must_occur_in_guard():
    with pytest.raises(ValueError):
        ForallRel(("X", "Y"), Atom("r", (Var("X"),)), P("true"))


def test_constants_are_nullary_functions():
    assert T("a") == Fn("a", ())
