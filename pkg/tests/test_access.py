import pytest
from figures import load_outline
from oracles import structures

from tabipol.access import (
    AccessOptions,
    BindingPattern,
    access_interpolate,
    aipol,
    binding_patterns,
    check_aci,
    covered,
    covered_set,
    make_aci_context,
    uncovered,
    verify_access,
)
from tabipol.clausify import to_rqfo
from tabipol.logic import FALSE, alpha_equivalent
from tabipol.syntax import parse_formula
from tabipol.tableau import assign_sides

P = parse_formula
FG = P("all X. (~r(X) | ex Y. (s(X,Y) & true))")
FIGS = load_outline()
CTX = make_aci_context(FG, FG)


def sided(name):
    return assign_sides(FIGS[name], CTX.red, CTX.blue, "keep")


class TestPatterns:
    def test_example(self):
        got = binding_patterns(P("all X. (~r(X) | ex Y. ex Z. (s(X,Y,Z) & true))"))
        assert got == {BindingPattern("-", "r"), BindingPattern("+", "s", {1})}

    def test_constant_argument_is_input(self):
        got = binding_patterns(P("ex Y. (s(a,Y) & true)"))
        assert got == {BindingPattern("+", "s", {1})}

    def test_fewer_inputs_cover_more(self):
        assert covered(BindingPattern("+", "s", {1}), BindingPattern("+", "s"))
        assert not covered(BindingPattern("+", "s"), BindingPattern("+", "s", {1}))

    def test_sign_and_predicate_must_match(self):
        assert not covered(BindingPattern("+", "s"), BindingPattern("-", "s"))
        assert not covered(BindingPattern("+", "s"), BindingPattern("+", "r"))

    def test_sets(self):
        bs = [BindingPattern("+", "s", {1, 2}), BindingPattern("-", "r")]
        assert covered_set(bs, [BindingPattern("+", "s", {2}), BindingPattern("-", "r")])
        assert uncovered(bs, [BindingPattern("+", "s", {2})]) == [BindingPattern("-", "r")]

    def test_validation(self):
        with pytest.raises(ValueError):
            BindingPattern("*", "s")
        with pytest.raises(ValueError):
            BindingPattern("+", "s", {0})

    def test_str(self):
        assert str(BindingPattern("+", "s", {2, 1})) == "<+,s,{1,2}>"


class TestCheckAci:
    def test_hyper_figure(self):
        assert check_aci(sided("hyper"), CTX).ok

    def test_start_tableau_fails(self):
        d = check_aci(sided("conn1-1"), CTX)
        assert not d.ok and not d.passed("leaf-only")

    def test_only_contiguity_missing(self):
        assert check_aci(sided("conn1-4"), CTX).failed() == ["contiguous"]

    @pytest.mark.parametrize("name", ["conn1-6", "conn2-5", "conn3-7"])
    def test_final_stages(self, name):
        assert check_aci(sided(name), CTX).ok


class TestAipol:
    GOLDEN = "all V2. (~r(V2) | (ex V1. (s(V2,V1) & true)))"

    def test_golden_from_hyper_figure(self):
        assert alpha_equivalent(aipol(sided("hyper"), CTX), to_rqfo(P(self.GOLDEN)))

    @pytest.mark.parametrize("name", ["conn1-6", "conn2-5", "conn3-7"])
    def test_final_stages_agree(self, name):
        assert alpha_equivalent(aipol(sided(name), CTX), to_rqfo(P(self.GOLDEN)))

    @pytest.mark.parametrize("prover", ["hyper", "connection"])
    def test_pipeline(self, prover):
        r = access_interpolate(FG, FG, AccessOptions(prover=prover))
        assert alpha_equivalent(r.interpolant, to_rqfo(P(self.GOLDEN)))
        assert r.verification.ok

    def test_false_like_premise(self):
        r = access_interpolate(P("ex X. (r(X) & false)"), P("ex X. (q(X) & true)"))
        assert r.interpolant == FALSE and r.verification.ok


class TestVerifyAccess:
    def test_golden_passes(self):
        assert verify_access(FG, FG, P(TestAipol.GOLDEN)).ok

    def test_extra_constant(self):
        rep = verify_access(FG, FG, P("all X. (~r(X) | ex Y. (s(X,Y) & q(a)))"))
        assert rep.checks["const(H) in const(F)&const(G)"] is False
        assert rep.checks["existential patterns covered by G"] is False

    def test_universal_pattern_needs_f(self):
        f = P("ex X. (r(X) & true)")
        g = P("ex X. (r(X) & true)")
        rep = verify_access(f, g, P("all X. (~r(X) | false)"))
        assert rep.checks["universal patterns covered by F"] is False

    def test_more_inputs_in_h_are_covered(self):
        f = P("all X. (~r(X) | ex Y. (s(X,Y) & true))")
        g = P("ex X. ex Y. (s(X,Y) & true)")
        rep = verify_access(f, g, P("all X. (~r(X) | ex Y. (s(X,Y) & true))"))
        assert rep.checks["existential patterns covered by G"] is True

    def test_not_rqfo(self):
        rep = verify_access(FG, FG, P("all X. r(X)"))
        assert rep.checks["rqfo"] is False and not rep.ok


PAIRS = [
    ("all X. (~r(X) | ex Y. (s(X,Y) & q(Y)))", "all X. (~r(X) | ex Y. (s(X,Y) & true))"),
    ("ex X. (r(X) & q(X))", "ex X. (r(X) & true)"),
    ("(all X. (~r(X) | q(X))) & (ex Y. (r(Y) & true))", "ex Z. (q(Z) & true)"),
    ("r(a) & all X. (~r(X) | q(X))", "q(a)"),
]


@pytest.mark.parametrize("f, g", PAIRS)
def test_interpolant_in_finite_models(f, g):
    """F -> H and H -> G in every structure of size <= 2; H is an RQFO sentence."""
    f, g = P(f), P(g)
    h = access_interpolate(f, g).interpolant
    fr, gr, hr = to_rqfo(f), to_rqfo(g), to_rqfo(h)
    for n in (1, 2):
        for m in structures({"r": 1, "q": 1, "s": 2}, {"a": 0}, n):
            if m.holds(fr):
                assert m.holds(hr)
            if m.holds(hr):
                assert m.holds(gr)
