import json

import pytest
from figures import DATA
from hypothesis import given
from strategies import formulas

from tabipol.logic import And, Atom, Forall, Not, Or, Var
from tabipol.syntax import (
    ParseError,
    TableauFormatError,
    parse_formula,
    parse_literal,
    parse_tableau,
    print_formula,
    print_tableau,
)
from tabipol.tableau import is_closed


def test_plain_ast_for_relativized_shape():
    f = parse_formula("all X. (~r(X) | ex Y. (s(X,Y) & true))")
    assert isinstance(f, Forall) and isinstance(f.body, Or)


def test_nullary_atom():
    assert parse_formula("p") == Atom("p", ())


def test_arity_conflict_has_span():
    with pytest.raises(ParseError) as e:
        parse_formula("p(X) & p(X,Y)")
    assert e.value.span is not None and e.value.span.start <= e.value.span.end


def test_syntax_error_span():
    with pytest.raises(ParseError) as e:
        parse_formula("p & (q |")
    assert e.value.span.start == len("p & (q |")


def test_arities_shared_across_inputs():
    ar: dict = {}
    parse_formula("p(a)", ar)
    with pytest.raises(ParseError):
        parse_formula("p(a, b)", ar)


def test_print_examples():
    assert print_formula(And((Atom("p"), Atom("q")))) == "p & q"
    x = Var("X")
    f = Forall("X", Or((Not(Atom("r", (x,))), Atom("p", (x,)))))
    assert print_formula(f) == "all X. (~r(X) | p(X))"
    assert print_formula(parse_formula("(p | q) & r")) == "(p | q) & r"


def test_sugar_and_precedence():
    assert parse_formula("p -> q") == parse_formula("~p | q")
    assert parse_formula("~p & q | r") == Or((And((Not(Atom("p")), Atom("q"))), Atom("r")))
    assert parse_formula("a = b") == parse_formula("eq(a, b)")


@given(formulas())
def test_round_trip(f):
    assert parse_formula(print_formula(f)) == f


def test_literal_parse():
    l = parse_literal("~s(X, f(a))")
    assert not l.positive and l.pred == "s" and str(l) == "~s(X,f(a))"


class TestTableauFormat:
    def test_two_node_closed(self):
        t = parse_tableau('{"children": [{"lit": "p", "children": [{"lit": "~p"}]}]}')
        assert t.size() == 3 and is_closed(t)

    def test_example_fixture(self):
        t = parse_tableau((DATA / "figures" / "hyper.tab").read_text())
        labelled = [n for n in t.nodes() if n.lit is not None]
        assert len(labelled) == 15
        assert {n.side for n in labelled} == {"red", "blue"}
        assert is_closed(t)

    def test_round_trip_identity(self):
        text = (DATA / "figures" / "conn1-1.tab").read_text()
        assert print_tableau(parse_tableau(text)) == text

    def test_missing_lit(self):
        with pytest.raises(TableauFormatError):
            parse_tableau('{"children": [{"side": "red"}]}')

    def test_unknown_side(self):
        with pytest.raises(TableauFormatError):
            parse_tableau('{"children": [{"lit": "p", "side": "green"}]}')

    def test_malformed_json(self):
        with pytest.raises(TableauFormatError):
            parse_tableau("{")

    def test_tags_survive(self):
        obj = {"children": [{"lit": "d_Le", "side": "red", "tag": "Le:1"}]}
        t = parse_tableau(json.dumps(obj))
        assert json.loads(print_tableau(t))["children"][0]["tag"] == "Le:1"
