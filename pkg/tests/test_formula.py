from __future__ import annotations

import pytest
from hypothesis import given, settings

from ecumenical.formula import (
    BOT,
    FALSUM,
    And,
    BasicC,
    BasicI,
    Classical,
    FormulaError,
    Imp,
    Or,
    ParseError,
    complexity,
    dn_translate,
    enumerate_by_complexity,
    enumerate_formulas,
    is_intuitionistic,
    parse,
    render,
    subformulas,
)

from strategies import formulas

p, q = BasicI("p"), BasicI("q")


def test_parse_examples():
    assert parse("p^c -> ~~p") == Imp(BasicC("p"), Imp(Imp(p, FALSUM), FALSUM))
    assert parse("(p & q)^c") == Classical(And(p, q))
    assert parse("bot") == FALSUM


def test_parse_defaults_and_precedence():
    assert parse("p^i") == p
    assert parse("(p)^c") == BasicC("p")
    assert parse("bot^c") == BasicC(BOT)
    assert parse("p -> q -> p") == Imp(p, Imp(q, p))
    assert parse("p | q & p") == Or(p, And(q, p))
    assert parse("p & q | p -> q") == Imp(Or(And(p, q), p), q)
    assert parse("~p & q") == And(Imp(p, FALSUM), q)


def test_iff_needs_opt_in():
    with pytest.raises(ParseError):
        parse("p <-> q")
    assert parse("p <-> q", allow_iff=True) == And(Imp(p, q), Imp(q, p))


def test_internal_names_need_opt_in():
    with pytest.raises(ParseError):
        parse("_1 -> p")
    assert parse("_1 -> p", allow_internal=True) == Imp(BasicI("_1"), p)


@pytest.mark.parametrize(
    "text, offset",
    [("p &", 3), ("p q", 2), ("(p", 2), ("p $ q", 2), ("", 0), ("(p^c)^c", 5), ("p^i^c", 3)],
)
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse("p &")
    assert "(" in info.value.expected and "~" in info.value.expected


def test_classical_wrapper_invariants():
    with pytest.raises(FormulaError):
        Classical(Classical(And(p, q)))
    with pytest.raises(FormulaError):
        Classical(p)


def test_render_examples():
    assert render(Classical(And(p, q))) == "(p & q)^c"
    assert render(Imp(p, FALSUM)) == "~p"
    assert render(BasicC("p")) == "p^c"
    assert render(Imp(Imp(p, q), q)) == "(p -> q) -> q"


def test_complexity_examples():
    assert complexity(p) == 0
    assert complexity(BasicC("p")) == 1
    assert complexity(parse("~p")) == 1
    assert complexity(parse("(p -> q)^c")) == 2


def test_subformula_examples():
    assert subformulas(p) == {p}
    assert subformulas(Imp(BasicC("p"), q)) == {Imp(BasicC("p"), q), BasicC("p"), p, q}
    assert subformulas(Classical(And(p, q))) == {Classical(And(p, q)), And(p, q), p, q}


def test_dn_translate_examples():
    nn = lambda f: Imp(Imp(f, FALSUM), FALSUM)  # noqa: E731
    assert dn_translate(BasicC("p")) == nn(p)
    assert dn_translate(Classical(And(p, q))) == nn(And(p, q))
    assert dn_translate(Or(p, q)) == Or(p, q)


def test_is_intuitionistic_examples():
    assert is_intuitionistic(parse("~~p"))
    assert not is_intuitionistic(parse("p^c"))
    assert not is_intuitionistic(parse("p -> q^c"))


def test_enumeration_counts():
    # 3 basics then 3*3*3 binaries, each optionally marked, plus 2 marked atoms
    assert len(list(enumerate_formulas(["p", "q"], 0))) == 5
    assert len(list(enumerate_formulas(["p", "q"], 1, classical=False))) == 3 + 27
    assert len(list(enumerate_formulas(["p", "q"], 2, classical=False))) == 3 + 27 + 2 * 27 * 9


def test_enumerate_by_complexity_respects_the_measure():
    fs = list(enumerate_by_complexity(["p", "q"], 2))
    assert len(set(fs)) == len(fs)
    assert all(complexity(f) <= 2 for f in fs)
    assert BasicC("p") in fs and Classical(Imp(p, q)) in fs
    assert Classical(Imp(BasicC("p"), q)) not in fs
    brute = {f for f in enumerate_formulas(["p", "q"], 2) if complexity(f) <= 2}
    # the connective-bounded enumerator has no bot^c leaf
    assert brute == {f for f in fs if BasicC(BOT) not in subformulas(f)}


@given(formulas())
def test_render_parse_round_trip(f):
    assert parse(render(f)) == f


@given(formulas())
def test_complexity_counts_classical_marks(f):
    if isinstance(f, Classical):
        assert complexity(f) == complexity(f.inner) + 1
    if isinstance(f, BasicC):
        assert complexity(f) == complexity(BasicI(f.name)) + 1


@given(formulas())
def test_dn_translate_idempotent_and_intuitionistic(f):
    g = dn_translate(f)
    assert is_intuitionistic(g)
    assert dn_translate(g) == g


@settings(max_examples=50)
@given(formulas())
def test_subformulas_closed_downward(f):
    subs = subformulas(f)
    assert f in subs
    for g in subs:
        assert subformulas(g) <= subs
