from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecumenical.base import (
    BOT,
    Apply,
    Assume,
    Base,
    BaseError,
    DerivationError,
    add_axiom,
    axiom,
    base_to_text,
    bot_complete,
    check_derivation,
    closure,
    derivation_to_text,
    derive_witness,
    derives,
    extends,
    is_bot_complete,
    is_consistent,
    parse_base,
    parse_rule,
    rule,
)

from oracles import naive_derives
from strategies import NAMES, basics, rule_lists

p_bot = rule("p", conclusion=BOT)
contexts = st.sets(st.sampled_from(NAMES + (BOT,)), max_size=3)


def test_derives_examples():
    assert derives(Base(), {"p"}, "p")
    assert derives(Base([p_bot]), {"p"}, BOT)
    assert not derives(Base(), (), "p")


def test_discharging_rule_is_used():
    # from r under hypothesis q, infer s; q -> r is itself a rule
    S = Base([rule(("q", "r"), conclusion="s"), rule("q", conclusion="r")])
    assert derives(S, (), "s")
    d = derive_witness(S, (), "s")
    assert check_derivation(S, d) == (frozenset(), "s")
    assert isinstance(d, Apply) and d.labels[0] is not None
    leaf = d.children[0].children[0]
    assert leaf == Assume("q", d.labels[0])


def test_witness_examples():
    S = Base([axiom("p")])
    assert derive_witness(S, (), "p") == Apply(axiom("p"), ())
    assert derive_witness(S, (), "q") is None


def test_check_derivation_errors():
    S = Base([p_bot])
    with pytest.raises(DerivationError, match="unknown rule"):
        check_derivation(S, Apply(axiom("p"), ()))
    with pytest.raises(DerivationError, match="premise mismatch"):
        check_derivation(S, Apply(p_bot, (Assume("q"),)))
    with pytest.raises(DerivationError, match="ill-scoped discharge"):
        check_derivation(S, Apply(p_bot, (Assume("p", "7"),)))
    T = Base([rule(("q", "r"), conclusion="s")])
    with pytest.raises(DerivationError, match="ill-scoped discharge"):
        check_derivation(T, Apply(T.rules[0], (Assume("r", "1"),), ("1",)))


def test_consistency_examples():
    assert is_consistent(Base())
    assert not is_consistent(Base([axiom("p"), p_bot]))
    assert is_consistent(Base([p_bot]))


def test_extends_examples():
    S = Base([p_bot])
    assert extends(Base(), S)
    assert extends(S, S)
    assert not extends(Base([axiom("p")]), S)


def test_add_axiom_examples():
    assert is_consistent(add_axiom(Base(), "p"))
    assert not is_consistent(add_axiom(Base([p_bot]), "p"))
    S = Base([p_bot])
    assert extends(S, add_axiom(S, "q"))


def test_bot_complete_examples():
    assert bot_complete(Base(), ["p", "q"]) == Base([axiom("p"), axiom("q")])
    assert bot_complete(Base([p_bot]), ["p", "q"]) == Base([p_bot, axiom("q")])
    with pytest.raises(BaseError):
        bot_complete(Base([axiom("p"), p_bot]), ["p"])


def test_rule_text_format():
    r = parse_rule("(q |- p), ( |- r) => s")
    assert r == rule(("q", "p"), "r", conclusion="s")
    assert parse_rule("=> p") == axiom("p")
    for bad in ["p => s", "( |- p) =>", "( |- p), => s", "( |- P) => s", "( |- p) ( |- q) => s"]:
        with pytest.raises(BaseError):
            parse_rule(bad)


def test_base_text_ignores_comments_and_round_trips():
    S = parse_base("# header\n=> p   # an axiom\n\n(p |- q) => bot\n")
    assert len(S) == 2
    assert parse_base(base_to_text(S)) == S


def test_bases_dedupe_up_to_premise_order():
    a = rule("p", ("q", "r"), conclusion="s")
    b = rule(("q", "r"), "p", conclusion="s")
    assert Base([a, b]) == Base([a])


def test_derivation_printer():
    S = Base([rule(("q", "r"), conclusion="s"), rule("q", conclusion="r")])
    text = derivation_to_text(derive_witness(S, (), "s"))
    assert text.splitlines()[0].startswith("s  by")
    assert "hypothesis [1]" in text


@settings(max_examples=150, deadline=None)
@given(rule_lists(), contexts, basics())
def test_derives_agrees_with_naive_saturation(rules, ctx, goal):
    S = Base(rules)
    assert derives(S, ctx, goal) == naive_derives(S, ctx, goal)


@settings(max_examples=150, deadline=None)
@given(rule_lists(), contexts, basics())
def test_witness_iff_derivable(rules, ctx, goal):
    S = Base(rules)
    d = derive_witness(S, ctx, goal)
    assert (d is not None) == derives(S, ctx, goal)
    if d is not None:
        opened, concl = check_derivation(S, d)
        assert concl == goal and opened <= frozenset(ctx)


@settings(max_examples=100, deadline=None)
@given(rule_lists(), rule_lists(max_rules=3), contexts, contexts, basics())
def test_monotone_in_base_and_context(rules, more, ctx, extra, goal):
    S = Base(rules)
    if derives(S, ctx, goal):
        assert derives(S.union(more), ctx, goal)
        assert derives(S, set(ctx) | extra, goal)


@settings(max_examples=100, deadline=None)
@given(rule_lists(), st.sampled_from(NAMES))
def test_add_axiom_consistency_criterion(rules, atom):
    S = Base(rules)
    if is_consistent(S):
        assert is_consistent(add_axiom(S, atom)) == (not derives(S, {atom}, BOT))


@settings(max_examples=100, deadline=None)
@given(rule_lists(), st.permutations(NAMES))
def test_bot_complete_output(rules, order):
    S = Base(rules)
    if not is_consistent(S):
        return
    T = bot_complete(S, order)
    assert is_consistent(T) and extends(S, T)
    assert is_bot_complete(T, order)


@settings(max_examples=60, deadline=None)
@given(rule_lists(), contexts)
def test_closure_lists_exactly_the_derivable(rules, ctx):
    S = Base(rules)
    got = closure(S, ctx)
    for b in NAMES + (BOT,):
        assert (b in got) == derives(S, ctx, b)
