from __future__ import annotations

from ecumenical.formula import parse
from ecumenical.kripke import KripkeOracle, kripke_valid, partial_orders

P = parse


def test_partial_order_counts():
    # labelled posets on 1, 2, 3 points
    assert [len(list(partial_orders(n))) for n in (1, 2, 3)] == [1, 3, 19]


def test_model_and_point_counts():
    K = KripkeOracle(["p", "q"])
    assert (K.models, K.points) == (564, 1650)


def test_known_theorems():
    for text in ["p -> p", "~~(p | ~p)", "(p -> q) -> ~q -> ~p", "p & q -> q & p", "~~~p -> ~p"]:
        assert kripke_valid(P(text)), text


def test_known_non_theorems():
    for text in ["p | ~p", "~~p -> p", "((p -> q) -> p) -> p", "~p | ~~p", "(p -> q) | (q -> p)"]:
        assert not kripke_valid(P(text)), text


def test_two_worlds_suffice_for_excluded_middle_but_one_does_not():
    assert KripkeOracle(["p"], max_worlds=1).valid(P("p | ~p"))
    assert not KripkeOracle(["p"], max_worlds=2).valid(P("p | ~p"))
