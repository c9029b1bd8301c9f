from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecumenical.base import BOT, axiom, derives, extends, is_consistent, rule
from ecumenical.universe import (
    UniverseConfig,
    UniverseError,
    build_universe,
    default_config,
    extensions_of,
    generate_pool,
    parse_config,
)

from oracles import NaiveUniverse

p_bot = rule("p", conclusion=BOT)


@pytest.fixture(scope="module")
def U0():
    return build_universe(default_config(["p", "q"]))


@pytest.fixture(scope="module")
def three():
    cfg = UniverseConfig(vocab=("p",), generate=False, extra_rules=(axiom("p"), p_bot))
    return build_universe(cfg)


def test_three_base_universe(three):
    got = {frozenset(three.rules_of(m)) for m in three.bases}
    assert got == {frozenset(), frozenset([axiom("p")]), frozenset([p_bot])}


def test_extensions_in_three_base_universe(three):
    ax = three.base_id(three.base(0).union([axiom("p")]))
    assert extensions_of(three, ax) == [ax]
    assert extensions_of(three, 0) == list(three.bases)


def test_empty_base_always_present(U0):
    assert U0.bases[0] == 0


def test_pool_bound():
    rules = tuple(rule("p", conclusion=c) for c in ["q", "r", "s", "t", BOT]) + tuple(
        axiom(a) for a in "abcdefghijkl"
    )
    cfg = UniverseConfig(vocab=tuple("abcdefghijklpqrst"), generate=False, extra_rules=rules)
    assert len(rules) == 17
    with pytest.raises(UniverseError, match="pool-too-large"):
        build_universe(cfg)


def test_default_pool_contents(U0):
    pool = set(U0.pool)
    for a in "pq":
        assert axiom(a) in pool and rule(a, conclusion=BOT) in pool
    assert U0.k == 12


def test_pool_pruning():
    pool = generate_pool(default_config(["p", "q"], max_premises=2, max_discharge=1))
    for r in pool:
        assert not any(not pr.discharge and pr.conclusion == BOT for pr in r.premises)
        assert not any(r.conclusion in pr.discharge for pr in r.premises)
        assert not any(not pr.discharge and pr.conclusion == r.conclusion for pr in r.premises)


def test_base_count_matches_naive_oracle(U0):
    # frozen from the subset-enumerating oracle in tests/oracles.py
    assert len(NaiveUniverse(U0.pool).bases) == 695
    assert len(U0.bases) == 695


def test_bases_are_consistent_and_ordered(U0):
    masks = list(U0.bases)
    assert masks == sorted(masks, key=lambda m: (bin(m).count("1"), m))
    for m in masks[::37]:
        assert is_consistent(U0.base(m))


def test_table_and_search_routes_agree():
    cfg = default_config(["p", "q"], max_discharge=0)
    a = build_universe(cfg, route="table")
    b = build_universe(cfg, route="search")
    assert a.bases == b.bases
    for name in a.basics:
        assert np.array_equal(a.derivable[name], b.derivable[name])
        assert np.array_equal(a.refutes[name], b.refutes[name])


def test_unknown_base_rejected(three):
    with pytest.raises(UniverseError):
        three.extensions_of(3)


def test_box_and_diamond_match_definitions(U0):
    rng = np.random.default_rng(3)
    X = rng.random(U0.size) < 0.6
    box, dia = U0.box(X), U0.diamond(X)
    for m in U0.bases[::11]:
        ext = U0.extensions_of(m)
        assert box[m] == all(X[e] for e in ext)
        assert dia[m] == any(X[e] for e in ext)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_extension_is_a_partial_order_preserving_derivability(U0, data):
    a = data.draw(st.sampled_from(U0.bases))
    b = data.draw(st.sampled_from(U0.extensions_of(a)))
    c = data.draw(st.sampled_from(U0.extensions_of(b)))
    assert U0.is_extension(a, c) and U0.is_extension(0, a)
    Sa, Sb = U0.base(a), U0.base(b)
    assert extends(Sa, Sb)
    for name in U0.basics:
        if derives(Sa, (), name):
            assert derives(Sb, (), name)


def test_config_text_and_fingerprint():
    cfg = parse_config("vocab=q,p; max_discharge=0; generate=true")
    assert cfg.vocab == ("p", "q") and cfg.max_discharge == 0
    assert cfg.fingerprint() == parse_config("max_discharge=0;vocab=p,q").fingerprint()
    assert cfg.fingerprint() != default_config(["p", "q"]).fingerprint()
    for bad in ["max_premises=1", "vocab=p;max_premises=x", "vocab=p;colour=red", "vocab=bot", "vocab=p;junk"]:
        with pytest.raises(UniverseError):
            parse_config(bad)


def test_base_id_round_trip(U0):
    for m in U0.bases[::50]:
        assert U0.base_id(U0.base(m)) == m
    with pytest.raises(UniverseError):
        U0.base_id(U0.base(0).union([axiom("p"), p_bot]))
