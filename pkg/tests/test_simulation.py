from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecumenical.base import Assume, check_derivation, is_consistent
from ecumenical.formula import BOT, FALSUM, BasicI, parse
from ecumenical.prover import NDProof, assume, check_nd, random_proof, soundness_spotcheck
from ecumenical.simulation import (
    SimulationError,
    build_N,
    completeness_roundtrip,
    consistency_of_N,
    degree,
    degree_of,
    derivation_degree,
    derivation_from_text,
    derivation_to_text,
    find_redexes,
    forward,
    gamma_star,
    is_normal,
    make_alpha,
    normalize,
    prepcomplete_mismatches,
    reduce_once,
    simulation_for,
    simulation_for_proof,
    subderivation,
)
from ecumenical.universe import build_universe, default_config

P = parse


def test_gamma_star_examples():
    assert gamma_star([], P("p")) == {P("p")}
    assert gamma_star([], P("p^c")) == {P("p^c"), P("p"), P("~p"), FALSUM}
    got = gamma_star([P("~~p")], P("p^c"))
    assert P("~p") in got and P("~~p") in got


def test_alpha_examples():
    gs = gamma_star([P("~~p")], P("p^c"))
    alpha = make_alpha(gs)
    assert alpha.atom(P("p")) == "p"
    assert alpha.atom(FALSUM) == BOT
    fresh = [alpha.atom(f) for f in gs if not isinstance(f, BasicI)]
    assert len(set(fresh)) == len(fresh)
    assert all(a.startswith("_") for a in fresh)
    assert all(alpha.formula(alpha.atom(f)) == f for f in gs)
    with pytest.raises(SimulationError):
        alpha.atom(P("q"))


def test_degree_examples():
    gs = gamma_star([], P("(q)^c & (q & r)"))
    alpha = make_alpha(gs)
    assert degree_of(alpha, "q") == 0
    assert degree_of(alpha, alpha.atom(P("q^c"))) == 2
    assert degree_of(alpha, alpha.atom(P("q & r"))) == 1
    assert degree(P("~q")) == 1 and degree(P("(q -> r)^c")) == 3


def test_N_for_classical_atom():
    N = simulation_for([], P("p^c"))
    a = N.alpha.atom
    schemas = {N.tag(r)[:2] for r in N.base}
    assert ("class-int", P("p^c")) in schemas and ("class-elim", P("p^c")) in schemas
    assert ("imp-int", P("~p")) in schemas and ("imp-elim", P("~p")) in schemas
    cint = N.rule("class-int", P("p^c"))
    assert cint.premises[0].discharge == {a(P("~p"))} and cint.premises[0].conclusion == BOT
    bot_elims = {N.tag(r)[2] for r in N.base if N.schema(r) == "bot-elim"}
    assert bot_elims == set(N.vocab)
    assert is_consistent(N.base)


def test_N_for_plain_atom_has_only_bot_elims():
    N = simulation_for([], P("p"))
    assert {N.schema(r) for r in N.base} == {"bot-elim"}


def test_N_rejects_small_vocab():
    gs = gamma_star([], P("p & q"))
    with pytest.raises(SimulationError, match="vocab too small"):
        build_N(gs, make_alpha(gs), vocab=["p", BOT])


def test_N_text_carries_provenance():
    text = simulation_for([], P("p^c")).to_text()
    assert "# schema=class-int, formula=p^c" in text
    assert "q=bot" in text


def classical_redex():
    """p^c by class-intro, immediately eliminated against an open ~p."""
    bot = NDProof("imp-elim", FALSUM, (assume(P("~~p")), assume(P("~p"), "1")))
    intro = NDProof("class-intro", P("p^c"), (bot,), ("1",))
    return NDProof("class-elim", FALSUM, (intro, assume(P("~p"))))


def test_classical_redex_reduces_in_one_step():
    proof = classical_redex()
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    reds = find_redexes(d, N)
    assert [r.kind for r in reds] == ["maximum-formula"]
    assert reds[0].atom == N.alpha.atom(P("p^c"))
    run = normalize(d, N)
    assert run.steps == 1 and is_normal(run.result, N)
    assert N.schema(run.result.rule) == "imp-elim"
    assert check_derivation(N.base, run.result) == (frozenset({N.alpha.atom(P("~~p")), N.alpha.atom(P("~p"))}), BOT)


def segment_proof():
    """and-intro in both branches of an or-elim, then and-elim on its result."""
    pq = P("p & q")
    left = NDProof("and-intro", pq, (assume(P("p"), "a"), assume(P("q"))))
    right = NDProof("and-intro", pq, (assume(P("p")), assume(P("q"), "b")))
    oe = NDProof("or-elim", pq, (assume(P("p | q")), left, right), ("a", "b"))
    return NDProof("and-elim-l", P("p"), (oe,))


def test_maximum_segment_through_or_elim():
    proof = segment_proof()
    check_nd(proof)
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    reds = find_redexes(d, N)
    assert reds and {r.kind for r in reds} == {"maximum-segment"}
    assert {r.vertex for r in reds} == {(0,)}
    assert {r.atom for r in reds} == {N.alpha.atom(P("p & q"))}
    before = check_derivation(N.base, d)
    for strategy in ("degree", "innermost"):
        run = normalize(d, N, strategy)
        assert is_normal(run.result, N)
        opened, concl = check_derivation(N.base, run.result)
        assert concl == before[1] and opened <= before[0]


def test_permutation_duplicates_the_elimination():
    proof = segment_proof()
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    permuted = reduce_once(d, find_redexes(d, N)[0], N)
    assert N.schema(permuted.rule) == "or-elim"
    assert [N.schema(c.rule) for c in permuted.children[1:]] == ["and-elim-1", "and-elim-1"]


def test_bot_elim_then_and_elim_collapses():
    proof = NDProof("and-elim-l", P("p"), (NDProof("bot-elim", P("p & q"), (assume(FALSUM),)),))
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    (r,) = find_redexes(d, N)
    out = reduce_once(d, r, N)
    assert N.schema(out.rule) == "bot-elim" and out.conclusion == "p"
    assert out.children == (Assume(BOT),)


def test_stale_redex_rejected():
    proof = classical_redex()
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    r = find_redexes(d, N)[0]
    done = reduce_once(d, r, N)
    with pytest.raises(SimulationError, match="stale"):
        reduce_once(done, r, N)


def test_subderivation_paths():
    proof = classical_redex()
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    assert subderivation(d, ()) == d
    assert subderivation(d, (1,)) == Assume(N.alpha.atom(P("~p")))
    with pytest.raises(SimulationError):
        subderivation(d, (5,))


def test_normal_input_is_unchanged():
    proof = NDProof("and-intro", P("p & q"), (assume(P("p")), assume(P("q"))))
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    assert normalize(d, N).result == d


def test_atomic_text_round_trip():
    proof = segment_proof()
    N = simulation_for_proof(proof)
    d = normalize(forward(proof, N), N).result
    text = derivation_to_text(d, N)
    assert derivation_from_text(text, N) == d
    assert derivation_to_text(derivation_from_text(text, N), N) == text


@pytest.mark.parametrize(
    "ctx, goal",
    [([], "p^c"), (["p"], "q"), (["~~p"], "p^c"), (["p & q"], "q & p")],
)
def test_consistency_of_N(ctx, goal):
    N = simulation_for([P(c) for c in ctx], P(goal))
    assert consistency_of_N(N)


@pytest.mark.parametrize(
    "ctx, goal, inconsistent",
    [(["~~p"], "p^c", False), (["p & q"], "q & p", False), (["p", "~p"], "q^c", True)],
)
def test_roundtrip_examples(ctx, goal, inconsistent):
    context = [P(c) for c in ctx]
    rt = completeness_roundtrip(context, P(goal))
    hyps, concl = check_nd(rt.proof)
    assert concl == P(goal) and hyps <= set(context)
    assert rt.inconsistent_branch == inconsistent
    if inconsistent:
        assert rt.proof.rule == "bot-elim"


def test_roundtrip_refuses_invalid_sequent():
    with pytest.raises(SimulationError, match="precondition"):
        completeness_roundtrip([], P("p^c | ~p"))


def test_roundtrip_output_is_sound_in_default_universe():
    U = build_universe(default_config(["p", "q"]))
    rt = completeness_roundtrip([P("p & q")], P("(q & p)^c"))
    assert soundness_spotcheck(U, rt.proof)


@pytest.mark.parametrize(
    "ctx, goal",
    [([], "p^c"), (["~~p"], "p^c"), (["p"], "p^c"), (["p & q"], "q & p"), (["p | q"], "q | p")],
)
def test_prepcomplete_sampled(ctx, goal):
    assert prepcomplete_mismatches([P(c) for c in ctx], P(goal)) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_reductions_are_sound(seed):
    proof = random_proof(random.Random(seed))
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    opened, concl = check_derivation(N.base, d)
    for r in find_redexes(d, N):
        o2, c2 = check_derivation(N.base, reduce_once(d, r, N))
        assert c2 == concl and o2 <= opened


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_normalization_properties(seed):
    proof = random_proof(random.Random(seed))
    N = simulation_for_proof(proof)
    d = forward(proof, N)
    opened, concl = check_derivation(N.base, d)
    for strategy in ("degree", "innermost"):
        run = normalize(d, N, strategy)
        o2, c2 = check_derivation(N.base, run.result)
        assert c2 == concl and o2 <= opened
        assert is_normal(run.result, N) and derivation_degree(run.result, N) == 0
        assert all(after < before for before, after in run.phases)
        # normal derivations not ending in an introduction keep a hypothesis
        assert consistency_of_N(N, samples=[run.result])
