"""The theorem and property table, shared by the CLI and the acceptance tests.

Each check returns a :class:`Check`; the criterion functions bundle the
checks of one acceptance criterion.  Everything is deterministic: random
material comes from seeded generators.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import base as B
from .formula import (
    BOT,
    FALSUM,
    And,
    BasicC,
    BasicI,
    Classical,
    Imp,
    Or,
    enumerate_by_complexity,
    enumerate_formulas,
    neg,
    parse,
    render,
    to_classical,
)
from .kripke import KripkeOracle
from .prover import check_nd, decide_ipc, decide_strong, random_proof, soundness_spotcheck
from .semantics import GLOBAL, Evaluator, check_monotonic, find_weak_counterexample, weak_valid
from .simulation import (
    completeness_roundtrip,
    consistency_of_N,
    find_redexes,
    forward,
    normalize,
    simulation_for_proof,
)
from .universe import Universe, UniverseConfig, build_universe, default_config, generate_pool

P, Q = BasicI("p"), BasicI("q")


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f"  {self.detail}" if self.detail else ""
        return f"{status}  [{self.criterion}] {self.name}{tail}"


def default_universe() -> Universe:
    return build_universe(default_config(["p", "q"]))


def _everywhere(U: Universe, X: np.ndarray) -> bool:
    return bool(X[U.consistent].all())


def _implies(U: Universe, X: np.ndarray, Y: np.ndarray) -> bool:
    return _everywhere(U, ~X | Y)


def _first_failure(U: Universe, items, test: Callable) -> Optional[str]:
    for item in items:
        if not test(item):
            return item if isinstance(item, str) else _describe(item)
    return None


def _describe(item) -> str:
    if isinstance(item, tuple):
        return " ; ".join(render(f) for f in item)
    return render(item)


def _check(criterion: int, name: str, failure: Optional[str], ok_detail: str = "") -> Check:
    if failure is None:
        return Check(criterion, name, True, ok_detail)
    return Check(criterion, name, False, f"fails on {failure}")


SHAPES = (P, And(P, Q), Imp(P, Q), Or(P, Q))


# ---------------------------------------------------------------- criterion 1


def weak_theorem_checks(U: Optional[Universe] = None) -> list:
    U = U or default_universe()
    ev = Evaluator(U, "weak")
    X, local, glob = ev.truth, ev.local_entails, ev.global_entails
    box = U.box
    small = list(enumerate_by_complexity(["p", "q"], 1))
    medium = list(enumerate_by_complexity(["p", "q"], 2))
    compounds = [f for f in medium if isinstance(f, (And, Or, Imp))]
    intuitionistic = list(enumerate_formulas(["p", "q"], 2, classical=False))
    basics = [BasicI(b) for b in ("p", "q", BOT)]
    monotone_here = {f: ~X(f) | box(X(f)) for f in medium}
    out = []

    def add(name, failure, ok_detail=""):
        out.append(_check(1, name, failure, ok_detail))

    add("lemma bot", _first_failure(U, [FALSUM, BasicC(BOT)], lambda f: not X(f)[U.consistent].any()))
    add("thm intimpliesclasatom", _first_failure(U, basics, lambda b: _everywhere(U, local([b], BasicC(b.name)))))
    add("thm intimpliesclas", _first_failure(U, compounds, lambda f: _everywhere(U, local([f], Classical(f)))),
        f"{len(compounds)} compound formulas")

    # collapse where both sides are monotonic at every extension
    def collapse(pair):
        g, f = pair
        hyp = box(monotone_here[g]) & box(monotone_here[f])
        return _implies(U, hyp, local([g], f) == glob([g], f))

    pairs = [(g, f) for g in small for f in small]
    plain = list(enumerate_formulas(["p", "q"], 1, classical=False))
    plain_pairs = [(g, f) for g in plain for f in plain]
    failure = _first_failure(U, plain_pairs, lambda pr: _everywhere(U, local([pr[0]], pr[1]) == glob([pr[0]], pr[1])))
    add("thm monotoniccollapse", failure or _first_failure(U, pairs, collapse),
        f"{len(plain_pairs)} intuitionistic pairs, {len(pairs)} mixed pairs")

    violation = check_monotonic(U, BasicC("p"))
    expected = (0, U.base_id(U.core.union([B.rule("p", conclusion=BOT)])))
    stray = _first_failure(U, intuitionistic, lambda f: check_monotonic(U, f) is None)
    if violation != expected:
        add("thm monotonicity", f"p^c violation {violation}, expected {expected}")
    else:
        add("thm monotonicity", stray,
            f"p^c violated at ({U.describe_base(0)}, {U.describe_base(expected[1])}); "
            f"{len(intuitionistic)} intuitionistic formulas monotonic")

    add("lemma localimpliesglobal", _first_failure(U, pairs, lambda pr: _implies(U, local([pr[0]], pr[1]), glob([pr[0]], pr[1]))))
    add("lemma globaltheoremimplieslocaltheorem", _first_failure(U, medium, lambda f: _implies(U, glob([], f), X(f))))
    add("lemma newsimplification", _first_failure(U, medium, lambda f: _implies(U, box(~X(f)), box(X(neg(f))))))
    add("lemma globalmodusponens", _first_failure(
        U, pairs, lambda pr: _implies(U, glob([], pr[0]) & glob([pr[0]], pr[1]), glob([], pr[1]))))
    add("lemma mon", _first_failure(
        U, pairs,
        lambda pr: _implies(U, X(pr[0]) & monotone_here[pr[0]] & glob([pr[0]], pr[1]), X(pr[1]) & glob([], pr[1]))))

    def neg_chain(p):
        refutes = U.refutes[p.name] & U.consistent
        sets = (local([p], FALSUM), glob([p], FALSUM), X(neg(p)))
        return all(_everywhere(U, s == refutes) for s in sets)

    add("lemma neg", _first_failure(U, [P, Q], neg_chain))
    add("cor class-iff-not-int", _first_failure(
        U, [P, Q], lambda p: _everywhere(U, X(BasicC(p.name)) == ~local([p], FALSUM))))
    add("lemma p^c-implies-extension", _first_failure(
        U, medium, lambda f: _everywhere(U, ~local([f], FALSUM) == U.diamond(X(f)))))

    def same_extensions(pr):
        g, f = pr
        fixed = (box(X(g)) | box(~X(g))) & (box(X(f)) | box(~X(f)))
        agree = (local([g], f) == glob([g], f)) & (local([g], f) == (~X(g) | X(f)))
        return _implies(U, fixed, box(agree))

    add("lemma sameextensionsproperty", _first_failure(U, pairs, same_extensions))

    completions = sorted({U.base_id(B.bot_complete(U.base(m), U.config.vocab)) for m in U.bases})

    def persists(f):
        stable = (X(f) & box(X(f))) | (~X(f) & box(~X(f)))
        return all(stable[m] for m in completions)

    add("lemma maximalconsistentpersistency", _first_failure(U, medium, persists),
        f"{len(completions)} completions x {len(medium)} formulas")

    def two_global(A):
        dn = neg(neg(A))
        return weak_valid(U, [to_classical(A)], dn) and weak_valid(U, [dn], to_classical(A))

    add("thm twoglobalequivalences", _first_failure(U, SHAPES, two_global))
    acai = ev.local_entails([BasicC("p")], neg(neg(P)))[0]
    add("thm Acai", None if not acai else "p^c |=L ~~p at the empty base",
        "p^c |=L ~~p fails at the empty base")
    add("thm ic", _first_failure(U, SHAPES, lambda A: _everywhere(U, local([neg(neg(A))], to_classical(A)))))
    add("thm mp", _first_failure(U, SHAPES, lambda A: _everywhere(U, X(Or(to_classical(A), neg(A))))))
    peirce = [Imp(Imp(Imp(A, Bf), A), to_classical(A)) for A in SHAPES for Bf in (P, Q, FALSUM)]
    add("thm pl", _first_failure(U, peirce, lambda f: _everywhere(U, X(f))))

    A, Bc = neg(P), BasicC("p")
    C = Or(neg(P), neg(neg(P)))
    premises = [Or(A, Bc), Imp(A, C), Imp(Bc, C)]
    found = find_weak_counterexample(U, premises, C, GLOBAL)
    if not all(weak_valid(U, [], g) for g in premises):
        add("proposition disjunction elimination", "a premise is not valid")
    elif found is None or found[0] != 0 or ev.truth(C)[0]:
        add("proposition disjunction elimination", f"counterexample {found and found[0]}")
    else:
        add("proposition disjunction elimination", None,
            f"premises valid; {render(C)} refuted at the empty base")
    return out


# ---------------------------------------------------------------- criterion 2


def strong_weak_contrast(U: Optional[Universe] = None) -> list:
    U = U or default_universe()
    lem = Or(BasicC("p"), neg(P))
    out = [
        Check(2, "decide_strong rejects p^c | ~p", not decide_strong([], lem)),
        Check(2, "weak_valid accepts p^c | ~p in the universe", weak_valid(U, [], lem)),
        Check(2, "decide_strong accepts ecumenical Peirce",
              decide_strong([], parse("((p -> q) -> p) -> p^c"))),
    ]
    for A in SHAPES:
        c, dn = to_classical(A), neg(neg(A))
        ok = decide_strong([], Imp(c, dn)) and decide_strong([], Imp(dn, c))
        out.append(Check(2, f"decide_strong accepts {render(c)} <-> {render(dn)}", ok))
    return out


# ---------------------------------------------------------------- criterion 3


def decider_oracle_agreement(max_connectives: int = 3) -> list:
    oracle = KripkeOracle(["p", "q"], 3)
    formulas = list(enumerate_formulas(["p", "q"], max_connectives, classical=False))
    bad = [f for f in formulas if decide_ipc([], f) != oracle.valid(f)]
    detail = f"{len(formulas)} formulas, {oracle.models} models"
    if bad:
        detail += f"; first disagreement {render(bad[0])}"
    return [Check(3, "decide_ipc agrees with the 3-world Kripke oracle", not bad, detail)]


# ---------------------------------------------------------------- criterion 4


def soundness_checks(U: Optional[Universe] = None, count: int = 50, seed: int = 4) -> list:
    U = U or default_universe()
    rng = random.Random(seed)
    failures = []
    for i in range(count):
        proof = random_proof(rng, ("p", "q"), max_depth=5)
        hyps, concl = check_nd(proof)
        ctx = sorted(hyps, key=render)
        if not (decide_strong(ctx, concl) and soundness_spotcheck(U, proof)):
            failures.append(i)
    return [Check(4, f"{count} random proofs are strongly valid", not failures,
                  f"failing indices {failures}" if failures else "")]


# ---------------------------------------------------------------- criterion 5


CURATED_SEQUENTS = (
    (("~~p",), "p^c"),
    (("p",), "p^c"),
    ((), "((p -> q) -> p) -> p^c"),
    (("p & q",), "q & p"),
    (("p | q",), "q | p"),
    (("p -> q", "q -> r"), "p -> r"),
    (("p & (q | r)",), "(p & q) | (p & r)"),
    (("(p & q) -> r",), "p -> q -> r"),
    (("p", "~p"), "q^c"),
    ((), "p^c -> ~~p"),
    ((), "(p & q)^c -> ~~(p & q)"),
    (("(p | q)^c",), "~~(p | q)"),
)


def completeness_checks(strategy: str = "degree") -> list:
    out = []
    for ctx_text, goal_text in CURATED_SEQUENTS:
        ctx = [parse(c) for c in ctx_text]
        goal = parse(goal_text)
        label = f"{', '.join(ctx_text)} |- {goal_text}".strip()
        try:
            rt = completeness_roundtrip(ctx, goal, strategy)
            hyps, concl = check_nd(rt.proof)
            ok = concl == goal and hyps <= set(ctx)
            detail = "via inconsistent context" if rt.inconsistent_branch else ""
        except ValueError as exc:
            ok, detail = False, str(exc)
        out.append(Check(5, f"round trip {label}", ok, detail))
    return out


# ---------------------------------------------------------------- criterion 6


@dataclass
class NormalizationStats:
    derivations: int = 0
    steps: int = 0
    phases: int = 0
    overshoots: int = 0
    already_normal: int = 0
    failures: list = None

    def __post_init__(self):
        if self.failures is None:
            self.failures = []


def normalization_stats(count: int = 1000, seed: int = 7, max_depth: int = 5) -> NormalizationStats:
    rng = random.Random(seed)
    stats = NormalizationStats()
    for i in range(count):
        proof = random_proof(rng, ("p", "q"), max_depth=max_depth)
        N = simulation_for_proof(proof)
        d = forward(proof, N)
        opened, concl = B.check_derivation(N.base, d)
        stats.derivations += 1
        stats.already_normal += not find_redexes(d, N)
        if not consistency_of_N(N, samples=()):
            stats.failures.append((i, "inconsistent simulation base"))
        for strategy in ("degree", "innermost"):
            try:
                run = normalize(d, N, strategy)
            except ValueError as exc:
                stats.failures.append((i, f"{strategy}: {exc}"))
                continue
            opened2, concl2 = B.check_derivation(N.base, run.result)
            problems = []
            if concl2 != concl:
                problems.append("conclusion changed")
            if not opened2 <= opened:
                problems.append("open assumptions grew")
            if find_redexes(run.result, N):
                problems.append("redex left")
            if any(after >= before for before, after in run.phases):
                problems.append("phase did not lower the degree")
            if problems:
                stats.failures.append((i, f"{strategy}: {', '.join(problems)}"))
            stats.steps += run.steps
            stats.phases += len(run.phases)
            stats.overshoots += run.peak_overshoot > 0
    return stats


def normalization_checks(count: int = 1000, seed: int = 7) -> list:
    s = normalization_stats(count, seed)
    detail = (f"{s.derivations} derivations, {s.steps} steps, {s.phases} phases, "
              f"{s.overshoots} transient overshoots")
    if s.failures:
        detail += f"; first failure {s.failures[0]}"
    return [Check(6, "normalization terminates and preserves sequents", not s.failures, detail)]


# ---------------------------------------------------------------- criterion 7


def random_consistent_base(rng: random.Random, names) -> B.Base:
    cfg = UniverseConfig(vocab=tuple(names), max_premises=2, max_discharge=1)
    pool = generate_pool(cfg)
    while True:
        S = B.Base(rng.sample(pool, rng.randint(0, min(4, len(pool)))))
        if B.is_consistent(S):
            return S


def completion_universe(T: B.Base, names) -> Universe:
    """Extensions of ``T`` by single-premise rules without discharge."""
    return build_universe(UniverseConfig(vocab=tuple(names), max_premises=1, max_discharge=0, core=T.rules))


def bot_completion_checks(count: int = 100, seed: int = 11) -> list:
    rng = random.Random(seed)
    incomplete, unstable = [], []
    evaluated = 0
    for i in range(count):
        names = ["p", "q", "r"][: rng.randint(1, 3)]
        S = random_consistent_base(rng, names)
        T = B.bot_complete(S, names)
        if not (B.is_consistent(T) and B.is_bot_complete(T, names)):
            incomplete.append(i)
            continue
        U = completion_universe(T, names)
        ev = Evaluator(U, "weak")
        for f in enumerate_by_complexity(names, 2):
            X = ev.truth(f)
            evaluated += 1
            if not (U.box(X)[0] if X[0] else U.box(~X)[0]):
                unstable.append((i, render(f)))
                break
    return [
        Check(7, "bot_complete yields consistent complete bases", not incomplete,
              f"failing indices {incomplete}" if incomplete else f"{count} bases"),
        Check(7, "validity persists above completions", not unstable,
              f"first failure {unstable[0]}" if unstable else f"{evaluated} formula checks"),
    ]


# ---------------------------------------------------------------- driver


CRITERIA = {
    1: ("weak-semantics theorem table", lambda: weak_theorem_checks()),
    2: ("strong/weak contrast", lambda: strong_weak_contrast()),
    3: ("decider against Kripke oracle", lambda: decider_oracle_agreement()),
    4: ("soundness of random proofs", lambda: soundness_checks()),
    5: ("completeness round trips", lambda: completeness_checks()),
    6: ("normalization", lambda: normalization_checks()),
    7: ("bot-completion", lambda: bot_completion_checks()),
}


def run_criterion(n: int) -> tuple:
    """Checks of one criterion and the seconds they took."""
    start = time.perf_counter()
    checks = CRITERIA[n][1]()
    return checks, time.perf_counter() - start
