"""Weak (local/global) and strong validity over a finite universe.

Every formula is evaluated to its truth set: a boolean array over the
universe's base ids.  Quantifiers over extensions become ``U.box`` and
``U.diamond``.  Verdicts are universe-relative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .formula import (
    BOT,
    And,
    BasicC,
    BasicI,
    Classical,
    Formula,
    Imp,
    Or,
    atoms,
    render,
    to_intuitionistic,
)
from .universe import Universe

LOCAL, GLOBAL, STRONG = "weak-local", "weak-global", "strong"
KINDS = (LOCAL, GLOBAL, STRONG)


class SemanticsError(ValueError):
    pass


@dataclass(frozen=True)
class Judgement:
    kind: str
    base: int
    context: tuple
    conclusion: Formula

    def render(self) -> str:
        ctx = ", ".join(render(g) for g in self.context)
        turnstile = {LOCAL: "|=L", GLOBAL: "|=G", STRONG: "|="}[self.kind]
        return f"{ctx} {turnstile}[{self.base}] {render(self.conclusion)}".strip()


@dataclass
class EvalTrace:
    judgement: Judgement
    clause: str
    result: bool
    witness: Optional[int] = None
    children: list = field(default_factory=list)

    def lines(self, indent: int = 0) -> list:
        mark = "T" if self.result else "F"
        wit = f" witness={self.witness}" if self.witness is not None else ""
        out = [f"{'  ' * indent}[{mark}] {self.judgement.render()}  ({self.clause}){wit}"]
        for c in self.children:
            out.extend(c.lines(indent + 1))
        return out

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


class Evaluator:
    """Truth sets for one universe and one semantics mode, memoized on the universe."""

    def __init__(self, U: Universe, mode: str = "weak", global_disjunction: bool = False):
        if mode not in ("weak", "strong"):
            raise SemanticsError(f"unknown mode {mode!r}")
        self.U = U
        self.mode = mode
        self.global_disjunction = global_disjunction
        tag = (mode, global_disjunction)
        self.memo = U.memo.setdefault(tag, {})
        self.targets = tuple(BasicI(b) for b in U.basics)

    def check_vocab(self, fs: Sequence[Formula]):
        known = set(self.U.basics)
        for f in fs:
            stray = atoms(f) - known
            if stray:
                raise SemanticsError(f"atom-outside-vocab: {sorted(stray)} in {render(f)}")

    def truth(self, f: Formula) -> np.ndarray:
        got = self.memo.get(f)
        if got is None:
            got = self._truth(f)
            got.setflags(write=False)
            self.memo[f] = got
        return got

    def _truth(self, f: Formula) -> np.ndarray:
        U = self.U
        if isinstance(f, BasicI):
            if f.name == BOT:
                return U.nowhere()
            return U.derivable[f.name] & U.consistent
        if isinstance(f, BasicC):
            free = ~U.refutes[f.name] & U.consistent
            return free if self.mode == "weak" else U.box(free)
        if isinstance(f, Classical):
            inner = self.truth(to_intuitionistic(f))
            return U.diamond(inner) if self.mode == "weak" else U.box(U.diamond(inner))
        if isinstance(f, And):
            return self.truth(f.left) & self.truth(f.right)
        if isinstance(f, Imp):
            if self.mode == "weak":
                return self.global_entails([f.left], f.right)
            return self.local_entails([f.left], f.right)
        if isinstance(f, Or):
            return self._disjunction(f)
        raise TypeError(f"not a formula: {f!r}")

    def disjunction_guard(self, f: Or, r: Formula) -> np.ndarray:
        """Bases where A ⊩ r and B ⊩ r imply ⊩ r (before the outer box)."""
        ent = self.global_entails if (self.mode == "weak" and self.global_disjunction) else self.local_entails
        both = ent([f.left], r) & ent([f.right], r)
        return (~both | self.truth(r)) & self.U.consistent

    def _disjunction(self, f: Or) -> np.ndarray:
        acc = self.U.everywhere()
        for r in self.targets:
            acc &= self.disjunction_guard(f, r)
        return self.U.box(acc)

    def conj(self, fs: Sequence[Formula]) -> np.ndarray:
        acc = self.U.everywhere()
        for g in fs:
            acc &= self.truth(g)
        return acc

    def local_entails(self, ctx: Sequence[Formula], A: Formula) -> np.ndarray:
        if not ctx:
            return self.truth(A)
        return self.U.box(~self.conj(ctx) | self.truth(A))

    def global_entails(self, ctx: Sequence[Formula], A: Formula) -> np.ndarray:
        box = self.U.box
        return box(~box(self.conj(ctx)) | box(self.truth(A)))

    def judgement_set(self, kind: str, ctx: Sequence[Formula], A: Formula) -> np.ndarray:
        self.check_vocab(list(ctx) + [A])
        if kind == GLOBAL:
            return self.global_entails(ctx, A)
        return self.local_entails(ctx, A)


def _evaluator(U: Universe, kind: str, global_disjunction: bool = False) -> Evaluator:
    if kind not in KINDS:
        raise SemanticsError(f"unknown judgement kind {kind!r}")
    return Evaluator(U, "strong" if kind == STRONG else "weak", global_disjunction)


def holds(U: Universe, kind: str, S: int, ctx: Sequence[Formula], A: Formula, *, global_disjunction: bool = False) -> bool:
    U._require(S)
    return bool(_evaluator(U, kind, global_disjunction).judgement_set(kind, ctx, A)[S])


def weak_local(U, S, ctx, A, *, global_disjunction=False) -> bool:
    return holds(U, LOCAL, S, ctx, A, global_disjunction=global_disjunction)


def weak_global(U, S, ctx, A, *, global_disjunction=False) -> bool:
    return holds(U, GLOBAL, S, ctx, A, global_disjunction=global_disjunction)


def strong_sat(U, S, ctx, A) -> bool:
    return holds(U, STRONG, S, ctx, A)


def valid_set(U: Universe, kind: str, ctx: Sequence[Formula], A: Formula) -> np.ndarray:
    return _evaluator(U, kind).judgement_set(kind, ctx, A)


def weak_valid(U: Universe, ctx: Sequence[Formula], A: Formula) -> bool:
    ok = valid_set(U, GLOBAL, ctx, A)
    return bool(ok[U.consistent].all())


def strong_valid_in_universe(U: Universe, ctx: Sequence[Formula], A: Formula) -> bool:
    ok = valid_set(U, STRONG, ctx, A)
    return bool(ok[U.consistent].all())


def first_base(U: Universe, selected: np.ndarray, among: Optional[Sequence[int]] = None) -> Optional[int]:
    for m in (U.bases if among is None else among):
        if selected[m]:
            return m
    return None


def check_monotonic(U: Universe, A: Formula) -> Optional[tuple]:
    """First (S, S') with S ⊆ S', A locally valid at S but not at S'."""
    ev = _evaluator(U, LOCAL)
    ev.check_vocab([A])
    X = ev.truth(A)
    bad = X & ~U.box(X)
    S = first_base(U, bad)
    if S is None:
        return None
    return S, first_base(U, ~X, U.extensions_of(S))


def find_weak_counterexample(U: Universe, ctx: Sequence[Formula], A: Formula, kind: str = GLOBAL) -> Optional[tuple]:
    ok = valid_set(U, kind, ctx, A)
    S = first_base(U, ~ok & U.consistent)
    if S is None:
        return None
    return S, explain(U, Judgement(kind, S, tuple(ctx), A))


# ---------------------------------------------------------------- traces


def explain(U: Universe, j: Judgement, depth: int = 4, *, global_disjunction: bool = False) -> EvalTrace:
    """Trace one judgement, expanding sub-judgements down to ``depth`` levels."""
    ev = _evaluator(U, j.kind, global_disjunction)
    ev.check_vocab(list(j.context) + [j.conclusion])
    return _explain(ev, j, depth)


def _sub(ev: Evaluator, j: Judgement, kind: str, S: int, ctx, A, depth: int) -> EvalTrace:
    return _explain(ev, Judgement(kind, S, tuple(ctx), A), depth - 1)


def _explain(ev: Evaluator, j: Judgement, depth: int) -> EvalTrace:
    U = ev.U
    S, ctx, A = j.base, list(j.context), j.conclusion
    strong = ev.mode == "strong"
    result = bool(ev.judgement_set(j.kind, ctx, A)[S])
    node = EvalTrace(j, "", result)
    ext = U.extensions_of(S)
    kind = j.kind
    if kind == GLOBAL:
        node.clause = "global entailment"
        if not result:
            prem = ev.conj(ctx)
            concl = ev.truth(A)
            w = first_base(U, U.box(prem) & ~U.box(concl), ext)
            node.witness = w
            if depth > 0:
                w2 = first_base(U, ~concl, U.extensions_of(w))
                node.children.append(_sub(ev, j, LOCAL, w2, [], A, depth))
        return node
    if ctx:
        node.clause = "entailment"
        if not result:
            w = first_base(U, ev.conj(ctx) & ~ev.truth(A), ext)
            node.witness = w
            if depth > 0:
                node.children += [_sub(ev, j, kind, w, [], g, depth) for g in ctx]
                node.children.append(_sub(ev, j, kind, w, [], A, depth))
        return node
    if isinstance(A, BasicI):
        node.clause = "falsum" if A.name == BOT else "atomic derivability"
    elif isinstance(A, BasicC):
        node.clause = "classical atom"
        if strong and not result:
            node.witness = first_base(U, U.refutes[A.name], ext)
    elif isinstance(A, Classical):
        node.clause = "classical compound"
        inner = to_intuitionistic(A)
        if not strong and result:
            w = first_base(U, ev.truth(inner), ext)
            node.witness = w
            if depth > 0:
                node.children.append(_sub(ev, j, kind, w, [], inner, depth))
        elif strong and not result:
            w = first_base(U, ~U.diamond(ev.truth(inner)), ext)
            node.witness = w
            if depth > 0:
                node.children.append(_sub(ev, j, kind, w, [inner], FALSUM_I, depth))
    elif isinstance(A, And):
        node.clause = "conjunction"
        if depth > 0:
            for part in (A.left, A.right):
                child = _sub(ev, j, kind, S, [], part, depth)
                node.children.append(child)
                if not result and not child.result:
                    break
    elif isinstance(A, Imp):
        node.clause = "implication"
        if depth > 0:
            node.children.append(_sub(ev, j, kind if strong else GLOBAL, S, [A.left], A.right, depth))
    elif isinstance(A, Or):
        node.clause = "disjunction"
        if not result:
            for w in ext:
                bad = next((r for r in ev.targets if not ev.disjunction_guard(A, r)[w]), None)
                if bad is not None:
                    node.witness = w
                    if depth > 0:
                        ek = GLOBAL if (not strong and ev.global_disjunction) else kind
                        node.children += [
                            _sub(ev, j, ek, w, [A.left], bad, depth),
                            _sub(ev, j, ek, w, [A.right], bad, depth),
                            _sub(ev, j, kind, w, [], bad, depth),
                        ]
                    break
    return node


FALSUM_I = BasicI(BOT)


def replay(U: Universe, trace: EvalTrace, *, global_disjunction: bool = False) -> bool:
    """Re-evaluate every node of a trace and confirm results and witnesses."""
    j = trace.judgement
    ev = _evaluator(U, j.kind, global_disjunction)
    if bool(ev.judgement_set(j.kind, list(j.context), j.conclusion)[j.base]) != trace.result:
        return False
    if trace.witness is not None and not U.is_extension(j.base, trace.witness):
        return False
    return all(replay(U, c, global_disjunction=global_disjunction) for c in trace.children)
