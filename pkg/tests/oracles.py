"""Deliberately naive reference implementations used to cross-check the package."""

from __future__ import annotations

import itertools
from functools import lru_cache

from ecumenical.base import Base
from ecumenical.formula import BOT, And, BasicC, BasicI, Classical, Imp, Or, to_intuitionistic


def naive_derives(S: Base, context, goal: str) -> bool:
    """Saturate the table of sequents (Δ, q) over every Δ ⊆ relevant basics."""
    relevant = sorted(S.basics() | set(context) | {goal, BOT})
    subsets = [frozenset(c) for k in range(len(relevant) + 1) for c in itertools.combinations(relevant, k)]
    holds = {(d, q) for d in subsets for q in d}
    changed = True
    while changed:
        changed = False
        for r in S.rules:
            for d in subsets:
                if (d, r.conclusion) in holds:
                    continue
                if all((d | p.discharge, p.conclusion) in holds for p in r.premises):
                    holds.add((d, r.conclusion))
                    changed = True
    return (frozenset(c for c in context if c in relevant), goal) in holds


class NaiveUniverse:
    """Consistent subsets of a rule list, with extensions found by subset tests."""

    def __init__(self, rules, core=()):
        self.rules = list(rules)
        self.core = tuple(core)
        self.bases = []
        for k in range(len(self.rules) + 1):
            for combo in itertools.combinations(range(len(self.rules)), k):
                S = Base(list(self.core) + [self.rules[i] for i in combo])
                if not naive_derives(S, (), BOT):
                    self.bases.append(frozenset(combo))
        self.index = {b: i for i, b in enumerate(self.bases)}
        self.ext = [[j for j, t in enumerate(self.bases) if s <= t] for s in self.bases]
        self.base_objs = [Base(list(self.core) + [self.rules[i] for i in b]) for b in self.bases]

    def mask(self, i: int) -> int:
        return sum(1 << j for j in self.bases[i])


class NaiveWeak:
    """The weak clauses read off one by one, quantifiers as loops."""

    def __init__(self, U: NaiveUniverse, targets):
        self.U = U
        self.targets = [BasicI(t) for t in targets]
        self.truth = lru_cache(maxsize=None)(self._truth)

    def derives(self, i, ctx, goal):
        return naive_derives(self.U.base_objs[i], ctx, goal)

    def local(self, i, ctx, A):
        if not ctx:
            return self.truth(i, A)
        return all(not all(self.truth(j, g) for g in ctx) or self.truth(j, A) for j in self.U.ext[i])

    def glob(self, i, ctx, A):
        for j in self.U.ext[i]:
            if all(all(self.truth(k, g) for g in ctx) for k in self.U.ext[j]):
                if not all(self.truth(k, A) for k in self.U.ext[j]):
                    return False
        return True

    def _truth(self, i, A):
        if isinstance(A, BasicI):
            return A.name != BOT and self.derives(i, (), A.name)
        if isinstance(A, BasicC):
            return not self.derives(i, (A.name,), BOT)
        if isinstance(A, Classical):
            return not self.local(i, (to_intuitionistic(A),), BasicI(BOT))
        if isinstance(A, And):
            return self.truth(i, A.left) and self.truth(i, A.right)
        if isinstance(A, Imp):
            return self.glob(i, (A.left,), A.right)
        if isinstance(A, Or):
            for j in self.U.ext[i]:
                for r in self.targets:
                    if self.local(j, (A.left,), r) and self.local(j, (A.right,), r) and not self.truth(j, r):
                        return False
            return True
        raise TypeError(A)
