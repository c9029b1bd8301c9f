"""Brute-force Kripke semantics for intuitionistic formulas on small frames.

An independent oracle for the sequent-calculus decider.  All models with
at most ``max_worlds`` worlds are laid side by side as one set of points;
a formula's forcing relation is a boolean vector over those points and
implication looks at everything above a point through one reachability
matrix.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import numpy as np

from .formula import BOT, And, BasicI, Formula, Imp, Or, atoms, is_intuitionistic, render


def partial_orders(n: int) -> Iterator[tuple]:
    """Every partial order on range(n), as per-world up-sets."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    for chosen in itertools.product((False, True), repeat=len(pairs)):
        rel = {(a, a) for a in range(n)} | {p for p, keep in zip(pairs, chosen) if keep}
        if any((b, a) in rel for a, b in rel if a != b):
            continue
        if any((a, d) not in rel for a, b in rel for c, d in rel if b == c):
            continue
        yield tuple(frozenset(b for b in range(n) if (a, b) in rel) for a in range(n))


class KripkeOracle:
    def __init__(self, names: Sequence[str], max_worlds: int = 3):
        self.names = tuple(sorted(names))
        subsets = [frozenset(c) for k in range(len(self.names) + 1) for c in itertools.combinations(self.names, k)]
        up: list = []
        val: list = []
        self.models = 0
        for n in range(1, max_worlds + 1):
            for above in partial_orders(n):
                for sets in itertools.product(subsets, repeat=n):
                    if any(not sets[a] <= sets[b] for a in range(n) for b in above[a]):
                        continue
                    offset = len(val)
                    val.extend(sets)
                    up.extend([offset + b for b in above[a]] for a in range(n))
                    self.models += 1
        self.points = len(val)
        self.reach = np.zeros((self.points, self.points), dtype=bool)
        for x, ys in enumerate(up):
            self.reach[x, ys] = True
        self.valuation = {p: np.array([p in v for v in val]) for p in self.names}
        self.memo: dict = {}

    def truth(self, f: Formula) -> np.ndarray:
        got = self.memo.get(f)
        if got is None:
            got = self._truth(f)
            self.memo[f] = got
        return got

    def _truth(self, f: Formula) -> np.ndarray:
        if isinstance(f, BasicI):
            if f.name == BOT:
                return np.zeros(self.points, dtype=bool)
            if f.name not in self.valuation:
                raise ValueError(f"atom {f.name} outside the oracle vocabulary")
            return self.valuation[f.name]
        if isinstance(f, And):
            return self.truth(f.left) & self.truth(f.right)
        if isinstance(f, Or):
            return self.truth(f.left) | self.truth(f.right)
        if isinstance(f, Imp):
            bad = self.truth(f.left) & ~self.truth(f.right)
            return ~(self.reach @ bad)
        raise ValueError(f"not an intuitionistic formula: {render(f)}")

    def valid(self, f: Formula) -> bool:
        if not is_intuitionistic(f):
            raise ValueError(f"not an intuitionistic formula: {render(f)}")
        return bool(self.truth(f).all())


def kripke_valid(f: Formula, max_worlds: int = 3) -> bool:
    return KripkeOracle(sorted(atoms(f)), max_worlds).valid(f)
