"""Finite universes of consistent bases standing in for "all extensions".

A universe fixes a rule pool; its bases are the consistent sets
``core ∪ X`` for X ⊆ pool.  A base is identified by the bitmask of its
pool rules, so per-base data lives in numpy arrays of length 2**len(pool)
and the extension order is plain bitmask inclusion.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import base as B
from .base import AtomicRule, Base, Premise, rule_to_text
from .formula import BOT

DEFAULT_POOL_CAP = 16
_TABLE_BUDGET = 1 << 26


class UniverseError(ValueError):
    pass


@dataclass(frozen=True)
class UniverseConfig:
    vocab: tuple
    max_premises: int = 1
    max_discharge: int = 1
    include_bot_conclusions: bool = True
    extra_rules: tuple = ()
    pool_cap: int = DEFAULT_POOL_CAP
    generate: bool = True
    core: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vocab", tuple(sorted(set(self.vocab))))
        object.__setattr__(self, "extra_rules", tuple(self.extra_rules))
        object.__setattr__(self, "core", tuple(self.core))
        if not self.vocab:
            raise UniverseError("vocabulary must be nonempty")
        if BOT in self.vocab:
            raise UniverseError("falsum is implicit and cannot be listed in the vocabulary")
        if self.max_premises < 0 or self.max_discharge < 0:
            raise UniverseError("premise and discharge bounds must be nonnegative")
        allowed = set(self.vocab) | {BOT}
        for r in self.extra_rules + self.core:
            stray = r.basics() - allowed
            if stray:
                raise UniverseError(f"rule {rule_to_text(r)} uses basics outside the vocabulary: {sorted(stray)}")

    def describe(self) -> str:
        parts = [
            f"vocab={','.join(self.vocab)}",
            f"max_premises={self.max_premises}",
            f"max_discharge={self.max_discharge}",
            f"include_bot_conclusions={str(self.include_bot_conclusions).lower()}",
            f"pool_cap={self.pool_cap}",
            f"generate={str(self.generate).lower()}",
        ]
        if self.extra_rules:
            parts.append("extra=[" + "; ".join(sorted(rule_to_text(r) for r in self.extra_rules)) + "]")
        if self.core:
            parts.append("core=[" + "; ".join(sorted(rule_to_text(r) for r in self.core)) + "]")
        return ";".join(parts)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.describe().encode()).hexdigest()[:12]


def parse_config(text: str, **overrides) -> UniverseConfig:
    """Parse ``vocab=p,q;max_premises=1;max_discharge=1;pool_cap=16``."""
    fields = {}
    for item in filter(None, (s.strip() for s in text.split(";"))):
        if "=" not in item:
            raise UniverseError(f"bad universe setting {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        if key == "vocab":
            fields["vocab"] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key in ("max_premises", "max_discharge", "pool_cap"):
            try:
                fields[key] = int(value)
            except ValueError:
                raise UniverseError(f"{key} must be an integer, got {value!r}") from None
        elif key in ("include_bot_conclusions", "generate"):
            if value.lower() not in ("true", "false", "1", "0"):
                raise UniverseError(f"{key} must be true or false, got {value!r}")
            fields[key] = value.lower() in ("true", "1")
        else:
            raise UniverseError(f"unknown universe setting {key!r}")
    fields.update(overrides)
    if "vocab" not in fields:
        raise UniverseError("universe config needs vocab=...")
    return UniverseConfig(**fields)


def generate_pool(cfg: UniverseConfig) -> list:
    """Candidate rules over the vocabulary.

    Pruned: premises (∅ ⊢ ⊥) (no atomic ex falso), idle rules whose
    conclusion already is an undischarged premise, self-discharging rules
    ([a ...] ⊢ b) ⇒ a (atomic reductio and Peirce shapes), and rules
    concluding ⊥ from premises that all conclude ⊥.
    """
    vocab = list(cfg.vocab)
    rules = [AtomicRule((), p) for p in vocab]
    conclusions = vocab + ([BOT] if cfg.include_bot_conclusions else [])
    premises = []
    for size in range(cfg.max_discharge + 1):
        for hyp in itertools.combinations(vocab, size):
            for concl in vocab + [BOT]:
                if concl in hyp or (not hyp and concl == BOT):
                    continue
                premises.append(Premise(hyp, concl))
    for n in range(1, cfg.max_premises + 1):
        for combo in itertools.combinations(premises, n):
            for c in conclusions:
                if any(not p.discharge and p.conclusion == c for p in combo):
                    continue
                if any(c in p.discharge for p in combo):
                    continue
                if c == BOT and all(p.conclusion == BOT for p in combo):
                    continue
                rules.append(AtomicRule(combo, c))
    return rules


def _popcount(masks: np.ndarray) -> np.ndarray:
    counts = np.zeros_like(masks)
    m = masks.copy()
    while m.any():
        counts += m & 1
        m >>= 1
    return counts


class Universe:
    def __init__(self, cfg: UniverseConfig, route: str = "auto"):
        self.config = cfg
        core = Base(cfg.core)
        if not B.is_consistent(core):
            raise UniverseError("core rules are inconsistent")
        candidates = list(cfg.extra_rules)
        if cfg.generate:
            candidates += generate_pool(cfg)
        pool = Base(r for r in candidates if r not in core)
        if len(pool) > cfg.pool_cap:
            raise UniverseError(f"pool-too-large: {len(pool)} rules exceeds cap {cfg.pool_cap}")
        self.core = core
        self.pool: tuple = pool.rules
        self.k = len(self.pool)
        self.size = 1 << self.k
        self.masks = np.arange(self.size, dtype=np.int64)
        basics = set(cfg.vocab) | {BOT} | core.basics()
        for r in self.pool:
            basics |= r.basics()
        self.basics: tuple = tuple(sorted(basics - {BOT})) + (BOT,)
        self.route = route
        self.derivable, self.refutes = self._atomic_facts(route)
        self.consistent = ~self.derivable[BOT]
        ids = self.masks[self.consistent]
        order = np.lexsort((ids, _popcount(ids)))
        self.bases: tuple = tuple(int(m) for m in ids[order])
        self.memo: dict = {}

    # ------------------------------------------------------------ atomic facts

    def _active(self, rules_with_bits):
        for r, bit in rules_with_bits:
            yield r, (np.ones(self.size, dtype=bool) if bit is None else ((self.masks >> bit) & 1).astype(bool))

    def _atomic_facts(self, route: str):
        names = self.basics
        n = len(names)
        if route == "auto":
            route = "table" if (1 << n) * n * self.size <= _TABLE_BUDGET else "search"
        if route == "table":
            return self._facts_table()
        if route == "search":
            return self._facts_search()
        raise UniverseError(f"unknown derivability route {route!r}")

    def _facts_table(self):
        """Saturate sequent tables F[Δ, q] over all masks at once."""
        names = self.basics
        idx = {b: i for i, b in enumerate(names)}
        n = len(names)
        contexts = np.arange(1 << n)
        F = np.zeros((1 << n, n, self.size), dtype=bool)
        for i in range(n):
            F[(contexts >> i) & 1 == 1, i, :] = True
        rules = [(r, None) for r in self.core] + [(r, j) for j, r in enumerate(self.pool)]
        compiled = []
        for r, active in self._active(rules):
            prem = []
            for p in r.premises:
                bits = sum(1 << idx[b] for b in p.discharge)
                prem.append((contexts | bits, idx[p.conclusion]))
            compiled.append((prem, idx[r.conclusion], active))
        changed = True
        while changed:
            changed = False
            for prem, c, active in compiled:
                cond = np.broadcast_to(active, (1 << n, self.size)).copy()
                for ctx_idx, q in prem:
                    cond &= F[ctx_idx, q, :]
                new = cond & ~F[:, c, :]
                if new.any():
                    F[:, c, :] |= new
                    changed = True
        bot = idx[BOT]
        derivable = {b: F[0, idx[b], :].copy() for b in names}
        refutes = {b: F[1 << idx[b], bot, :].copy() for b in names}
        return derivable, refutes

    def _facts_search(self):
        names = self.basics
        derivable = {b: np.zeros(self.size, dtype=bool) for b in names}
        refutes = {b: np.zeros(self.size, dtype=bool) for b in names}
        for m in range(self.size):
            S = self.base(m, check=False)
            for b in names:
                derivable[b][m] = B.derives(S, (), b)
                refutes[b][m] = B.derives(S, {b}, BOT)
        return derivable, refutes

    # ------------------------------------------------------------ bases

    def rules_of(self, mask: int) -> list:
        return [r for j, r in enumerate(self.pool) if mask >> j & 1]

    def base(self, mask: int, check: bool = True) -> Base:
        if check:
            self._require(mask)
        return self.core.union(self.rules_of(mask))

    def _require(self, mask: int):
        if not (0 <= mask < self.size) or not self.consistent[mask]:
            raise UniverseError(f"unknown base id {mask}")

    def base_id(self, S: Base) -> int:
        """Identify a base of this universe, or raise."""
        if not self.core.keys <= S.keys:
            raise UniverseError("base does not contain the universe core")
        pos = {r.key: j for j, r in enumerate(self.pool)}
        mask = 0
        for r in S.rules:
            if r in self.core:
                continue
            if r.key not in pos:
                raise UniverseError(f"rule {rule_to_text(r)} is not in the universe pool")
            mask |= 1 << pos[r.key]
        self._require(mask)
        return mask

    def describe_base(self, mask: int) -> str:
        rules = self.rules_of(mask)
        return "{" + "; ".join(rule_to_text(r) for r in rules) + "}"

    def extensions_of(self, mask: int) -> list:
        self._require(mask)
        return [m for m in self.bases if m & mask == mask]

    def is_extension(self, small: int, big: int) -> bool:
        return small & big == small

    # ------------------------------------------------------------ quantifiers

    def box(self, X: np.ndarray) -> np.ndarray:
        """Bases all of whose consistent extensions lie in X."""
        Y = X | ~self.consistent
        for bit in range(self.k):
            view = Y.reshape(-1, 2, 1 << bit)
            view[:, 0, :] &= view[:, 1, :]
        return Y & self.consistent

    def diamond(self, X: np.ndarray) -> np.ndarray:
        """Bases having some consistent extension in X."""
        return ~self.box(~X) & self.consistent

    def everywhere(self) -> np.ndarray:
        return self.consistent.copy()

    def nowhere(self) -> np.ndarray:
        return np.zeros(self.size, dtype=bool)


def build_universe(cfg: UniverseConfig, route: str = "auto") -> Universe:
    return Universe(cfg, route)


def default_config(names: Iterable[str], **kw) -> UniverseConfig:
    return UniverseConfig(vocab=tuple(names), **kw)


def extensions_of(U: Universe, mask: int) -> list:
    return U.extensions_of(mask)
