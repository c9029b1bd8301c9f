"""Atomic systems: second-level atomic rules, derivability, derivations."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .formula import BOT, is_basic_name


class BaseError(ValueError):
    pass


class DerivationError(ValueError):
    pass


@dataclass(frozen=True)
class Premise:
    discharge: frozenset
    conclusion: str

    def __init__(self, discharge: Iterable[str], conclusion: str):
        object.__setattr__(self, "discharge", frozenset(discharge))
        object.__setattr__(self, "conclusion", conclusion)

    @property
    def key(self):
        return (tuple(sorted(self.discharge)), self.conclusion)

    def __str__(self):
        hyp = " ".join(sorted(self.discharge))
        return f"({hyp} |- {self.conclusion})" if hyp else f"( |- {self.conclusion})"


@dataclass(frozen=True)
class AtomicRule:
    premises: tuple
    conclusion: str

    def __init__(self, premises: Iterable[Premise], conclusion: str):
        object.__setattr__(self, "premises", tuple(premises))
        object.__setattr__(self, "conclusion", conclusion)

    @property
    def key(self):
        return (tuple(sorted(p.key for p in self.premises)), self.conclusion)

    @property
    def is_axiom(self) -> bool:
        return not self.premises

    def basics(self) -> set:
        out = {self.conclusion}
        for p in self.premises:
            out.add(p.conclusion)
            out.update(p.discharge)
        return out

    def __str__(self):
        return rule_to_text(self)


def axiom(p: str) -> AtomicRule:
    return AtomicRule((), p)


def rule(*premises, conclusion: str) -> AtomicRule:
    """Shorthand: each premise is a basic name or a ``(discharge, conclusion)`` pair."""
    ps = []
    for prem in premises:
        if isinstance(prem, str):
            ps.append(Premise((), prem))
        else:
            hyp, concl = prem
            ps.append(Premise([hyp] if isinstance(hyp, str) else hyp, concl))
    return AtomicRule(ps, conclusion)


class Base:
    """A finite set of atomic rules, deduplicated up to premise order."""

    __slots__ = ("_rules", "_keys", "_engine")

    def __init__(self, rules: Iterable[AtomicRule] = ()):
        by_key: dict = {}
        for r in rules:
            by_key.setdefault(r.key, r)
        self._keys = frozenset(by_key)
        self._rules = tuple(sorted(by_key.values(), key=rule_to_text))
        self._engine = None

    @property
    def rules(self) -> tuple:
        return self._rules

    @property
    def keys(self) -> frozenset:
        return self._keys

    def __contains__(self, r: AtomicRule) -> bool:
        return r.key in self._keys

    def __iter__(self):
        return iter(self._rules)

    def __len__(self):
        return len(self._rules)

    def __eq__(self, other):
        return isinstance(other, Base) and self._keys == other._keys

    def __hash__(self):
        return hash(self._keys)

    def __repr__(self):
        return "Base{" + "; ".join(rule_to_text(r) for r in self._rules) + "}"

    def union(self, rules: Iterable[AtomicRule]) -> "Base":
        return Base(itertools.chain(self._rules, rules))

    def basics(self) -> set:
        out: set = set()
        for r in self._rules:
            out |= r.basics()
        return out

    def engine(self) -> "_Engine":
        if self._engine is None:
            self._engine = _Engine(self)
        return self._engine


# ---------------------------------------------------------------- derivability


class _Engine:
    """Demand-driven derivability for one base.

    ``closure(ctx)`` is the set of basics derivable from hypotheses ``ctx``.
    A premise (P, p) of a rule is checked against the closure under ctx ∪ P.
    Everything already derived from ctx can be cut in, so the wider context
    is keyed by the current closure plus P. Nearby contexts then share one
    saturation.
    """

    def __init__(self, base: Base):
        self.rules = base.rules
        self.memo: dict = {}
        # a rule is rechecked when a basic it mentions in a premise appears
        self.triggers: dict = {}
        for k, r in enumerate(self.rules):
            for b in {x for p in r.premises for x in (p.conclusion, *p.discharge)}:
                self.triggers.setdefault(b, []).append(k)

    def closure(self, ctx: frozenset) -> dict:
        """Map from each derivable basic to its first justification."""
        got = self.memo.get(ctx)
        if got is not None:
            return got
        just: dict = {q: ("hyp",) for q in ctx}
        # cheap propagation first; premises that need a wider context wait
        # until nothing else fires, when the closure is as large as it gets
        queue = list(range(len(self.rules)))
        queued = set(queue)
        deferred: set = set()

        def learn(r, sources):
            just[r.conclusion] = ("rule", r, sources, len(just))
            for j in self.triggers.get(r.conclusion, ()):
                if j not in queued:
                    queue.append(j)
                    queued.add(j)

        while queue or deferred:
            while queue:
                k = queue.pop(0)
                queued.discard(k)
                r = self.rules[k]
                if r.conclusion in just:
                    continue
                got = self._fire(r, ctx, just, recurse=False)
                if got == "defer":
                    deferred.add(k)
                elif got is not None:
                    learn(r, got)
            for k in sorted(deferred):
                deferred.discard(k)
                r = self.rules[k]
                if r.conclusion in just:
                    continue
                got = self._fire(r, ctx, just, recurse=True)
                if got is not None:
                    learn(r, got)
                    break
        self.memo[ctx] = just
        return just

    def _fire(self, r: "AtomicRule", ctx: frozenset, just: dict, recurse: bool):
        """Per-premise source contexts if every premise holds, else None.
        Without ``recurse``, answers "defer" when only wider contexts remain."""
        sources: list = [None] * len(r.premises)
        pending = []
        for i, prem in enumerate(r.premises):
            if prem.conclusion in just:
                sources[i] = ctx  # weakening
            elif prem.conclusion in prem.discharge:
                sources[i] = ctx | prem.discharge
            elif prem.discharge <= ctx or prem.discharge <= just.keys():
                return None
            else:
                pending.append(i)
        if pending and not recurse:
            return "defer"
        for i in pending:
            prem = r.premises[i]
            wider = frozenset(just) | prem.discharge
            if prem.conclusion not in self.closure(wider):
                return None
            sources[i] = wider
        return tuple(sources)

    def derives(self, ctx: frozenset, goal: str) -> bool:
        return goal in self.closure(ctx)


def derives(S: Base, context: Iterable[str], goal: str) -> bool:
    return S.engine().derives(frozenset(context), goal)


def closure(S: Base, context: Iterable[str] = ()) -> frozenset:
    return frozenset(S.engine().closure(frozenset(context)))


def is_consistent(S: Base) -> bool:
    return not derives(S, (), BOT)


def extends(S: Base, S2: Base) -> bool:
    return S.keys <= S2.keys


def add_axiom(S: Base, p: str) -> Base:
    return S.union([axiom(p)])


def bot_complete(S: Base, vocab: Iterable[str]) -> Base:
    if not is_consistent(S):
        raise BaseError("cannot complete an inconsistent base")
    current = S
    for p in vocab:
        if not derives(current, {p}, BOT):
            current = add_axiom(current, p)
    return current


def is_bot_complete(S: Base, vocab: Iterable[str]) -> bool:
    return all(derives(S, (), p) or derives(S, {p}, BOT) for p in vocab)


# ---------------------------------------------------------------- derivations


@dataclass(frozen=True)
class Assume:
    basic: str
    label: Optional[str] = None

    @property
    def conclusion(self) -> str:
        return self.basic


@dataclass(frozen=True)
class Apply:
    rule: AtomicRule
    children: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", (None,) * len(self.children))

    @property
    def conclusion(self) -> str:
        return self.rule.conclusion


Derivation = Union[Assume, Apply]


def check_derivation(S: Base, d: Derivation) -> tuple:
    """Validate ``d`` against ``S``; return (open assumptions, conclusion)."""
    opened: set = set()

    def walk(node, scope: tuple, path: tuple):
        if isinstance(node, Assume):
            if node.label is None:
                opened.add(node.basic)
                return
            for label, discharge in reversed(scope):
                if label == node.label:
                    if node.basic not in discharge:
                        raise DerivationError(f"ill-scoped discharge at {list(path)}: label {label} does not discharge {node.basic}")
                    return
            raise DerivationError(f"ill-scoped discharge at {list(path)}: label {node.label} has no binder")
        if node.rule not in S:
            raise DerivationError(f"unknown rule at {list(path)}: {rule_to_text(node.rule)}")
        prems = node.rule.premises
        if len(prems) != len(node.children) or len(node.labels) != len(prems):
            raise DerivationError(f"premise mismatch at {list(path)}: arity")
        for i, (prem, child, label) in enumerate(zip(prems, node.children, node.labels)):
            if child.conclusion != prem.conclusion:
                raise DerivationError(
                    f"premise mismatch at {list(path)}: premise {i} needs {prem.conclusion}, got {child.conclusion}"
                )
            inner = scope + ((label, prem.discharge),) if label is not None else scope
            walk(child, inner, path + (i,))

    walk(d, (), ())
    return frozenset(opened), d.conclusion


def derive_witness(S: Base, context: Iterable[str], goal: str) -> Optional[Derivation]:
    eng = S.engine()
    ctx = frozenset(context)
    if not eng.derives(ctx, goal):
        return None
    counter = itertools.count(1)

    # env maps each hypothesis of ``cur`` to a builder: a labelled or open
    # assumption, or (for facts cut in from an outer closure) their derivation
    def build(cur: frozenset, q: str, env: dict) -> Derivation:
        j = eng.closure(cur)[q]
        if j[0] == "hyp":
            return env[q]()
        _, r, sources, _ = j
        children, labels = [], []
        for prem, src in zip(r.premises, sources):
            label = str(next(counter)) if prem.discharge else None
            inner = {}
            for b in src:
                if b in prem.discharge:
                    inner[b] = (lambda b=b, label=label: Assume(b, label))
                elif b in env:
                    inner[b] = env[b]
                else:
                    inner[b] = (lambda b=b: build(cur, b, env))
            children.append(build(src, prem.conclusion, inner))
            labels.append(label)
        return Apply(r, tuple(children), tuple(labels))

    return build(ctx, goal, {b: (lambda b=b: Assume(b)) for b in ctx})


def derivation_to_text(d: Derivation, indent: int = 0) -> str:
    """Indented tree; ``discharges [n]`` marks premises whose hypotheses carry label n."""
    pad = "  " * indent
    if isinstance(d, Assume):
        tag = f" [{d.label}]" if d.label is not None else ""
        return f"{pad}{d.basic}  hypothesis{tag}"
    lines = [f"{pad}{d.conclusion}  by {rule_to_text(d.rule)}"]
    for child, label in zip(d.children, d.labels):
        if label is not None:
            lines.append(f"{pad}  discharges [{label}]:")
            lines.append(derivation_to_text(child, indent + 2))
        else:
            lines.append(derivation_to_text(child, indent + 1))
    return "\n".join(lines)


def derivation_size(d: Derivation) -> int:
    if isinstance(d, Assume):
        return 1
    return 1 + sum(derivation_size(c) for c in d.children)


# ---------------------------------------------------------------- text formats


def rule_to_text(r: AtomicRule) -> str:
    if not r.premises:
        return f"=> {r.conclusion}"
    return ", ".join(str(p) for p in r.premises) + f" => {r.conclusion}"


_PREMISE_RE = re.compile(r"\s*\(([^()|]*)\|-\s*([^()\s]+)\s*\)\s*")


def _basic(name: str, line: str) -> str:
    if not is_basic_name(name):
        raise BaseError(f"bad basic sentence {name!r} in {line!r}")
    return name


def parse_rule(line: str) -> AtomicRule:
    if "=>" not in line:
        raise BaseError(f"missing '=>' in rule {line!r}")
    lhs, rhs = line.rsplit("=>", 1)
    concl = _basic(rhs.strip(), line)
    premises = []
    rest = lhs.strip()
    pos = 0
    while pos < len(rest):
        m = _PREMISE_RE.match(rest, pos)
        if m is None:
            raise BaseError(f"bad premise in {line!r} at column {pos}")
        hyps = [_basic(h, line) for h in m.group(1).split()]
        premises.append(Premise(hyps, _basic(m.group(2), line)))
        pos = m.end()
        if pos < len(rest):
            if rest[pos] != ",":
                raise BaseError(f"expected ',' in {line!r} at column {pos}")
            pos += 1
            if pos >= len(rest.rstrip()):
                raise BaseError(f"dangling ',' in {line!r}")
    return AtomicRule(premises, concl)


def parse_base(text: str) -> Base:
    rules = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rules.append(parse_rule(line))
    return Base(rules)


def base_to_text(S: Base, comments: Optional[dict] = None) -> str:
    lines = []
    for r in S.rules:
        line = rule_to_text(r)
        if comments and r.key in comments:
            line += f"  # {comments[r.key]}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")
