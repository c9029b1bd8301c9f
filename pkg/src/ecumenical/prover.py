"""Ecumenical natural deduction proofs and an exact decider for strong validity."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .formula import (
    FALSUM,
    And,
    BasicC,
    BasicI,
    Classical,
    Formula,
    Imp,
    Or,
    dn_translate,
    is_classical,
    is_intuitionistic,
    neg,
    parse,
    render,
    sort_key,
    to_classical,
    to_intuitionistic,
)

RULES = (
    "assume",
    "imp-intro",
    "imp-elim",
    "or-intro-l",
    "or-intro-r",
    "or-elim",
    "and-intro",
    "and-elim-l",
    "and-elim-r",
    "bot-elim",
    "class-intro",
    "class-elim",
)
_ARITY = {
    "assume": 0,
    "imp-intro": 1,
    "imp-elim": 2,
    "or-intro-l": 1,
    "or-intro-r": 1,
    "or-elim": 3,
    "and-intro": 2,
    "and-elim-l": 1,
    "and-elim-r": 1,
    "bot-elim": 1,
    "class-intro": 1,
    "class-elim": 2,
}
_BINDERS = {"imp-intro": 1, "or-elim": 2, "class-intro": 1}


class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class NDProof:
    """A proof node.  ``labels`` is the assumption label for ``assume`` and the
    discharge labels for imp-intro, class-intro (one) and or-elim (two)."""

    rule: str
    conclusion: Formula
    premises: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        if self.rule not in _ARITY:
            raise ProofError(f"unknown rule {self.rule!r}")


def assume(f: Formula, label: Optional[str] = None) -> NDProof:
    return NDProof("assume", f, (), (label,) if label is not None else ())


def _schema(node: NDProof, path: tuple, why: str):
    raise ProofError(f"schema mismatch in {node.rule} at {list(path)}: {why}")


def _discharged_in(node: NDProof, i: int) -> Optional[tuple]:
    """(label, formula) discharged over premise ``i``, if any."""
    c = node.conclusion
    if node.rule == "imp-intro" and isinstance(c, Imp):
        return node.labels[0], c.left
    if node.rule == "class-intro":
        return node.labels[0], neg(to_intuitionistic(c))
    if node.rule == "or-elim" and i in (1, 2) and isinstance(node.premises[0].conclusion, Or):
        major = node.premises[0].conclusion
        return node.labels[i - 1], (major.left if i == 1 else major.right)
    return None


def check_nd(p: NDProof) -> tuple:
    """Validate a proof; return (open assumptions, conclusion)."""
    opened: set = set()

    def walk(node: NDProof, scope: tuple, path: tuple):
        rule, c, ps = node.rule, node.conclusion, node.premises
        if len(ps) != _ARITY[rule]:
            _schema(node, path, f"expected {_ARITY[rule]} premises, got {len(ps)}")
        if rule == "assume":
            if not node.labels:
                opened.add(c)
                return
            label = node.labels[0]
            for bound, f in reversed(scope):
                if bound == label:
                    if f != c:
                        raise ProofError(f"ill-scoped discharge at {list(path)}: label {label} discharges {render(f)}, not {render(c)}")
                    return
            raise ProofError(f"ill-scoped discharge at {list(path)}: label {label} is not bound by an ancestor")
        if len(node.labels) != _BINDERS.get(rule, 0):
            _schema(node, path, "wrong number of discharge labels")
        got = [q.conclusion for q in ps]
        if rule == "imp-intro":
            if not isinstance(c, Imp) or got[0] != c.right:
                _schema(node, path, "conclusion must be A -> B over a proof of B")
        elif rule == "imp-elim":
            if got[0] != Imp(got[1], c):
                _schema(node, path, "major premise must be A -> B with minor A and conclusion B")
        elif rule in ("or-intro-l", "or-intro-r"):
            if not isinstance(c, Or) or got[0] != (c.left if rule == "or-intro-l" else c.right):
                _schema(node, path, "premise must be the chosen disjunct")
        elif rule == "or-elim":
            if not isinstance(got[0], Or) or got[1] != c or got[2] != c:
                _schema(node, path, "needs a disjunction and two minors with the conclusion")
        elif rule == "and-intro":
            if c != And(got[0], got[1]):
                _schema(node, path, "conclusion must conjoin the premises")
        elif rule in ("and-elim-l", "and-elim-r"):
            maj = got[0]
            if not isinstance(maj, And) or c != (maj.left if rule == "and-elim-l" else maj.right):
                _schema(node, path, "premise must be a conjunction with the chosen conjunct")
        elif rule == "bot-elim":
            if got[0] != FALSUM:
                _schema(node, path, "premise must be bot")
        elif rule == "class-intro":
            if not is_classical(c) or got[0] != FALSUM:
                _schema(node, path, "needs bot and a classical conclusion")
        elif rule == "class-elim":
            if c != FALSUM or not is_classical(got[0]) or got[1] != neg(to_intuitionistic(got[0])):
                _schema(node, path, "needs A^c and ~A^i concluding bot")
        for i, q in enumerate(ps):
            bound = _discharged_in(node, i)
            walk(q, scope + (bound,) if bound else scope, path + (i,))

    walk(p, (), ())
    return frozenset(opened), p.conclusion


def proof_size(p: NDProof) -> int:
    return 1 + sum(proof_size(q) for q in p.premises)


def proof_depth(p: NDProof) -> int:
    return 1 + max((proof_depth(q) for q in p.premises), default=0)


# ---------------------------------------------------------------- text format


def proof_to_text(p: NDProof, indent: int = 0) -> str:
    pad = "  " * indent
    head = f'({p.rule} "{render(p.conclusion)}"'
    if p.rule == "assume":
        return pad + head + (f" {p.labels[0]}" if p.labels else "") + ")"
    if p.labels:
        head += " :discharge " + " ".join(p.labels)
    kids = "\n".join(proof_to_text(q, indent + 1) for q in p.premises)
    return pad + head + ("\n" + kids if kids else "") + ")"


_SEXP_TOKEN = re.compile(r'\s*(?:(\()|(\))|"([^"]*)"|([^\s()"]+))')


def _tokens(text: str) -> list:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _SEXP_TOKEN.match(text, pos)
        if m is None:
            raise ProofError(f"unreadable proof text at offset {pos}")
        if m.group(1):
            out.append(("(", None, pos))
        elif m.group(2):
            out.append((")", None, pos))
        elif m.group(3) is not None:
            out.append(("str", m.group(3), pos))
        else:
            out.append(("sym", m.group(4), pos))
        pos = m.end()
    return out


def read_sexp(text: str):
    """Nested lists of ("str"|"sym", value) leaves."""
    toks = _tokens(text)
    i = 0

    def item():
        nonlocal i
        if i >= len(toks):
            raise ProofError("unexpected end of proof text")
        kind, val, pos = toks[i]
        i += 1
        if kind == "(":
            out = []
            while i < len(toks) and toks[i][0] != ")":
                out.append(item())
            if i >= len(toks):
                raise ProofError(f"unclosed '(' at offset {pos}")
            i += 1
            return out
        if kind == ")":
            raise ProofError(f"unexpected ')' at offset {pos}")
        return (kind, val)

    tree = item()
    if i != len(toks):
        raise ProofError(f"trailing text at offset {toks[i][2]}")
    return tree


def proof_from_text(text: str, *, allow_internal: bool = True) -> NDProof:
    def build(node) -> NDProof:
        if not isinstance(node, list) or len(node) < 2 or node[0][0] != "sym" or node[1][0] != "str":
            raise ProofError("each node must read (rule-name \"formula\" ...)")
        rule = node[0][1]
        if rule not in _ARITY:
            raise ProofError(f"unknown rule {rule!r}")
        concl = parse(node[1][1], allow_internal=allow_internal)
        rest = node[2:]
        labels: list = []
        if rule == "assume":
            if len(rest) > 1 or any(not isinstance(x, tuple) for x in rest):
                raise ProofError("assume takes a formula and an optional label")
            return NDProof(rule, concl, (), tuple(x[1] for x in rest))
        if rest and rest[0] == ("sym", ":discharge"):
            rest = rest[1:]
            while rest and isinstance(rest[0], tuple) and rest[0][0] == "sym":
                labels.append(rest[0][1])
                rest = rest[1:]
        return NDProof(rule, concl, tuple(build(x) for x in rest), tuple(labels))

    return build(read_sexp(text))


# ---------------------------------------------------------------- deciding


class _G4:
    """Contraction-free sequent search for intuitionistic propositional logic."""

    def __init__(self):
        self.memo: dict = {}

    def prove(self, ctx: frozenset, goal: Formula) -> bool:
        key = (ctx, goal)
        got = self.memo.get(key)
        if got is None:
            got = self._prove(ctx, goal)
            self.memo[key] = got
        return got

    def _prove(self, ctx: frozenset, goal: Formula) -> bool:
        if FALSUM in ctx or goal in ctx:
            return True
        items = sorted(ctx, key=sort_key)
        for f in items:
            rest = ctx - {f}
            if isinstance(f, And):
                return self.prove(rest | {f.left, f.right}, goal)
            if isinstance(f, Or):
                return self.prove(rest | {f.left}, goal) and self.prove(rest | {f.right}, goal)
            if isinstance(f, Imp):
                a = f.left
                if a == FALSUM:
                    return self.prove(rest, goal)
                if isinstance(a, BasicI) and a in ctx:
                    return self.prove(rest | {f.right}, goal)
                if isinstance(a, And):
                    return self.prove(rest | {Imp(a.left, Imp(a.right, f.right))}, goal)
                if isinstance(a, Or):
                    return self.prove(rest | {Imp(a.left, f.right), Imp(a.right, f.right)}, goal)
        if isinstance(goal, And):
            return self.prove(ctx, goal.left) and self.prove(ctx, goal.right)
        if isinstance(goal, Imp):
            return self.prove(ctx | {goal.left}, goal.right)
        if isinstance(goal, Or) and (self.prove(ctx, goal.left) or self.prove(ctx, goal.right)):
            return True
        for f in items:
            if isinstance(f, Imp) and isinstance(f.left, Imp):
                d, b = f.left.right, f.right
                rest = ctx - {f}
                if self.prove(rest | {Imp(d, b)}, f.left) and self.prove(rest | {b}, goal):
                    return True
        return False


def decide_ipc(context: Sequence[Formula], goal: Formula) -> bool:
    for f in list(context) + [goal]:
        if not is_intuitionistic(f):
            raise ProofError(f"non-intuitionistic input: {render(f)}")
    return _G4().prove(frozenset(context), goal)


def decide_strong(context: Sequence[Formula], goal: Formula) -> bool:
    return decide_ipc([dn_translate(g) for g in context], dn_translate(goal))


def soundness_spotcheck(U, p: NDProof) -> bool:
    from .semantics import strong_valid_in_universe

    hyps, concl = check_nd(p)
    return strong_valid_in_universe(U, sorted(hyps, key=sort_key), concl)


# ---------------------------------------------------------------- generation


class ProofGenerator:
    """Random well-formed proofs built goal-first.

    Each step picks an introduction matching the goal's shape, or an
    elimination whose major premise is made up on the spot.  Leaves close on
    an in-scope discharged hypothesis when one fits, else stay open.
    """

    def __init__(self, rng: random.Random, names: Sequence[str] = ("p", "q"), max_depth: int = 5):
        self.rng = rng
        self.names = list(names)
        self.max_depth = max_depth
        self.counter = 0

    def label(self) -> str:
        self.counter += 1
        return str(self.counter)

    def formula(self, size: int) -> Formula:
        rng = self.rng
        if size <= 0:
            name = rng.choice(self.names)
            return BasicC(name) if rng.random() < 0.2 else BasicI(name)
        ctor = rng.choice((And, Or, Imp))
        left = rng.randint(0, size - 1)
        g = ctor(self.formula(left), self.formula(size - 1 - left))
        return Classical(g) if rng.random() < 0.15 else g

    def leaf(self, goal: Formula, scope: dict) -> NDProof:
        if goal in scope:
            return assume(goal, scope[goal])
        return assume(goal)

    def proof(self, goal: Formula) -> NDProof:
        self.counter = 0
        return self.gen(goal, 1, {})

    def gen(self, goal: Formula, depth: int, scope: dict) -> NDProof:
        rng = self.rng
        if depth >= self.max_depth or (goal in scope and rng.random() < 0.5):
            return self.leaf(goal, scope)
        options = ["elim"]
        if isinstance(goal, Imp):
            options += ["intro"] * 3
        elif isinstance(goal, (And, Or)):
            options += ["intro"] * 2
        elif is_classical(goal):
            options += ["intro"] * 2
        if goal == FALSUM:
            options += ["class-elim", "imp-elim-neg"]
        else:
            options.append("bot-elim")
        options += ["or-elim"]
        choice = rng.choice(options)
        d = depth + 1
        if choice == "intro":
            if isinstance(goal, Imp):
                lab = self.label()
                inner = dict(scope)
                inner[goal.left] = lab
                return NDProof("imp-intro", goal, (self.gen(goal.right, d, inner),), (lab,))
            if isinstance(goal, And):
                return NDProof("and-intro", goal, (self.gen(goal.left, d, scope), self.gen(goal.right, d, scope)))
            if isinstance(goal, Or):
                if rng.random() < 0.5:
                    return NDProof("or-intro-l", goal, (self.gen(goal.left, d, scope),))
                return NDProof("or-intro-r", goal, (self.gen(goal.right, d, scope),))
            lab = self.label()
            inner = dict(scope)
            inner[neg(to_intuitionistic(goal))] = lab
            return NDProof("class-intro", goal, (self.gen(FALSUM, d, inner),), (lab,))
        if choice == "bot-elim":
            return NDProof("bot-elim", goal, (self.gen(FALSUM, d, scope),))
        if choice == "class-elim":
            a = to_classical(self.formula(rng.randint(0, 1)))
            return NDProof("class-elim", goal, (self.gen(a, d, scope), self.gen(neg(to_intuitionistic(a)), d, scope)))
        if choice == "imp-elim-neg":
            a = self.pick_known(scope) or self.formula(rng.randint(0, 1))
            return NDProof("imp-elim", goal, (self.gen(neg(a), d, scope), self.gen(a, d, scope)))
        if choice == "or-elim":
            a, b = self.formula(rng.randint(0, 1)), self.formula(rng.randint(0, 1))
            la, lb = self.label(), self.label()
            left, right = dict(scope), dict(scope)
            left[a], right[b] = la, lb
            return NDProof(
                "or-elim",
                goal,
                (self.gen(Or(a, b), d, scope), self.gen(goal, d, left), self.gen(goal, d, right)),
                (la, lb),
            )
        kind = rng.choice(("imp", "and-l", "and-r"))
        other = self.pick_known(scope) or self.formula(rng.randint(0, 1))
        if kind == "imp":
            return NDProof("imp-elim", goal, (self.gen(Imp(other, goal), d, scope), self.gen(other, d, scope)))
        if kind == "and-l":
            return NDProof("and-elim-l", goal, (self.gen(And(goal, other), d, scope),))
        return NDProof("and-elim-r", goal, (self.gen(And(other, goal), d, scope),))

    def pick_known(self, scope: dict) -> Optional[Formula]:
        if scope and self.rng.random() < 0.6:
            return self.rng.choice(sorted(scope, key=sort_key))
        return None


def random_proof(rng: random.Random, names: Sequence[str] = ("p", "q"), max_depth: int = 5) -> NDProof:
    gen = ProofGenerator(rng, names, max_depth)
    goal = gen.formula(rng.randint(0, 3))
    return gen.proof(goal)
