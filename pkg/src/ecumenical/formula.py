"""Ecumenical propositional formulas: construction, parsing, printing, measures."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

BOT = "bot"

_ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
_INTERNAL_RE = re.compile(r"_[a-zA-Z0-9_]+")


class FormulaError(ValueError):
    """Raised when a formula would violate the classical-wrapping invariants."""


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


def is_basic_name(name: str) -> bool:
    return name == BOT or bool(_ATOM_RE.fullmatch(name)) or bool(_INTERNAL_RE.fullmatch(name))


@dataclass(frozen=True)
class BasicI:
    name: str

    def __post_init__(self):
        if not is_basic_name(self.name):
            raise FormulaError(f"invalid basic sentence {self.name!r}")

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class BasicC:
    name: str

    def __post_init__(self):
        if not is_basic_name(self.name):
            raise FormulaError(f"invalid basic sentence {self.name!r}")

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Classical:
    inner: "Formula"

    def __post_init__(self):
        if isinstance(self.inner, Classical):
            raise FormulaError("classical annotation cannot be nested")
        if not isinstance(self.inner, (And, Or, Imp)):
            raise FormulaError("classical basics are written with BasicC, not Classical")

    def __str__(self):
        return render(self)


Formula = Union[BasicI, BasicC, And, Or, Imp, Classical]
Binary = (And, Or, Imp)

FALSUM = BasicI(BOT)


def atom(name: str) -> BasicI:
    return BasicI(name)


def neg(f: Formula) -> Imp:
    return Imp(f, FALSUM)


def is_neg(f: Formula) -> bool:
    return isinstance(f, Imp) and f.right == FALSUM


def iff(a: Formula, b: Formula) -> And:
    return And(Imp(a, b), Imp(b, a))


def to_intuitionistic(f: Formula) -> Formula:
    """Drop the outermost classical annotation (A^c becomes A^i)."""
    if isinstance(f, BasicC):
        return BasicI(f.name)
    if isinstance(f, Classical):
        return f.inner
    return f


def to_classical(f: Formula) -> Formula:
    """Put a classical annotation on the outermost node."""
    if isinstance(f, BasicI):
        return BasicC(f.name)
    if isinstance(f, (BasicC, Classical)):
        return f
    return Classical(f)


def is_classical(f: Formula) -> bool:
    return isinstance(f, (BasicC, Classical))


# ---------------------------------------------------------------- measures


def complexity(f: Formula) -> int:
    if isinstance(f, BasicI):
        return 0
    if isinstance(f, BasicC):
        return 1
    if isinstance(f, Classical):
        return complexity(f.inner) + 1
    return complexity(f.left) + complexity(f.right) + 1


def subformulas(f: Formula) -> frozenset:
    out: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, BasicC):
            stack.append(BasicI(g.name))
        elif isinstance(g, Classical):
            stack.append(g.inner)
        elif isinstance(g, Binary):
            stack.extend((g.left, g.right))
    return frozenset(out)


def atoms(f: Formula) -> frozenset:
    """Atom names occurring in f, falsum excluded."""
    names = set()
    for g in subformulas(f):
        if isinstance(g, (BasicI, BasicC)) and g.name != BOT:
            names.add(g.name)
    return frozenset(names)


def is_intuitionistic(f: Formula) -> bool:
    return not any(is_classical(g) for g in subformulas(f))


def dn_translate(f: Formula) -> Formula:
    if isinstance(f, BasicI):
        return f
    if isinstance(f, BasicC):
        return neg(neg(BasicI(f.name)))
    if isinstance(f, Classical):
        return neg(neg(dn_translate(f.inner)))
    return type(f)(dn_translate(f.left), dn_translate(f.right))


def sort_key(f: Formula):
    return (complexity(f), render(f))


# ---------------------------------------------------------------- printing

# binding strength: imp 1, or 2, and 3, unit 4
def _prec(f: Formula) -> int:
    if isinstance(f, Imp) and not is_neg(f):
        return 1
    if isinstance(f, Or):
        return 2
    if isinstance(f, And):
        return 3
    return 4


def _wrap(f: Formula, need: int) -> str:
    s = render(f)
    return f"({s})" if _prec(f) < need else s


def render(f: Formula) -> str:
    if isinstance(f, BasicI):
        return f.name
    if isinstance(f, BasicC):
        return f"{f.name}^c"
    if isinstance(f, Classical):
        return f"({render(f.inner)})^c"
    if isinstance(f, Imp):
        if f.right == FALSUM:
            return "~" + _wrap(f.left, 4)
        return f"{_wrap(f.left, 2)} -> {_wrap(f.right, 1)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, 2)} | {_wrap(f.right, 3)}"
    if isinstance(f, And):
        return f"{_wrap(f.left, 3)} & {_wrap(f.right, 4)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><->|->|\^i|\^c|[|&~()])|(?P<name>[a-z_][a-zA-Z0-9_]*)|(?P<bad>\S))"
)


class _Parser:
    def __init__(self, text: str, allow_iff: bool, allow_internal: bool):
        self.text = text
        self.allow_iff = allow_iff
        self.allow_internal = allow_internal
        self.tokens: list[tuple[str, str, int]] = []
        raw = text.encode("utf-8")
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group("bad") is not None:
                offset = len(text[: m.start("bad")].encode("utf-8"))
                raise ParseError(f"unexpected character {m.group('bad')!r}", offset, self._unit_start())
            if m.group("op") is not None:
                kind, val, start = m.group("op"), m.group("op"), m.start("op")
            else:
                val, start = m.group("name"), m.start("name")
                if val == BOT:
                    kind = "bot"
                elif val.startswith("_") and not allow_internal:
                    raise ParseError(f"reserved name {val!r}", len(text[:start].encode("utf-8")), ["ATOM"])
                else:
                    kind = "ATOM"
            self.tokens.append((kind, val, len(text[:start].encode("utf-8"))))
            pos = m.end()
        self.end_offset = len(raw)
        self.i = 0

    @staticmethod
    def _unit_start():
        return ["ATOM", "bot", "~", "("]

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def offset(self) -> int:
        return self.tokens[self.i][2] if self.i < len(self.tokens) else self.end_offset

    def fail(self, expected):
        tok = self.peek()
        what = "end of input" if tok is None else f"token {self.tokens[self.i][1]!r}"
        raise ParseError(f"unexpected {what}", self.offset(), expected)

    def take(self, kind: str):
        if self.peek() != kind:
            self.fail([kind])
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek() is not None:
            follow = ["->", "|", "&", "^c", "^i"] + (["<->"] if self.allow_iff else [])
            self.fail(follow)
        return f

    def formula(self) -> Formula:
        left = self.imp()
        if self.allow_iff and self.peek() == "<->":
            self.i += 1
            right = self.imp()
            return iff(left, right)
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.i += 1
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unit()
        while self.peek() == "&":
            self.i += 1
            f = And(f, self.unit())
        return f

    def unit(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.i += 1
            return neg(self.unit())
        if tok in ("ATOM", "bot"):
            name = self.tokens[self.i][1]
            self.i += 1
            return self.sup(BasicI(name))
        if tok == "(":
            self.i += 1
            inner = self.formula()
            self.take(")")
            return self.sup(inner)
        self.fail(self._unit_start())

    def sup(self, f: Formula) -> Formula:
        tok = self.peek()
        if tok not in ("^i", "^c"):
            return f
        start = self.offset()
        if is_classical(f):
            what = "intuitionistic mark on a classical formula" if tok == "^i" else "classical annotation cannot be nested"
            raise ParseError(what, start)
        self.i += 1
        if self.peek() in ("^i", "^c"):
            raise ParseError("a unit takes at most one annotation", self.offset())
        return to_classical(f) if tok == "^c" else f


def parse(text: str, *, allow_iff: bool = False, allow_internal: bool = False) -> Formula:
    """Parse surface syntax.  ``allow_iff`` enables the ``A <-> B`` shorthand."""
    return _Parser(text, allow_iff, allow_internal).parse()


# ---------------------------------------------------------------- enumeration


def enumerate_formulas(
    names: Iterable[str],
    max_connectives: int,
    *,
    classical: bool = True,
    falsum: bool = True,
) -> Iterator[Formula]:
    """All formulas over ``names`` with at most ``max_connectives`` binary connectives.

    With ``classical`` every node may additionally carry a classical mark
    (never nested).  Order is deterministic.
    """
    names = sorted(names)
    by_size: list[list[Formula]] = []
    base: list[Formula] = [BasicI(n) for n in names]
    if falsum:
        base.append(FALSUM)
    if classical:
        base += [BasicC(n) for n in names]
    by_size.append(base)
    for n in range(1, max_connectives + 1):
        level: list[Formula] = []
        for k in range(n):
            for left, right in itertools.product(by_size[k], by_size[n - 1 - k]):
                for ctor in (And, Or, Imp):
                    g = ctor(left, right)
                    level.append(g)
                    if classical:
                        level.append(Classical(g))
        by_size.append(level)
    for level in by_size:
        yield from level


def enumerate_by_complexity(
    names: Iterable[str],
    max_complexity: int,
    *,
    classical: bool = True,
    falsum: bool = True,
) -> Iterator[Formula]:
    """All formulas over ``names`` whose complexity is at most ``max_complexity``.

    Classical marks count toward complexity, so ``p^c`` sits beside ``p & q``.
    """
    names = sorted(names)
    basics = names + ([BOT] if falsum else [])
    levels: list[list[Formula]] = [[BasicI(n) for n in basics]]
    for c in range(1, max_complexity + 1):
        level: list[Formula] = []
        if classical and c == 1:
            level += [BasicC(n) for n in basics]
        binaries = []
        for k in range(c):
            for left, right in itertools.product(levels[k], levels[c - 1 - k]):
                binaries += [And(left, right), Or(left, right), Imp(left, right)]
        if classical:
            level += [Classical(g) for g in levels[c - 1] if isinstance(g, Binary)]
        level += binaries
        levels.append(level)
    for level in levels:
        yield from level
