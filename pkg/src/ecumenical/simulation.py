"""Simulation bases: atomic mirrors of natural deduction, their normalization,
and the round trip from strong validity to a checked ecumenical proof."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import base as B
from .base import Apply, Assume, AtomicRule, Base, Premise
from .formula import (
    BOT,
    FALSUM,
    And,
    BasicC,
    BasicI,
    Classical,
    Formula,
    Imp,
    Or,
    atoms,
    is_classical,
    neg,
    render,
    sort_key,
    subformulas,
    to_intuitionistic,
)
from .prover import NDProof, ProofError, check_nd, decide_strong, read_sexp

INTRO = frozenset({"imp-int", "and-int", "or-int-1", "or-int-2", "class-int"})
ELIM = frozenset({"imp-elim", "and-elim-1", "and-elim-2", "or-elim", "class-elim", "bot-elim"})
FRESH_SIGIL = "_"


class SimulationError(ValueError):
    pass


# ---------------------------------------------------------------- Γ*, α, 𝒩


def gamma_star(context: Sequence[Formula], goal: Formula) -> frozenset:
    closure: set = set()
    for f in list(context) + [goal]:
        closure |= subformulas(f)
    for f in list(closure):
        if is_classical(f):
            closure |= subformulas(neg(to_intuitionistic(f)))
    return frozenset(closure)


@dataclass(frozen=True)
class AlphaMap:
    forward: dict
    backward: dict

    def atom(self, f: Formula) -> str:
        try:
            return self.forward[f]
        except KeyError:
            raise SimulationError(f"formula {render(f)} is not mapped") from None

    def formula(self, atom: str) -> Formula:
        if atom in self.backward:
            return self.backward[atom]
        if atom == BOT:
            return FALSUM
        raise SimulationError(f"unmapped atom {atom}")

    def atoms(self) -> frozenset:
        return frozenset(self.backward)


def make_alpha(gs: Iterable[Formula]) -> AlphaMap:
    """Basic intuitionistic sentences name themselves; everything else gets
    ``_1``, ``_2``, ... in (complexity, rendering) order."""
    forward, backward = {}, {}
    counter = itertools.count(1)
    for f in sorted(set(gs), key=sort_key):
        if isinstance(f, BasicI):
            name = f.name
        else:
            name = f"{FRESH_SIGIL}{next(counter)}"
        forward[f] = name
        backward[name] = f
    return AlphaMap(forward, backward)


def degree(f: Formula) -> int:
    if isinstance(f, BasicI):
        return 0
    if isinstance(f, (BasicC, Classical)):
        return degree(to_intuitionistic(f)) + 2
    return degree(f.left) + degree(f.right) + 1


def degree_of(alpha: AlphaMap, atom: str) -> int:
    return degree(alpha.formula(atom))


@dataclass
class NBase:
    base: Base
    alpha: AlphaMap
    vocab: tuple
    provenance: dict = field(default_factory=dict)
    lookup: dict = field(default_factory=dict)

    def tag(self, r: AtomicRule) -> tuple:
        """(schema, source formula, instantiating atom or None)."""
        try:
            return self.provenance[r.key]
        except KeyError:
            raise SimulationError(f"rule {B.rule_to_text(r)} is not in the simulation base") from None

    def schema(self, r: AtomicRule) -> str:
        return self.tag(r)[0]

    def rule(self, schema: str, source: Optional[Formula] = None, q: Optional[str] = None) -> AtomicRule:
        return self.lookup[(schema, source, q)]

    def to_text(self) -> str:
        comments = {}
        for key, (schema, src, q) in self.provenance.items():
            note = f"schema={schema}"
            if src is not None:
                note += f", formula={render(src)}"
            if q is not None:
                note += f", q={q}"
            comments[key] = note
        return B.base_to_text(self.base, comments)


def build_N(gs: Iterable[Formula], alpha: AlphaMap, vocab: Optional[Iterable[str]] = None) -> NBase:
    gs = sorted(set(gs), key=sort_key)
    needed = set(alpha.atoms()) | {BOT}
    vocab = tuple(sorted(needed if vocab is None else set(vocab)))
    if not needed <= set(vocab):
        raise SimulationError(f"vocab too small: missing {sorted(needed - set(vocab))}")
    rules: list = []
    prov: dict = {}
    lookup: dict = {}

    def add(schema, src, q, premises, concl):
        r = AtomicRule(premises, concl)
        lookup[(schema, src, q)] = r
        if r.key not in prov:
            prov[r.key] = (schema, src, q)
            rules.append(r)

    a = alpha.atom
    for D in gs:
        pD = a(D)
        if isinstance(D, Imp):
            add("imp-int", D, None, [Premise([a(D.left)], a(D.right))], pD)
            add("imp-elim", D, None, [Premise((), pD), Premise((), a(D.left))], a(D.right))
        elif isinstance(D, And):
            add("and-int", D, None, [Premise((), a(D.left)), Premise((), a(D.right))], pD)
            add("and-elim-1", D, None, [Premise((), pD)], a(D.left))
            add("and-elim-2", D, None, [Premise((), pD)], a(D.right))
        elif isinstance(D, Or):
            add("or-int-1", D, None, [Premise((), a(D.left))], pD)
            add("or-int-2", D, None, [Premise((), a(D.right))], pD)
            for q in vocab:
                add("or-elim", D, q, [Premise((), pD), Premise([a(D.left)], q), Premise([a(D.right)], q)], q)
        elif is_classical(D):
            pn = a(neg(to_intuitionistic(D)))
            add("class-int", D, None, [Premise([pn], BOT)], pD)
            add("class-elim", D, None, [Premise((), pD), Premise((), pn)], BOT)
    for q in vocab:
        add("bot-elim", None, q, [Premise((), BOT)], q)
    # Base keeps the first rule per key, matching the provenance recorded above
    return NBase(Base(rules), alpha, vocab, prov, lookup)


def simulation_for(context: Sequence[Formula], goal: Formula) -> NBase:
    gs = gamma_star(context, goal)
    return build_N(gs, make_alpha(gs))


# ---------------------------------------------------------------- derivation plumbing


def subderivation(d, path: Sequence[int]):
    node = d
    for i in path:
        if not isinstance(node, Apply) or not 0 <= i < len(node.children):
            raise SimulationError(f"bad path {list(path)}")
        node = node.children[i]
    return node


def _replace(d, path: Sequence[int], new):
    if not path:
        return new
    i = path[0]
    kids = list(d.children)
    kids[i] = _replace(kids[i], path[1:], new)
    return Apply(d.rule, tuple(kids), d.labels)


def _substitute(d, label: Optional[str], proof):
    """Put ``proof`` in place of every leaf discharged by ``label``."""
    if label is None:
        return d
    if isinstance(d, Assume):
        return proof if d.label == label else d
    return Apply(d.rule, tuple(_substitute(c, label, proof) for c in d.children), d.labels)


def relabel(d):
    """Rename discharge labels to 1, 2, ... in preorder; keeps binding structure."""
    counter = itertools.count(1)

    def walk(node, env: dict):
        if isinstance(node, Assume):
            if node.label is None:
                return node
            return Assume(node.basic, env.get(node.label, node.label))
        kids, fresh = [], []
        for lab in node.labels:
            fresh.append(None if lab is None else str(next(counter)))
        for child, old, new in zip(node.children, node.labels, fresh):
            inner = env if old is None else {**env, old: new}
            kids.append(walk(child, inner))
        return Apply(node.rule, tuple(kids), tuple(fresh))

    return walk(d, {})


def _nodes(d, path=()):
    """Post-order (path, node) pairs."""
    if isinstance(d, Apply):
        for i, c in enumerate(d.children):
            yield from _nodes(c, path + (i,))
    yield path, d


# ---------------------------------------------------------------- redexes


@dataclass(frozen=True)
class Redex:
    kind: str  # "maximum-formula" | "maximum-segment"
    start: tuple  # introduction or bot-elim node
    vertex: tuple  # last occurrence of the segment
    elim: tuple  # elimination taking the vertex as major premise
    atom: str
    length: int


def find_redexes(d, N: NBase) -> list:
    """All maximum formulas and segments, ordered by elimination node in
    post-order (innermost first, then left to right)."""
    nodes = dict(_nodes(d))
    order = {p: k for k, p in enumerate(nodes)}
    out = []
    for path, node in nodes.items():
        if not isinstance(node, Apply):
            continue
        schema = N.schema(node.rule)
        if schema not in INTRO and schema != "bot-elim":
            continue
        cur, length = path, 1
        while cur and N.schema(nodes[cur[:-1]].rule) == "or-elim" and cur[-1] in (1, 2):
            cur, length = cur[:-1], length + 1
        if not cur:
            continue
        parent = nodes[cur[:-1]]
        if N.schema(parent.rule) in ELIM and cur[-1] == 0:
            kind = "maximum-formula" if length == 1 and schema in INTRO else "maximum-segment"
            out.append(Redex(kind, path, cur, cur[:-1], node.conclusion, length))
    out.sort(key=lambda r: (order[r.elim], order[r.start]))
    return out


def is_normal(d, N: NBase) -> bool:
    return not find_redexes(d, N)


def redex_degree(r: Redex, N: NBase) -> int:
    return degree_of(N.alpha, r.atom)


def derivation_degree(d, N: NBase) -> int:
    return max((redex_degree(r, N) for r in find_redexes(d, N)), default=0)


# ---------------------------------------------------------------- reductions


def reduce_once(d, r: Redex, N: NBase):
    if r not in find_redexes(d, N):
        raise SimulationError("stale redex")
    E = subderivation(d, r.elim)
    if r.length > 1:
        new = _permute(E, N)
    else:
        new = _contract(E, N)
    return relabel(_replace(d, r.elim, new))


def _contract(E: Apply, N: NBase):
    M = E.children[0]
    schema = N.schema(M.rule)
    if schema == "bot-elim":
        inner = M.children[0]
        if E.conclusion == BOT:
            return inner
        return Apply(N.rule("bot-elim", None, E.conclusion), (inner,))
    if schema == "and-int":
        return M.children[0] if M.children[0].conclusion == E.conclusion else M.children[1]
    if schema == "imp-int":
        return _substitute(M.children[0], M.labels[0], E.children[1])
    if schema == "class-int":
        return _substitute(M.children[0], M.labels[0], E.children[1])
    if schema in ("or-int-1", "or-int-2"):
        arg = M.children[0]
        i = 1 if E.rule.premises[1].discharge == {arg.conclusion} else 2
        return _substitute(E.children[i], E.labels[i], arg)
    raise SimulationError(f"no reduction for {schema}")


def _permute(E: Apply, N: NBase):
    """Move E above the or-elimination feeding its major premise."""
    O = E.children[0]
    _, D, _ = N.tag(O.rule)
    rest = E.children[1:]
    branches = []
    for i in (1, 2):
        branches.append(Apply(E.rule, (O.children[i],) + rest, E.labels))
    target = N.rule("or-elim", D, E.conclusion)
    return Apply(target, (O.children[0], branches[0], branches[1]), O.labels)


# ---------------------------------------------------------------- normalization


@dataclass
class NormalizationRun:
    result: object
    steps: int
    phases: list  # (degree before, degree after) per degree-directed phase
    peak_overshoot: int = 0  # largest transient degree above a phase's start


MAX_STEPS = 20000


def _critical(d, N: NBase) -> Optional[Redex]:
    reds = find_redexes(d, N)
    if not reds:
        return None
    top = max(redex_degree(r, N) for r in reds)
    best = [r for r in reds if redex_degree(r, N) == top]
    for r in best:
        if not any(o.elim != r.elim and o.elim[: len(r.elim)] == r.elim for o in best):
            return r
    return best[0]


def normalize(d, N: NBase, strategy: str = "degree", *, max_steps: int = MAX_STEPS) -> NormalizationRun:
    d = relabel(d)
    steps = 0
    phases: list = []
    overshoot = 0

    def step(r):
        nonlocal d, steps
        if steps >= max_steps:
            raise SimulationError(f"normalization exceeded {max_steps} steps")
        d = reduce_once(d, r, N)
        steps += 1

    if strategy in ("degree", "degree-directed"):
        while True:
            start = derivation_degree(d, N)
            if start == 0:
                break
            while True:
                now = derivation_degree(d, N)
                if now < start:
                    break
                overshoot = max(overshoot, now - start)
                step(_critical(d, N))
            phases.append((start, derivation_degree(d, N)))
    elif strategy not in ("innermost", "leftmost-innermost"):
        raise SimulationError(f"unknown strategy {strategy!r}")
    while True:
        reds = find_redexes(d, N)
        if not reds:
            break
        step(reds[0])
    return NormalizationRun(d, steps, phases, overshoot)


# ---------------------------------------------------------------- consistency


def ends_in_intro(d, N: NBase) -> bool:
    return isinstance(d, Apply) and N.schema(d.rule) in INTRO


def consistency_of_N(N: NBase, samples: Optional[Iterable] = None) -> bool:
    """Saturation says ⊥ is underivable, and sampled normal derivations not
    ending in an introduction keep an undischarged assumption."""
    saturated = B.is_consistent(N.base)
    if samples is None:
        samples = []
        for hyp in N.vocab:
            for goal in N.vocab:
                w = B.derive_witness(N.base, {hyp} if hyp != BOT else (), goal)
                if w is not None:
                    samples.append(w)
    structural = True
    for s in samples:
        nf = normalize(s, N).result
        opened, concl = B.check_derivation(N.base, nf)
        if not ends_in_intro(nf, N) and not opened:
            structural = False
        if concl == BOT and not opened:
            structural = False
    return saturated and structural


# ---------------------------------------------------------------- translations


def forward(p: NDProof, N: NBase):
    """Mirror a natural deduction proof inside the simulation base."""
    a = N.alpha.atom

    def go(node: NDProof):
        rule, c = node.rule, node.conclusion
        kids = tuple(go(q) for q in node.premises)
        if rule == "assume":
            return Assume(a(c), node.labels[0] if node.labels else None)
        if rule == "imp-intro":
            return Apply(N.rule("imp-int", c), kids, node.labels)
        if rule == "imp-elim":
            return Apply(N.rule("imp-elim", node.premises[0].conclusion), kids)
        if rule == "and-intro":
            return Apply(N.rule("and-int", c), kids)
        if rule in ("and-elim-l", "and-elim-r"):
            schema = "and-elim-1" if rule == "and-elim-l" else "and-elim-2"
            return Apply(N.rule(schema, node.premises[0].conclusion), kids)
        if rule in ("or-intro-l", "or-intro-r"):
            return Apply(N.rule("or-int-1" if rule == "or-intro-l" else "or-int-2", c), kids)
        if rule == "or-elim":
            return Apply(N.rule("or-elim", node.premises[0].conclusion, a(c)), kids, (None,) + node.labels)
        if rule == "bot-elim":
            return Apply(N.rule("bot-elim", None, a(c)), kids)
        if rule == "class-intro":
            return Apply(N.rule("class-int", c), kids, node.labels)
        if rule == "class-elim":
            return Apply(N.rule("class-elim", node.premises[0].conclusion), kids)
        raise SimulationError(f"cannot translate {rule}")

    return go(p)


def proof_formulas(p: NDProof) -> list:
    out = [p.conclusion]
    for q in p.premises:
        out += proof_formulas(q)
    return out


def simulation_for_proof(p: NDProof) -> NBase:
    fs = sorted(set(proof_formulas(p)), key=sort_key)
    return simulation_for(fs[:-1], fs[-1])


def back_translate(d, N: NBase) -> NDProof:
    """Read a derivation over 𝒩 as a natural deduction proof."""
    f = N.alpha.formula
    fresh = itertools.count(1)
    used = {lab for _, n in _nodes(d) for lab in ((n.label,) if isinstance(n, Assume) else n.labels) if lab}

    def vacuous() -> str:
        while True:
            lab = f"v{next(fresh)}"
            if lab not in used:
                return lab

    def labels_for(node: Apply, idx: Sequence[int]) -> tuple:
        return tuple(node.labels[i] if node.labels[i] is not None else vacuous() for i in idx)

    def go(node) -> NDProof:
        if isinstance(node, Assume):
            return NDProof("assume", f(node.basic), (), (node.label,) if node.label else ())
        schema, _, _ = N.tag(node.rule)
        c = f(node.conclusion)
        kids = tuple(go(k) for k in node.children)
        if schema == "imp-int":
            return NDProof("imp-intro", c, kids, labels_for(node, [0]))
        if schema == "class-int":
            return NDProof("class-intro", c, kids, labels_for(node, [0]))
        if schema == "or-elim":
            return NDProof("or-elim", c, kids, labels_for(node, [1, 2]))
        name = {
            "imp-elim": "imp-elim",
            "and-int": "and-intro",
            "and-elim-1": "and-elim-l",
            "and-elim-2": "and-elim-r",
            "or-int-1": "or-intro-l",
            "or-int-2": "or-intro-r",
            "class-elim": "class-elim",
            "bot-elim": "bot-elim",
        }[schema]
        if name == "and-elim-l" and isinstance(kids[0].conclusion, And) and kids[0].conclusion.left != c:
            name = "and-elim-r"
        if name == "or-intro-l" and isinstance(c, Or) and c.left != kids[0].conclusion:
            name = "or-intro-r"
        return NDProof(name, c, kids)

    return go(d)


def derivation_to_text(d, N: NBase, indent: int = 0) -> str:
    """Proof-file rendering of a derivation over 𝒩, nodes named by schema."""
    pad = "  " * indent
    if isinstance(d, Assume):
        return pad + f'(assume "{d.basic}"' + (f" {d.label}" if d.label else "") + ")"
    head = f'({N.schema(d.rule)} "{d.conclusion}"'
    if any(lab is not None for lab in d.labels):
        head += " :discharge " + " ".join(lab if lab is not None else "-" for lab in d.labels)
    kids = "\n".join(derivation_to_text(c, N, indent + 1) for c in d.children)
    return pad + head + ("\n" + kids if kids else "") + ")"


def derivation_from_text(text: str, N: NBase):
    by_shape: dict = {}
    for r in N.base.rules:
        shape = (N.schema(r), r.conclusion, tuple(p.conclusion for p in r.premises))
        by_shape.setdefault(shape, []).append(r)

    def build(node):
        if not isinstance(node, list) or len(node) < 2 or node[0][0] != "sym" or node[1][0] != "str":
            raise ProofError('each node must read (schema "atom" ...)')
        name, concl, rest = node[0][1], node[1][1], node[2:]
        if name == "assume":
            if len(rest) > 1 or any(not isinstance(x, tuple) for x in rest):
                raise ProofError("assume takes an atom and an optional label")
            return Assume(concl, rest[0][1] if rest else None)
        labels: list = []
        if rest and rest[0] == ("sym", ":discharge"):
            rest = rest[1:]
            while rest and isinstance(rest[0], tuple):
                labels.append(None if rest[0][1] == "-" else rest[0][1])
                rest = rest[1:]
        kids = tuple(build(x) for x in rest)
        found = by_shape.get((name, concl, tuple(k.conclusion for k in kids)), [])
        if len(found) != 1:
            raise ProofError(f"no unique {name} rule concluding {concl} from {[k.conclusion for k in kids]}")
        return Apply(found[0], kids, tuple(labels) if labels else ())

    return build(read_sexp(text))


def _drop_axioms(d, axioms: frozenset):
    if isinstance(d, Assume):
        return d
    if d.rule.is_axiom and d.rule.key in axioms:
        return Assume(d.rule.conclusion)
    return Apply(d.rule, tuple(_drop_axioms(c, axioms) for c in d.children), d.labels)


@dataclass
class RoundTrip:
    proof: NDProof
    simulation: NBase
    inconsistent_branch: bool
    atomic: object
    normalization: NormalizationRun


def completeness_roundtrip(context: Sequence[Formula], goal: Formula, strategy: str = "degree") -> RoundTrip:
    if not decide_strong(context, goal):
        raise SimulationError(f"precondition violation: {render(goal)} does not follow strongly from the context")
    N = simulation_for(context, goal)
    a = N.alpha.atom
    axioms = [B.axiom(a(g)) for g in context]
    full = N.base.union(axioms)
    axiom_keys = frozenset(r.key for r in axioms if r not in N.base)
    inconsistent = not B.is_consistent(full)
    target = BOT if inconsistent else a(goal)
    w = B.derive_witness(full, (), target)
    if w is None:
        raise SimulationError(f"no atomic derivation of {target} in the simulation base")
    atomic = _drop_axioms(w, axiom_keys)
    B.check_derivation(N.base, atomic)
    run = normalize(atomic, N, strategy)
    proof = back_translate(run.result, N)
    if inconsistent and goal != FALSUM:
        proof = NDProof("bot-elim", goal, (proof,))
    hyps, concl = check_nd(proof)
    if concl != goal or not hyps <= set(context):
        raise SimulationError("round trip produced the wrong sequent")
    return RoundTrip(proof, N, inconsistent, atomic, run)


def prepcomplete_mismatches(context: Sequence[Formula], goal: Formula) -> list:
    """Sampled check that strong validity of B at S matches derivability of
    its atom, for S ranging over 𝒩 plus context axioms and, for each plain
    atom, its axiom and its refutation rule.  Returns the (B, base id)
    pairs that disagree."""
    from .semantics import Evaluator
    from .universe import UniverseConfig, build_universe

    N = simulation_for(context, goal)
    a = N.alpha.atom
    plain = sorted(set().union(*(atoms(f) for f in [*context, goal])))
    extra = [B.axiom(a(g)) for g in context]
    extra += [B.axiom(x) for x in plain] + [B.rule(x, conclusion=BOT) for x in plain]
    cfg = UniverseConfig(
        vocab=tuple(v for v in N.vocab if v != BOT),
        generate=False,
        core=N.base.rules,
        extra_rules=tuple(extra),
    )
    U = build_universe(cfg)
    ev = Evaluator(U, "strong")
    out = []
    for f in sorted(gamma_star(context, goal), key=sort_key):
        sat, der = ev.truth(f), U.derivable[a(f)]
        out += [(f, m) for m in U.bases if bool(sat[m]) != bool(der[m])]
    return out
