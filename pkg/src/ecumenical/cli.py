"""Command-line front end.

Exit codes: 0 when the verdict is positive, 1 when it is negative (the
report carries the witness), 2 for usage, parse and configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import base as B
from . import suite
from .formula import BOT, Formula, ParseError, atoms, complexity, dn_translate, is_intuitionistic, is_basic_name, parse, render
from .prover import ProofError, check_nd, decide_strong, proof_from_text, proof_to_text
from .semantics import GLOBAL, LOCAL, STRONG, Judgement, SemanticsError, explain, find_weak_counterexample, holds, valid_set
from .simulation import SimulationError, completeness_roundtrip, derivation_to_text
from .universe import Universe, UniverseError, build_universe, default_config, parse_config

KIND_NAMES = {"local": LOCAL, "global": GLOBAL, "strong": STRONG}


class UsageError(Exception):
    pass


def parse_sequent(text: str) -> tuple:
    """``"A, B |- C"`` or a bare ``"C"``; ``<->`` is accepted as sugar."""
    if "|-" in text:
        lhs, rhs = text.rsplit("|-", 1)
        ctx = [parse(part, allow_iff=True) for part in lhs.split(",") if part.strip()]
    else:
        rhs, ctx = text, []
    return ctx, parse(rhs, allow_iff=True)


def sequent_text(ctx: Sequence[Formula], goal: Formula) -> str:
    return f"{', '.join(render(g) for g in ctx)} |- {render(goal)}".strip()


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_base(path: str) -> B.Base:
    try:
        return B.parse_base(_read(path))
    except B.BaseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _universe(spec: Optional[str], formulas: Sequence[Formula]) -> Universe:
    if spec:
        cfg = parse_config(spec)
    else:
        names = set().union(*(atoms(f) for f in formulas)) or {"p"}
        cfg = default_config(sorted(names))
    return build_universe(cfg)


def _universe_lines(U: Universe) -> list:
    return [
        f"universe: {U.config.describe()}",
        f"fingerprint: {U.config.fingerprint()}",
        f"pool: {U.k} rules, {len(U.bases)} consistent bases",
    ]


def _count(n: int, noun: str) -> str:
    return f"{n} {noun}" + ("" if n == 1 else "s")


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> tuple:
    f = parse(args.formula, allow_iff=True)
    lines = [
        f"input: {args.formula}",
        f"formula: {render(f)}",
        f"complexity: {complexity(f)}",
        f"atoms: {', '.join(sorted(atoms(f))) or '-'}",
        f"intuitionistic: {_yes(is_intuitionistic(f))}",
        f"translation: {render(dn_translate(f))}",
    ]
    return 0, lines


def cmd_derive(args) -> tuple:
    S = _load_base(args.base)
    for name in [args.goal, *args.assume]:
        if not is_basic_name(name):
            raise UsageError(f"not a basic sentence: {name!r}")
    ok = B.derives(S, args.assume, args.goal)
    lines = [
        f"base: {args.base} ({_count(len(S), 'rule')})",
        f"sequent: {' '.join(filter(None, [', '.join(sorted(args.assume)), '|-', args.goal]))}",
        f"derivable: {_yes(ok)}",
        "provenance: exact (saturation)",
    ]
    if ok:
        lines += ["derivation:", B.derivation_to_text(B.derive_witness(S, args.assume, args.goal), 1)]
    return (0 if ok else 1), lines


def cmd_check_base(args) -> tuple:
    S = _load_base(args.base)
    ok = B.is_consistent(S)
    basics = sorted(S.basics() - {BOT})
    lines = [
        f"base: {args.base} ({_count(len(S), 'rule')})",
        f"basics: {', '.join(basics) or '-'}",
        f"consistent: {_yes(ok)}",
    ]
    if ok and args.vocab:
        vocab = _vocab(args.vocab)
        lines.append(f"bot-complete over {','.join(vocab)}: {_yes(B.is_bot_complete(S, vocab))}")
    if not ok:
        lines += ["derivation of bot:", B.derivation_to_text(B.derive_witness(S, (), BOT), 1)]
    return (0 if ok else 1), lines


def _vocab(text: str) -> list:
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [v for v in names if not is_basic_name(v) or v == BOT]
    if bad or not names:
        raise UsageError(f"bad vocabulary {text!r}")
    return names


def cmd_bot_complete(args) -> tuple:
    S = _load_base(args.base)
    vocab = _vocab(args.vocab) if args.vocab else sorted(S.basics() - {BOT})
    if not B.is_consistent(S):
        return 1, [f"base: {args.base}", "consistent: no", "an inconsistent base has no bot-complete extension"]
    T = B.bot_complete(S, vocab)
    added = [r for r in T.rules if r not in S]
    lines = [
        f"base: {args.base} ({_count(len(S), 'rule')})",
        f"vocab: {','.join(vocab)}",
        f"added: {', '.join(B.rule_to_text(r) for r in added) or '-'}",
        "completed base:",
        B.base_to_text(T).rstrip("\n"),
    ]
    return 0, lines


def cmd_decide(args) -> tuple:
    ctx, goal = parse_sequent(args.sequent)
    exact = decide_strong(ctx, goal)
    lines = [
        f"sequent: {sequent_text(ctx, goal)}",
        f"strong (exact, via prover): {'valid' if exact else 'invalid'}",
    ]
    try:
        U = _universe(args.universe, list(ctx) + [goal])
    except UniverseError as exc:
        if args.universe:
            raise
        lines.append(f"universe: skipped ({exc})")
        return (0 if exact else 1), lines
    strong = bool(valid_set(U, STRONG, ctx, goal)[U.consistent].all())
    weak = bool(valid_set(U, GLOBAL, ctx, goal)[U.consistent].all())
    lines += _universe_lines(U)
    lines += [
        f"strong (universe-relative): {'valid-in-universe' if strong else 'refuted-in-universe'}",
        f"weak (universe-relative): {'valid-in-universe' if weak else 'refuted-in-universe'}",
    ]
    if strong != exact:
        lines.append("disagreement: the universe-relative strong verdict differs from the prover")
    return (0 if exact else 1), lines


def _base_id(U: Universe, path: Optional[str]) -> Optional[int]:
    if path is None:
        return None
    S = _load_base(path)
    return U.base_id(U.core.union(S.rules))


def cmd_universe_check(args) -> tuple:
    ctx, goal = parse_sequent(args.sequent)
    U = _universe(args.universe, list(ctx) + [goal])
    kind = KIND_NAMES[args.kind]
    S = _base_id(U, args.base)
    lines = [f"sequent: {sequent_text(ctx, goal)}", f"kind: {kind}"] + _universe_lines(U)
    lines.append("provenance: universe-relative")
    if S is not None:
        ok = holds(U, kind, S, ctx, goal)
        lines += [f"base: {S} {U.describe_base(S)}", f"verdict: {'holds' if ok else 'fails'}"]
        j = Judgement(kind, S, tuple(ctx), goal)
    else:
        X = valid_set(U, kind, ctx, goal)
        bad = [m for m in U.bases if not X[m]]
        ok = not bad
        lines.append(f"verdict: {'valid-in-universe' if ok else 'refuted-in-universe'}")
        if bad:
            lines += [f"refuting bases: {len(bad)}", f"first refuting base: {bad[0]} {U.describe_base(bad[0])}"]
        j = Judgement(kind, bad[0] if bad else 0, tuple(ctx), goal)
    if args.trace:
        trace = explain(U, j)
        lines += ["trace:"] + trace.lines(1)
    return (0 if ok else 1), lines


def cmd_counterexample(args) -> tuple:
    ctx, goal = parse_sequent(args.sequent)
    U = _universe(args.universe, list(ctx) + [goal])
    kind = KIND_NAMES[args.kind]
    lines = [f"sequent: {sequent_text(ctx, goal)}", f"kind: {kind}"] + _universe_lines(U)
    lines.append("provenance: universe-relative")
    found = find_weak_counterexample(U, ctx, goal, kind)
    if found is None:
        lines.append("counterexample: none in this universe")
        return 0, lines
    S, trace = found
    lines += [f"counterexample: base {S} {U.describe_base(S)}", f"trace depth: {trace.depth()}"]
    lines += ["trace:"] + trace.lines(1)
    return 1, lines


def cmd_check_proof(args) -> tuple:
    try:
        proof = proof_from_text(_read(args.proof), allow_internal=False)
    except (ProofError, ParseError) as exc:
        raise UsageError(f"{args.proof}: {exc}") from None
    lines = [f"proof: {args.proof}"]
    try:
        hyps, concl = check_nd(proof)
    except ProofError as exc:
        return 1, lines + ["checked: no", f"error: {exc}"]
    proved = sequent_text(sorted(hyps, key=render), concl)
    lines += ["checked: yes", f"proves: {proved}"]
    if args.sequent:
        ctx, goal = parse_sequent(args.sequent)
        matches = concl == goal and hyps <= set(ctx)
        lines.append(f"matches {sequent_text(ctx, goal)}: {_yes(matches)}")
        return (0 if matches else 1), lines
    return 0, lines


def cmd_simulate(args) -> tuple:
    ctx, goal = parse_sequent(args.sequent)
    lines = [f"sequent: {sequent_text(ctx, goal)}"]
    if not decide_strong(ctx, goal):
        return 1, lines + ["strong (exact, via prover): invalid", "no simulation: the sequent is not strongly valid"]
    rt = completeness_roundtrip(ctx, goal, args.strategy)
    N, run = rt.simulation, rt.normalization
    lines += [
        "strong (exact, via prover): valid",
        f"atom map: {len(N.alpha.forward)} formulas",
    ]
    lines += [f"  {a} = {render(f)}" for f, a in sorted(N.alpha.forward.items(), key=lambda kv: kv[1])]
    lines += [
        f"simulation base: {len(N.base)} rules",
        f"context inconsistent in the simulation: {_yes(rt.inconsistent_branch)}",
        f"normalization ({args.strategy}): {run.steps} steps, phases {run.phases}",
    ]
    if args.emit in ("base", "all"):
        lines += ["simulation base rules:", N.to_text().rstrip("\n")]
    if args.emit in ("atomic", "all"):
        lines += ["normal atomic derivation:", derivation_to_text(run.result, N)]
    lines += ["proof:", proof_to_text(rt.proof)]
    return 0, lines


def cmd_paper_suite(args) -> tuple:
    chosen = sorted(set(args.criterion)) if args.criterion else sorted(suite.CRITERIA)
    lines = []
    failed = 0
    for n in chosen:
        title = suite.CRITERIA[n][0]
        checks, _ = suite.run_criterion(n)
        lines.append(f"criterion {n}: {title}")
        for c in checks:
            lines.append("  " + c.line())
            failed += not c.passed
    total = sum(1 for line in lines if line.startswith("  "))
    lines.append(f"{total - failed} of {total} checks passed")
    return (0 if failed == 0 else 1), lines


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ecumenical", description="Base-extension semantics workbench.")
    sub = ap.add_subparsers(dest="command", required=True)

    def universe_flag(p):
        p.add_argument("--universe", metavar="CONFIG",
                       help="e.g. 'vocab=p,q;max_premises=1;max_discharge=1;pool_cap=16'")

    p = sub.add_parser("parse", help="parse and print a formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("derive", help="atomic derivability in a base")
    p.add_argument("goal")
    p.add_argument("--base", required=True, metavar="FILE")
    p.add_argument("--assume", action="append", default=[], metavar="BASIC")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check-base", help="consistency of a base")
    p.add_argument("--base", required=True, metavar="FILE")
    p.add_argument("--vocab", help="also report bot-completeness over these atoms")
    p.set_defaults(func=cmd_check_base)

    p = sub.add_parser("bot-complete", help="extend a base to a bot-complete one")
    p.add_argument("--base", required=True, metavar="FILE")
    p.add_argument("--vocab")
    p.set_defaults(func=cmd_bot_complete)

    p = sub.add_parser("decide", help="exact strong validity, with universe-relative verdicts")
    p.add_argument("sequent")
    universe_flag(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("check-proof", help="check a natural deduction proof file")
    p.add_argument("--proof", required=True, metavar="FILE")
    p.add_argument("--sequent")
    p.set_defaults(func=cmd_check_proof)

    p = sub.add_parser("universe-check", help="evaluate a judgement over a finite universe")
    p.add_argument("sequent")
    universe_flag(p)
    p.add_argument("--kind", choices=sorted(KIND_NAMES), default="global")
    p.add_argument("--base", metavar="FILE", help="judge at this base instead of at every base")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_universe_check)

    p = sub.add_parser("counterexample", help="first base refuting a judgement")
    p.add_argument("sequent")
    universe_flag(p)
    p.add_argument("--kind", choices=sorted(KIND_NAMES), default="global")
    p.add_argument("--trace", action="store_true", help="accepted for symmetry; traces are always shown")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("simulate", help="completeness round trip through a simulation base")
    p.add_argument("sequent")
    p.add_argument("--strategy", choices=("degree", "innermost"), default="degree")
    p.add_argument("--emit", choices=("proof", "base", "atomic", "all"), default="proof")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("paper-suite", help="run the theorem and property table")
    p.add_argument("--criterion", type=int, action="append", choices=sorted(suite.CRITERIA))
    p.set_defaults(func=cmd_paper_suite)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> tuple:
    """Execute one command; returns (exit code, report text)."""
    args = build_parser().parse_args(argv)
    try:
        code, lines = args.func(args)
    except ParseError as exc:
        return 2, f"error: parse error: {exc}\n"
    except (UsageError, UniverseError, SemanticsError, B.BaseError) as exc:
        return 2, f"error: {exc}\n"
    except SimulationError as exc:
        return 1, f"error: {exc}\n"
    return code, "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run(argv)
    (sys.stderr if text.startswith("error:") else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
