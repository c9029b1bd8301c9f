"""Base-extension semantics for ecumenical propositional logic.

Modules: ``formula`` (syntax), ``base`` (atomic systems), ``universe``
(finite families of extensions), ``semantics`` (weak and strong validity),
``prover`` (natural deduction and a decider), ``simulation`` (simulation
bases and normalization), ``kripke`` (test oracle), ``suite`` and ``cli``.
"""

from .base import Base, axiom, derives, is_consistent, parse_base, rule
from .formula import parse, render
from .prover import decide_ipc, decide_strong
from .universe import build_universe, default_config

__version__ = "0.1.0"

__all__ = [
    "Base",
    "axiom",
    "build_universe",
    "decide_ipc",
    "decide_strong",
    "default_config",
    "derives",
    "is_consistent",
    "parse",
    "parse_base",
    "render",
    "rule",
]
