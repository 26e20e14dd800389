"""Temporal specification language: parsing, printing, monitoring."""

from .ast import (
    And,
    Const,
    Diff,
    Eventually,
    Expr,
    Formula,
    Globally,
    Norm,
    Not,
    Or,
    Predicate,
    Scale,
    Signal,
    Sum,
    Until,
    expr_dim,
    horizon,
    innermost_predicates,
    resolve_dim,
    signal_names,
    to_source,
    to_source_expr,
    validate_signals,
)
from .parser import parse
from .semantics import eval_expr, robustness, satisfies

__all__ = [
    "And",
    "Const",
    "Diff",
    "Eventually",
    "Expr",
    "Formula",
    "Globally",
    "Norm",
    "Not",
    "Or",
    "Predicate",
    "Scale",
    "Signal",
    "Sum",
    "Until",
    "eval_expr",
    "expr_dim",
    "horizon",
    "innermost_predicates",
    "parse",
    "resolve_dim",
    "robustness",
    "satisfies",
    "signal_names",
    "to_source",
    "to_source_expr",
    "validate_signals",
]
