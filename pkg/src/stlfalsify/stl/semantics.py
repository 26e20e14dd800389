"""Quantitative and boolean evaluation of formulas over traces.

robustness() implements the standard space-robustness recursion:
predicate margins at the leaves, min/max through the boolean and
temporal structure. satisfies() is an independent boolean recursion
that shares only the leaf expression evaluation, so the two can
cross-check each other. Positive robustness implies satisfaction,
negative implies violation; zero is inconclusive.

Both evaluators are strict about the trace end by default: a formula
whose horizon extends past the final sample raises HorizonError.
Opt-in truncation clamps every temporal window to the trace end and
evaluates over the nonempty intersection.
"""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError, HorizonError, SchemaError
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
    horizon,
)


def eval_expr(expr: Expr, trace) -> np.ndarray:
    """Evaluate an expression over all samples; returns an (N, d) array."""
    if isinstance(expr, Signal):
        return trace.channel(expr.name)
    if isinstance(expr, Const):
        return np.full((trace.length, 1), expr.value)
    if isinstance(expr, (Sum, Diff)):
        left = eval_expr(expr.left, trace)
        right = eval_expr(expr.right, trace)
        if left.shape[1] != right.shape[1]:
            raise SchemaError(
                f"dimension mismatch: {left.shape[1]} vs {right.shape[1]} in expression"
            )
        return left + right if isinstance(expr, Sum) else left - right
    if isinstance(expr, Scale):
        return expr.factor * eval_expr(expr.operand, trace)
    if isinstance(expr, Norm):
        vals = eval_expr(expr.operand, trace)
        return np.linalg.norm(vals, axis=1, keepdims=True)
    raise TypeError(f"not an expression: {expr!r}")


def _margins(pred: Predicate, trace) -> np.ndarray:
    """Signed margin of a predicate at every sample, as a length-N vector.

    Strict and non-strict comparisons share the same margin; only the
    boolean evaluator distinguishes them.
    """
    vals = eval_expr(pred.expr, trace)
    if vals.shape[1] != 1:
        raise SchemaError("comparison needs a scalar expression")
    v = vals[:, 0]
    if pred.op in ("<=", "<"):
        return pred.threshold - v
    return v - pred.threshold


def _window_min(arr: np.ndarray, width: int) -> np.ndarray:
    if width == 1:
        return arr
    return np.lib.stride_tricks.sliding_window_view(arr, width).min(axis=1)


def _window_max(arr: np.ndarray, width: int) -> np.ndarray:
    if width == 1:
        return arr
    return np.lib.stride_tricks.sliding_window_view(arr, width).max(axis=1)


def _rho_array(formula: Formula, trace) -> np.ndarray:
    """Robustness at every time the formula's horizon allows.

    The returned array has length N - horizon(formula); index t is the
    robustness at sample t.
    """
    if isinstance(formula, Predicate):
        return _margins(formula, trace)
    if isinstance(formula, Not):
        return -_rho_array(formula.operand, trace)
    if isinstance(formula, (And, Or)):
        left = _rho_array(formula.left, trace)
        right = _rho_array(formula.right, trace)
        n = min(len(left), len(right))
        op = np.minimum if isinstance(formula, And) else np.maximum
        return op(left[:n], right[:n])
    if isinstance(formula, (Globally, Eventually)):
        child = _rho_array(formula.operand, trace)
        width = formula.hi - formula.lo + 1
        fold = _window_min if isinstance(formula, Globally) else _window_max
        # window over child[t + lo .. t + hi] for each valid t
        return fold(child, width)[formula.lo :]
    if isinstance(formula, Until):
        left = _rho_array(formula.left, trace)
        right = _rho_array(formula.right, trace)
        lo, hi = formula.lo, formula.hi
        n_out = min(len(left), len(right)) - hi
        out = np.empty(n_out)
        for t in range(n_out):
            prefix = left[t]
            for s in range(t + 1, t + lo + 1):
                prefix = min(prefix, left[s])
            best = -np.inf
            for tp in range(t + lo, t + hi + 1):
                if tp > t:
                    prefix = min(prefix, left[tp])
                best = max(best, min(right[tp], prefix))
            out[t] = best
        return out
    raise TypeError(f"not a formula: {formula!r}")


def _check_t0(trace, t0: int) -> None:
    if not isinstance(t0, (int, np.integer)) or isinstance(t0, bool) or t0 < 0:
        raise ArgumentError(f"t0 must be a nonnegative integer, got {t0!r}")
    if t0 >= trace.length:
        raise ArgumentError(f"t0 = {t0} is past the end of a {trace.length}-sample trace")


def _rho_clamped(formula: Formula, trace, t: int, margins: dict) -> float:
    n = trace.length
    if isinstance(formula, Predicate):
        key = id(formula)
        if key not in margins:
            margins[key] = _margins(formula, trace)
        return float(margins[key][t])
    if isinstance(formula, Not):
        return -_rho_clamped(formula.operand, trace, t, margins)
    if isinstance(formula, And):
        return min(
            _rho_clamped(formula.left, trace, t, margins),
            _rho_clamped(formula.right, trace, t, margins),
        )
    if isinstance(formula, Or):
        return max(
            _rho_clamped(formula.left, trace, t, margins),
            _rho_clamped(formula.right, trace, t, margins),
        )
    if isinstance(formula, (Globally, Eventually)):
        lo, hi = t + formula.lo, min(t + formula.hi, n - 1)
        if lo > hi:
            raise HorizonError(
                f"window starting at sample {lo} lies entirely past the trace end"
            )
        vals = (_rho_clamped(formula.operand, trace, s, margins) for s in range(lo, hi + 1))
        return min(vals) if isinstance(formula, Globally) else max(vals)
    if isinstance(formula, Until):
        lo, hi = t + formula.lo, min(t + formula.hi, n - 1)
        if lo > hi:
            raise HorizonError(
                f"window starting at sample {lo} lies entirely past the trace end"
            )
        prefix = np.inf
        for s in range(t, lo):
            prefix = min(prefix, _rho_clamped(formula.left, trace, s, margins))
        best = -np.inf
        for tp in range(lo, hi + 1):
            prefix = min(prefix, _rho_clamped(formula.left, trace, tp, margins))
            best = max(best, min(_rho_clamped(formula.right, trace, tp, margins), prefix))
        return best
    raise TypeError(f"not a formula: {formula!r}")


def robustness(formula: Formula, trace, t0: int = 0, *, truncate: bool = False) -> float:
    """Quantitative robustness of the formula at sample t0 of the trace."""
    _check_t0(trace, t0)
    if truncate:
        return float(_rho_clamped(formula, trace, t0, {}))
    h = horizon(formula)
    if t0 + h > trace.length - 1:
        raise HorizonError(
            f"formula needs {h} samples beyond t0 = {t0} but the trace ends at "
            f"sample {trace.length - 1}; pass truncate=True to clamp windows"
        )
    return float(_rho_array(formula, trace)[t0])


def _sat(formula: Formula, trace, t: int, truncate: bool, values: dict) -> bool:
    n = trace.length
    if isinstance(formula, Predicate):
        key = id(formula)
        if key not in values:
            vals = eval_expr(formula.expr, trace)
            if vals.shape[1] != 1:
                raise SchemaError("comparison needs a scalar expression")
            values[key] = vals[:, 0]
        v = float(values[key][t])
        if formula.op == "<=":
            return v <= formula.threshold
        if formula.op == ">=":
            return v >= formula.threshold
        if formula.op == "<":
            return v < formula.threshold
        return v > formula.threshold
    if isinstance(formula, Not):
        return not _sat(formula.operand, trace, t, truncate, values)
    if isinstance(formula, And):
        return _sat(formula.left, trace, t, truncate, values) and _sat(
            formula.right, trace, t, truncate, values
        )
    if isinstance(formula, Or):
        return _sat(formula.left, trace, t, truncate, values) or _sat(
            formula.right, trace, t, truncate, values
        )
    if isinstance(formula, (Globally, Eventually, Until)):
        lo = t + formula.lo
        hi = t + formula.hi
        if truncate:
            hi = min(hi, n - 1)
        if lo > hi or lo > n - 1:
            raise HorizonError(
                f"window starting at sample {lo} lies entirely past the trace end"
            )
        if isinstance(formula, Globally):
            return all(_sat(formula.operand, trace, s, truncate, values) for s in range(lo, hi + 1))
        if isinstance(formula, Eventually):
            return any(_sat(formula.operand, trace, s, truncate, values) for s in range(lo, hi + 1))
        for tp in range(lo, hi + 1):
            if _sat(formula.right, trace, tp, truncate, values) and all(
                _sat(formula.left, trace, s, truncate, values) for s in range(t, tp + 1)
            ):
                return True
        return False
    raise TypeError(f"not a formula: {formula!r}")


def satisfies(formula: Formula, trace, t0: int = 0, *, truncate: bool = False) -> bool:
    """Boolean satisfaction at sample t0; independent of robustness()."""
    _check_t0(trace, t0)
    if not truncate:
        h = horizon(formula)
        if t0 + h > trace.length - 1:
            raise HorizonError(
                f"formula needs {h} samples beyond t0 = {t0} but the trace ends at "
                f"sample {trace.length - 1}; pass truncate=True to clamp windows"
            )
    return _sat(formula, trace, t0, truncate, {})
