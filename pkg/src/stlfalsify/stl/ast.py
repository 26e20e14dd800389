"""Formula and expression nodes, plus the structural queries on them.

Nodes are frozen dataclasses, so structural equality is plain ==. The
canonical ASCII form produced by to_source() re-parses to an identical
tree; that round trip is the printer's contract.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SchemaError

_AXES = ("x", "y", "z")


# --------------------------------------------------------------------------
# real-valued expressions over trace channels


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Signal(Expr):
    """A channel reference; may name a single axis of a vector channel."""

    name: str


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Sum(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Diff(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Scale(Expr):
    """Multiplication by a numeric literal."""

    factor: float
    operand: Expr


@dataclass(frozen=True)
class Norm(Expr):
    """Euclidean norm; maps any dimension to 1 (absolute value on scalars)."""

    operand: Expr


# --------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Predicate(Formula):
    expr: Expr
    op: str  # one of <=, >=, <, >
    threshold: float

    def __post_init__(self):
        if self.op not in ("<=", ">=", "<", ">"):
            raise ValueError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


class _Windowed(Formula):
    __slots__ = ()

    def _check_bounds(self):
        if self.lo < 0 or self.hi < 0 or self.lo > self.hi:
            raise ValueError(f"bad temporal window [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Globally(_Windowed):
    lo: int
    hi: int
    operand: Formula

    def __post_init__(self):
        self._check_bounds()


@dataclass(frozen=True)
class Eventually(_Windowed):
    lo: int
    hi: int
    operand: Formula

    def __post_init__(self):
        self._check_bounds()


@dataclass(frozen=True)
class Until(_Windowed):
    lo: int
    hi: int
    left: Formula
    right: Formula

    def __post_init__(self):
        self._check_bounds()


# --------------------------------------------------------------------------
# structural queries


def horizon(formula: Formula) -> int:
    """Number of future samples the formula needs beyond its evaluation time."""
    if isinstance(formula, Predicate):
        return 0
    if isinstance(formula, Not):
        return horizon(formula.operand)
    if isinstance(formula, (And, Or)):
        return max(horizon(formula.left), horizon(formula.right))
    if isinstance(formula, (Globally, Eventually)):
        return formula.hi + horizon(formula.operand)
    if isinstance(formula, Until):
        return formula.hi + max(horizon(formula.left), horizon(formula.right))
    raise TypeError(f"not a formula: {formula!r}")


def innermost_predicates(formula: Formula) -> Formula:
    """Strip every temporal operator, keeping boolean structure and predicates.

    An Until collapses to the conjunction of its stripped operands.
    """
    if isinstance(formula, Predicate):
        return formula
    if isinstance(formula, Not):
        return Not(innermost_predicates(formula.operand))
    if isinstance(formula, And):
        return And(innermost_predicates(formula.left), innermost_predicates(formula.right))
    if isinstance(formula, Or):
        return Or(innermost_predicates(formula.left), innermost_predicates(formula.right))
    if isinstance(formula, (Globally, Eventually)):
        return innermost_predicates(formula.operand)
    if isinstance(formula, Until):
        return And(innermost_predicates(formula.left), innermost_predicates(formula.right))
    raise TypeError(f"not a formula: {formula!r}")


def signal_names(node) -> set[str]:
    """Channel names referenced anywhere in a formula or expression."""
    if isinstance(node, Signal):
        return {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, (Sum, Diff)):
        return signal_names(node.left) | signal_names(node.right)
    if isinstance(node, (Scale, Norm)):
        return signal_names(node.operand)
    if isinstance(node, Predicate):
        return signal_names(node.expr)
    if isinstance(node, Not):
        return signal_names(node.operand)
    if isinstance(node, (And, Or)):
        return signal_names(node.left) | signal_names(node.right)
    if isinstance(node, (Globally, Eventually)):
        return signal_names(node.operand)
    if isinstance(node, Until):
        return signal_names(node.left) | signal_names(node.right)
    raise TypeError(f"not a formula or expression: {node!r}")


def resolve_dim(name: str, schema) -> int:
    """Dimension of a channel reference under a name -> dim schema.

    Declared names win; otherwise base_x / base_y / base_z / base_<k>
    resolves to one axis of a declared vector channel.
    """
    if name in schema:
        return int(schema[name])
    base, sep, suffix = name.rpartition("_")
    if sep and base in schema:
        if suffix in _AXES and _AXES.index(suffix) < int(schema[base]):
            return 1
        if suffix.isdigit() and int(suffix) < int(schema[base]):
            return 1
    raise SchemaError(f"no channel {name!r} in schema {sorted(schema)}")


def expr_dim(expr: Expr, schema) -> int:
    """Dimension of an expression under a schema; raises SchemaError on misuse."""
    if isinstance(expr, Signal):
        return resolve_dim(expr.name, schema)
    if isinstance(expr, Const):
        return 1
    if isinstance(expr, (Sum, Diff)):
        dl = expr_dim(expr.left, schema)
        dr = expr_dim(expr.right, schema)
        if dl != dr:
            raise SchemaError(f"dimension mismatch in {to_source_expr(expr)!r}: {dl} vs {dr}")
        return dl
    if isinstance(expr, Scale):
        return expr_dim(expr.operand, schema)
    if isinstance(expr, Norm):
        expr_dim(expr.operand, schema)
        return 1
    raise TypeError(f"not an expression: {expr!r}")


def validate_signals(formula: Formula, schema) -> None:
    """Check every channel reference and dimension rule against a schema."""
    if isinstance(formula, Predicate):
        if expr_dim(formula.expr, schema) != 1:
            raise SchemaError(
                f"comparison needs a scalar expression: {to_source_expr(formula.expr)!r}"
            )
    elif isinstance(formula, Not):
        validate_signals(formula.operand, schema)
    elif isinstance(formula, (And, Or, Until)):
        validate_signals(formula.left, schema)
        validate_signals(formula.right, schema)
    elif isinstance(formula, (Globally, Eventually)):
        validate_signals(formula.operand, schema)
    else:
        raise TypeError(f"not a formula: {formula!r}")


# --------------------------------------------------------------------------
# canonical ASCII printer

_ATOM, _SCALE, _ADD = 3, 2, 1


def _num(x: float) -> str:
    return repr(float(x))


def _expr(e: Expr, level: int) -> str:
    if isinstance(e, Signal):
        return e.name
    if isinstance(e, Const):
        return _num(e.value)
    if isinstance(e, Norm):
        return f"norm({_expr(e.operand, _ADD)})"
    if isinstance(e, Scale):
        text = f"{_num(e.factor)} * {_expr(e.operand, _ATOM)}"
        own = _SCALE
    elif isinstance(e, (Sum, Diff)):
        op = "+" if isinstance(e, Sum) else "-"
        text = f"{_expr(e.left, _ADD)} {op} {_expr(e.right, _SCALE)}"
        own = _ADD
    else:
        raise TypeError(f"not an expression: {e!r}")
    return f"({text})" if own < level else text


def to_source_expr(expr: Expr) -> str:
    return _expr(expr, _ADD)


_UNTIL, _OR, _AND, _UNARY = 1, 2, 3, 4


def _formula(f: Formula, level: int) -> str:
    if isinstance(f, Predicate):
        return f"{_expr(f.expr, _ADD)} {f.op} {_num(f.threshold)}"
    if isinstance(f, Not):
        text = f"not {_formula(f.operand, _UNARY)}"
        own = _UNARY
    elif isinstance(f, And):
        text = f"{_formula(f.left, _AND)} and {_formula(f.right, _UNARY)}"
        own = _AND
    elif isinstance(f, Or):
        text = f"{_formula(f.left, _OR)} or {_formula(f.right, _AND)}"
        own = _OR
    elif isinstance(f, (Globally, Eventually)):
        op = "G" if isinstance(f, Globally) else "F"
        # operand always parenthesized: unambiguous at any nesting
        return f"{op}[{f.lo},{f.hi}]({_formula(f.operand, _UNTIL)})"
    elif isinstance(f, Until):
        text = f"{_formula(f.left, _OR)} U[{f.lo},{f.hi}] {_formula(f.right, _UNTIL)}"
        own = _UNTIL
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if own < level else text


def to_source(formula: Formula) -> str:
    """Canonical ASCII rendering; parse(to_source(f)) == f."""
    return _formula(formula, _UNTIL)
