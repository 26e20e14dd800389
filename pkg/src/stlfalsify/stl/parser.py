"""Specification text -> formula trees.

Grammar (lowest precedence first); G/F/U bind like unary operators and
are recognized only when immediately followed by '[':

    formula   := or_f ( 'U' '[' nat ',' nat ']' formula )?     right assoc
    or_f      := and_f ( 'or' and_f )*
    and_f     := unary ( 'and' unary )*
    unary     := 'not' unary
               | ('G' | 'F') '[' nat ',' nat ']' unary
               | '(' formula ')'
               | predicate
    predicate := addexpr rel signed_number
    addexpr   := term ( ('+' | '-') term )*
    term      := factor ( '*' factor )*      one side of '*' must be a literal
    factor    := '-' factor | number | identifier
               | 'norm' '(' addexpr ')' | '||' addexpr '||'
               | '(' addexpr ')'

Unicode forms are accepted on input: □ ◇ ¬ ∧ ∨ for G F not and or,
∥...∥ / ‖...‖ / ||...|| for norm(...), ≤ ≥ for <= >=, − for -. The
printer always emits the ASCII forms. Diagnostics carry 1-based line
and column.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import BoundError, ParseError
from .ast import (
    And,
    Const,
    Diff,
    Eventually,
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
)

_KEYWORDS = {"and", "or", "not", "norm"}
_UNICODE_SIMPLE = {
    "∧": "and",
    "∨": "or",
    "¬": "not",
    "□": "G",
    "◇": "F",
    "∥": "bar",
    "‖": "bar",
    "≤": "<=",
    "≥": ">=",
    "−": "-",
}


@dataclass(frozen=True)
class _Token:
    kind: str  # number ident and or not norm G F U bar ( ) [ ] , + - * <= >= < > eof
    text: str
    value: float | None
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def emit(kind, text_, value=None, at=None):
        l, c = at if at else (line, col)
        tokens.append(_Token(kind, text_, value, l, c))

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        start = (line, col)
        if ch in _UNICODE_SIMPLE:
            mapped = _UNICODE_SIMPLE[ch]
            if mapped in ("and", "or", "not"):
                emit(mapped, ch, at=start)
            elif mapped in ("G", "F"):
                emit(mapped, ch, at=start)
            elif mapped == "bar":
                emit("bar", ch, at=start)
            else:
                emit(mapped, ch, at=start)
            i += 1
            col += 1
            continue
        if text.startswith("||", i):
            emit("bar", "||", at=start)
            i += 2
            col += 2
            continue
        if text.startswith("<=", i) or text.startswith(">=", i):
            emit(text[i : i + 2], text[i : i + 2], at=start)
            i += 2
            col += 2
            continue
        if ch in "()[],+-*<>":
            emit(ch, ch, at=start)
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lexeme = text[i:j]
            try:
                value = float(lexeme)
            except ValueError:
                raise ParseError(f"bad number {lexeme!r}", *start) from None
            emit("number", lexeme, value, at=start)
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                emit(word, word, at=start)
            elif word in ("G", "F", "U") and j < n and text[j] == "[":
                emit(word, word, at=start)
            else:
                emit("ident", word, at=start)
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", *start)
    emit("eof", "")
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            want = what or f"'{kind}'"
            got = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise ParseError(f"expected {want}, got {got}", tok.line, tok.col)
        return self.next()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # ---- bounds ----

    def bounds(self) -> tuple[int, int]:
        open_tok = self.expect("[", "'[' after temporal operator")
        lo = self.nat()
        self.expect(",", "',' between temporal bounds")
        hi = self.nat()
        self.expect("]", "']' closing the temporal window")
        if lo > hi:
            raise BoundError(
                f"empty temporal window [{lo},{hi}]: lower bound exceeds upper",
                open_tok.line,
                open_tok.col,
            )
        return lo, hi

    def nat(self) -> int:
        tok = self.expect("number", "a nonnegative integer bound")
        if tok.value is None or tok.value != int(tok.value):
            raise ParseError(f"temporal bound must be an integer, got {tok.text}", tok.line, tok.col)
        return int(tok.value)

    # ---- formulas ----

    def formula(self) -> Formula:
        left = self.or_f()
        if self.peek().kind == "U":
            self.next()
            lo, hi = self.bounds()
            right = self.formula()
            return Until(lo, hi, left, right)
        return left

    def or_f(self) -> Formula:
        node = self.and_f()
        while self.peek().kind == "or":
            self.next()
            node = Or(node, self.and_f())
        return node

    def and_f(self) -> Formula:
        node = self.unary()
        while self.peek().kind == "and":
            self.next()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "not":
            self.next()
            return Not(self.unary())
        if tok.kind in ("G", "F"):
            self.next()
            lo, hi = self.bounds()
            child = self.unary()
            return Globally(lo, hi, child) if tok.kind == "G" else Eventually(lo, hi, child)
        if tok.kind == "(":
            # '(' opens either a sub-formula or the expression of a predicate;
            # try the formula reading first and fall back on failure
            mark = self.pos
            try:
                self.next()
                inner = self.formula()
                self.expect(")")
                if self.peek().kind in ("<=", ">=", "<", ">", "+", "-", "*"):
                    raise self.error("parenthesized formula used as an expression")
                return inner
            except ParseError:
                self.pos = mark
                return self.predicate()
        return self.predicate()

    def predicate(self) -> Formula:
        expr = self.addexpr()
        tok = self.peek()
        if tok.kind not in ("<=", ">=", "<", ">"):
            raise self.error("expected a comparison operator")
        self.next()
        threshold = self.signed_number()
        return Predicate(expr, tok.kind, threshold)

    def signed_number(self) -> float:
        sign = 1.0
        if self.peek().kind == "-":
            self.next()
            sign = -1.0
        tok = self.expect("number", "a numeric threshold")
        return sign * tok.value

    # ---- expressions ----

    def addexpr(self):
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            right = self.term()
            node = Sum(node, right) if op == "+" else Diff(node, right)
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind == "*":
            star = self.next()
            right = self.factor()
            if isinstance(node, Const) and isinstance(right, Const):
                node = Const(node.value * right.value)
            elif isinstance(node, Const):
                node = Scale(node.value, right)
            elif isinstance(right, Const):
                node = Scale(right.value, node)
            else:
                raise ParseError(
                    "multiplication needs a numeric literal on one side", star.line, star.col
                )
        return node

    def factor(self):
        tok = self.peek()
        if tok.kind == "-":
            self.next()
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Scale(-1.0, inner)
        if tok.kind == "number":
            self.next()
            return Const(tok.value)
        if tok.kind == "norm":
            self.next()
            self.expect("(", "'(' after norm")
            inner = self.addexpr()
            self.expect(")")
            return Norm(inner)
        if tok.kind == "bar":
            self.next()
            inner = self.addexpr()
            self.expect("bar", "closing norm bars")
            return Norm(inner)
        if tok.kind == "ident":
            self.next()
            return Signal(tok.text)
        if tok.kind == "(":
            self.next()
            inner = self.addexpr()
            self.expect(")")
            return inner
        raise self.error("expected an expression")


def parse(text: str) -> Formula:
    """Parse specification text into a formula tree.

    Raises ParseError (with line/column) on syntax errors and BoundError
    when a temporal window has its lower bound above its upper bound.
    """
    parser = _Parser(_tokenize(text))
    formula = parser.formula()
    if parser.peek().kind != "eof":
        raise parser.error("unexpected trailing input")
    return formula
