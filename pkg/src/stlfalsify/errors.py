"""Exception taxonomy shared across the engine.

Every error raised by the public API is one of these types, so callers can
distinguish bad arguments, malformed data, and runtime failures without
string matching.
"""


class ArgumentError(ValueError):
    """An argument violates a documented precondition (bad stride, budget, id...)."""


class SamplingError(ValueError):
    """Trace timing is unusable: non-uniform spacing or no inferable period."""


class SchemaError(ValueError):
    """Signal layout mismatch: unknown name, wrong dimension, ragged columns."""


class ParseError(ValueError):
    """Specification text is syntactically invalid."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class BoundError(ParseError):
    """A temporal bound pair is ill-formed (a > b)."""


class HorizonError(ValueError):
    """The formula needs samples past the end of the trace."""


class DomainError(ValueError):
    """An input vector lies outside the environment's input box."""


class ConfigError(ValueError):
    """One or more configuration fields are invalid; collects all messages."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class BridgeError(RuntimeError):
    """The external environment endpoint failed: refused, timed out, or died."""
