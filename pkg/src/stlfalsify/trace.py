"""Uniformly sampled multi-channel traces, input boxes, and task descriptions.

A Trace is the value every simulation produces and every monitor consumes:
a fixed sample period plus an ordered map of named channels, each an
(N, d) array of finite floats. Traces are value data; channel arrays are
frozen after construction.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ArgumentError, SamplingError, SchemaError

IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

#: Task identifiers of the shipped manipulation surrogates: pick/reach,
#: cube stacking, peg-in-hole, ball balancing, ball catching, ball pushing,
#: door opening, cloth placing.
TASK_IDS = ("PR", "CS", "PH", "BB", "BC", "BP", "DO", "CP")

_AXIS_SUFFIXES = ("x", "y", "z")

# Relative tolerance for the uniform-spacing check on CSV time columns.
_SPACING_RTOL = 1e-6


def _as_channel(name: str, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise SchemaError(f"channel {name!r} must be an (N, d) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"channel {name!r} contains non-finite values")
    arr.setflags(write=False)
    return arr


class Trace:
    """Immutable uniformly-sampled trace.

    signals maps channel name -> (N, d) float array; every channel shares
    the same length N >= 1. sample_period is the spacing between
    consecutive samples in seconds.
    """

    __slots__ = ("sample_period", "signals", "length")

    def __init__(self, sample_period: float, signals: Mapping[str, object]):
        period = float(sample_period)
        if not math.isfinite(period) or period <= 0:
            raise SamplingError(f"sample_period must be positive, got {sample_period}")
        if not signals:
            raise SchemaError("a trace needs at least one channel")
        converted: dict[str, np.ndarray] = {}
        length = None
        for name, values in signals.items():
            if not IDENTIFIER.match(name):
                raise SchemaError(f"channel name {name!r} is not an identifier")
            arr = _as_channel(name, values)
            if length is None:
                length = arr.shape[0]
            elif arr.shape[0] != length:
                raise SchemaError(
                    f"channel {name!r} has {arr.shape[0]} samples, expected {length}"
                )
            converted[name] = arr
        object.__setattr__(self, "sample_period", period)
        object.__setattr__(self, "signals", converted)
        object.__setattr__(self, "length", length)

    def __setattr__(self, name, value):
        raise AttributeError("Trace is immutable")

    def dim(self, name: str) -> int:
        return self.signals[name].shape[1]

    def channel(self, name: str) -> np.ndarray:
        """Resolve a channel name, allowing axis access into vector channels.

        An undeclared name of the form base_x / base_y / base_z / base_<k>
        where base is a declared vector channel resolves to that single
        axis as an (N, 1) array. Declared names always win.
        """
        sig = self.signals.get(name)
        if sig is not None:
            return sig
        base, sep, suffix = name.rpartition("_")
        if sep and base in self.signals:
            parent = self.signals[base]
            axis = None
            if suffix in _AXIS_SUFFIXES:
                axis = _AXIS_SUFFIXES.index(suffix)
            elif suffix.isdigit():
                axis = int(suffix)
            if axis is not None and axis < parent.shape[1]:
                return parent[:, axis : axis + 1]
        raise SchemaError(f"trace has no channel {name!r}")

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        if self.sample_period != other.sample_period:
            return False
        if list(self.signals) != list(other.signals):
            return False
        return all(np.array_equal(self.signals[k], other.signals[k]) for k in self.signals)

    def __hash__(self):
        return hash((self.sample_period, self.length, tuple(self.signals)))

    def __repr__(self):
        chans = ", ".join(f"{k}:(%d,%d)" % v.shape for k, v in self.signals.items())
        return f"Trace(period={self.sample_period}, {chans})"


def decimate(trace: Trace, stride: int) -> Trace:
    """Keep samples 0, stride, 2*stride, ... and scale the period by stride."""
    if not isinstance(stride, (int, np.integer)) or isinstance(stride, bool) or stride < 1:
        raise ArgumentError(f"stride must be a positive integer, got {stride!r}")
    if stride == 1:
        return trace
    kept = {name: arr[::stride] for name, arr in trace.signals.items()}
    return Trace(trace.sample_period * stride, kept)


def _float_text(x: float) -> str:
    # repr of a Python float is the shortest string that round-trips exactly
    # (never more than 17 significant digits).
    return repr(float(x))


def trace_to_csv(trace: Trace) -> str:
    """Serialize to the canonical CSV layout.

    Column naming: scalars use the bare channel name; dimension 2 and 3
    vectors use _x/_y(/_z) suffixes; higher dimensions use _0.._k.
    Time starts at 0 and advances by the sample period.
    """
    header = ["time"]
    for name, arr in trace.signals.items():
        d = arr.shape[1]
        if d == 1:
            header.append(name)
        elif d <= 3:
            header.extend(f"{name}_{s}" for s in _AXIS_SUFFIXES[:d])
        else:
            header.extend(f"{name}_{k}" for k in range(d))
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for i in range(trace.length):
        row = [_float_text(i * trace.sample_period)]
        for arr in trace.signals.values():
            row.extend(_float_text(v) for v in arr[i])
        writer.writerow(row)
    return out.getvalue()


def _group_columns(names: list[str]) -> list[tuple[str, int]]:
    """Reassemble vector channels from suffixed column names.

    Returns (signal_name, dimension) in column order. Only the canonical
    layouts written by trace_to_csv form vectors; any other suffix pattern
    is kept as a scalar under its literal column name, which makes the
    reader and writer exact inverses on headers.
    """
    for name in names:
        if not IDENTIFIER.match(name):
            raise SchemaError(f"column name {name!r} is not an identifier")
    groups: list[tuple[str, int]] = []
    i = 0
    while i < len(names):
        base, sep, suffix = names[i].rpartition("_")
        if sep and base:
            if suffix == "x":
                d = 1
                while d < 3 and i + d < len(names) and names[i + d] == f"{base}_{_AXIS_SUFFIXES[d]}":
                    d += 1
                if d >= 2:
                    groups.append((base, d))
                    i += d
                    continue
            if suffix == "0":
                d = 1
                while i + d < len(names) and names[i + d] == f"{base}_{d}":
                    d += 1
                if d >= 4:
                    groups.append((base, d))
                    i += d
                    continue
        groups.append((names[i], 1))
        i += 1
    seen = set()
    for name, _ in groups:
        if name in seen:
            raise SchemaError(f"duplicate channel name {name!r} in CSV header")
        seen.add(name)
    return groups


def trace_from_csv(data) -> Trace:
    """Parse the CSV trace layout produced by trace_to_csv.

    Raises SamplingError for unusable time columns (non-uniform spacing,
    fewer than two rows), SchemaError for header/shape problems, and
    ValueError for non-numeric or non-finite values.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = list(csv.reader(io.StringIO(data)))
    rows = [r for r in rows if r]  # ignore blank lines
    if not rows:
        raise SchemaError("empty CSV")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "time":
        raise SchemaError("first CSV column must be 'time'")
    groups = _group_columns(header[1:])
    width = len(header)
    body = rows[1:]
    if not body:
        raise SamplingError("CSV has no data rows")
    values = np.empty((len(body), width), dtype=float)
    for r, row in enumerate(body):
        if len(row) != width:
            raise SchemaError(f"row {r + 2} has {len(row)} fields, expected {width}")
        for c, cell in enumerate(row):
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise ValueError(f"row {r + 2}, column {c + 1}: not a number: {cell!r}") from None
    if not np.all(np.isfinite(values)):
        raise ValueError("CSV contains non-finite values")
    t = values[:, 0]
    if len(t) < 2:
        raise SamplingError("cannot infer a sample period from a single row")
    diffs = np.diff(t)
    if np.any(diffs <= 0):
        raise SamplingError("time column must be strictly increasing")
    ref = diffs[0]
    tol = _SPACING_RTOL * np.maximum(np.abs(diffs), abs(ref))
    if np.any(np.abs(diffs - ref) > tol):
        raise SamplingError("time column is not uniformly spaced")
    # the first gap reproduces the writer's period bit for bit (time starts at 0)
    period = float(ref)
    signals: dict[str, np.ndarray] = {}
    col = 1
    for name, d in groups:
        signals[name] = values[:, col : col + d]
        col += d
    return Trace(period, signals)


@dataclass(frozen=True)
class Box:
    """Axis-aligned closed box with named dimensions."""

    dims: tuple[tuple[str, float, float], ...]

    def __init__(self, dims: Iterable[tuple[str, float, float]]):
        entries = tuple((str(n), float(lo), float(hi)) for n, lo, hi in dims)
        if not entries:
            raise ArgumentError("a box needs at least one dimension")
        seen = set()
        for name, lo, hi in entries:
            if not IDENTIFIER.match(name):
                raise ArgumentError(f"box dimension name {name!r} is not an identifier")
            if name in seen:
                raise ArgumentError(f"duplicate box dimension {name!r}")
            seen.add(name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ArgumentError(f"dimension {name!r} needs finite lo <= hi, got [{lo}, {hi}]")
        object.__setattr__(self, "dims", entries)

    @property
    def dim(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _, _ in self.dims)

    def lows(self) -> np.ndarray:
        return np.array([lo for _, lo, _ in self.dims])

    def highs(self) -> np.ndarray:
        return np.array([hi for _, _, hi in self.dims])

    def widths(self) -> np.ndarray:
        return self.highs() - self.lows()

    def volume(self) -> float:
        return float(np.prod(self.widths()))

    def contains(self, point, tol: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.dim,):
            return False
        return bool(np.all(p >= self.lows() - tol) and np.all(p <= self.highs() + tol))

    def contains_box(self, other: "Box") -> bool:
        if other.dim != self.dim:
            return False
        return bool(
            np.all(other.lows() >= self.lows()) and np.all(other.highs() <= self.highs())
        )

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One point drawn uniformly, component-wise, from the box."""
        lo, hi = self.lows(), self.highs()
        return lo + rng.random(self.dim) * (hi - lo)

    def clip(self, point) -> np.ndarray:
        return np.clip(np.asarray(point, dtype=float), self.lows(), self.highs())


@dataclass(frozen=True)
class TaskSpec:
    """Everything the engine needs to know about one falsification task."""

    task_id: str
    input_box: Box
    signal_schema: Mapping[str, int]
    episode_steps: int
    stl_stride: int
    success_spec: object = field(repr=False)
    danger_spec: object = field(repr=False)

    def __post_init__(self):
        from .stl import horizon, validate_signals  # deferred: stl is a sibling

        if self.task_id not in TASK_IDS:
            raise ArgumentError(f"unknown task id {self.task_id!r}, expected one of {TASK_IDS}")
        object.__setattr__(self, "signal_schema", dict(self.signal_schema))
        for name, d in self.signal_schema.items():
            if not IDENTIFIER.match(name):
                raise SchemaError(f"schema name {name!r} is not an identifier")
            if int(d) < 1:
                raise SchemaError(f"schema dimension for {name!r} must be >= 1")
        if self.episode_steps < 1:
            raise ArgumentError("episode_steps must be >= 1")
        if self.stl_stride < 1 or self.stl_stride > self.episode_steps:
            raise ArgumentError("stl_stride must be in [1, episode_steps]")
        budget = self.episode_steps // self.stl_stride
        for label, formula in (("success", self.success_spec), ("danger", self.danger_spec)):
            validate_signals(formula, self.signal_schema)
            h = horizon(formula)
            if h > budget:
                raise ArgumentError(
                    f"{label} spec needs a horizon of {h} decimated steps but the episode "
                    f"only provides {budget}"
                )

    @property
    def decimated_length(self) -> int:
        return self.episode_steps // self.stl_stride + 1
