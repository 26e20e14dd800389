"""Operational metrics over repeated episodes: SR, DBR and TCT.

SR is the percentage of trials whose trace satisfies the success
specification with positive robustness. DBR strips the danger
specification down to its innermost predicate conjunction and counts, per
trial, the fraction of decimated steps inside the outermost temporal
window at which that predicate is violated (robustness < 0); the per-trial
fractions are averaged over all trials. TCT is the completion time in
control steps, averaged over successful trials only: for a
reachability-shaped spec (outermost F) the first decimated step where the
stripped predicate holds; for an invariance-shaped spec (outermost G) the
first step from which it holds at every later step of the window.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArgumentError, HorizonError
from .seeding import INPUT_STREAM, derive_seed, episode_seed, generator
from .stl import Eventually, Globally, innermost_predicates, parse, robustness, satisfies
from .trace import Trace, decimate


@dataclass(frozen=True)
class Metrics:
    """Aggregate of one evaluation run; tct is None exactly when sr == 0."""

    task_id: str
    trials: int
    successes: int
    sr: float
    dbr: float
    tct: float | None

    def __post_init__(self):
        if not (0.0 <= self.sr <= 100.0) or not (0.0 <= self.dbr <= 100.0):
            raise ArgumentError("sr and dbr must lie in [0, 100]")


def _outer_window(formula, label, trace=None):
    if not isinstance(formula, (Globally, Eventually)):
        raise ArgumentError(
            f"{label} spec must have an outermost G or F operator, got {type(formula).__name__}"
        )
    lo, hi = int(formula.lo), int(formula.hi)
    if trace is not None and hi >= trace.length:
        raise HorizonError(
            f"{label} window [{lo},{hi}] needs {hi + 1} samples, trace has {trace.length}"
        )
    return lo, hi, isinstance(formula, Globally)


def trace_dbr(danger_spec, trace: Trace) -> float:
    """Percent of the danger window's decimated steps violating the
    innermost predicate. Expects an already decimated trace."""
    if isinstance(danger_spec, str):
        danger_spec = parse(danger_spec)
    lo, hi, _ = _outer_window(danger_spec, "danger", trace)
    inner = innermost_predicates(danger_spec)
    violated = sum(1 for t in range(lo, hi + 1) if robustness(inner, trace, t) < 0)
    return 100.0 * violated / (hi - lo + 1)


def trace_tct(success_spec, trace: Trace, stl_stride: int) -> float | None:
    """Completion time in control steps, or None when the trace never
    completes. Expects an already decimated trace."""
    if isinstance(success_spec, str):
        success_spec = parse(success_spec)
    lo, hi, invariance = _outer_window(success_spec, "success", trace)
    inner = innermost_predicates(success_spec)
    holds = [satisfies(inner, trace, t) for t in range(lo, hi + 1)]
    if invariance:
        # first step from which the predicate holds at every later window step
        first = None
        for t in range(hi, lo - 1, -1):
            if not holds[t - lo]:
                break
            first = t
        if first is None:
            return None
        if first == lo:
            first = 0  # stable across the whole window: completed from the start
        return float(first * stl_stride)
    for t in range(lo, hi + 1):
        if holds[t - lo]:
            return float(t * stl_stride)
    return None


def evaluate(env, success_spec, danger_spec, trials: int = 100, seed: int = 0) -> Metrics:
    """Roll `trials` uniformly drawn episodes and aggregate SR / DBR / TCT.

    Inputs are drawn from env's box with a dedicated sampling stream;
    episode k simulates with episode_seed(seed, k). Specs may be ASTs or
    concrete syntax. Environment and monitor errors propagate.
    """
    if isinstance(success_spec, str):
        success_spec = parse(success_spec)
    if isinstance(danger_spec, str):
        danger_spec = parse(danger_spec)
    if trials < 1:
        raise ArgumentError(f"trials must be >= 1, got {trials}")
    rng = generator(derive_seed(seed, INPUT_STREAM))
    successes = 0
    dbr_total = 0.0
    tct_values = []
    for k in range(trials):
        point = env.input_box.sample(rng)
        trace = decimate(env.simulate(point, int(episode_seed(seed, k))), env.stl_stride)
        dbr_total += trace_dbr(danger_spec, trace)
        if robustness(success_spec, trace, 0) > 0:
            successes += 1
            tct = trace_tct(success_spec, trace, env.stl_stride)
            if tct is not None:
                tct_values.append(tct)
    return Metrics(
        task_id=env.task_id,
        trials=trials,
        successes=successes,
        sr=100.0 * successes / trials,
        dbr=dbr_total / trials,
        tct=sum(tct_values) / len(tct_values) if tct_values else None,
    )
