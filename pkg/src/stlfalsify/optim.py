"""Derivative-free minimizers over input boxes.

All three optimizers share one contract: at most `budget` objective
evaluations, counted exactly; immediate stop once an evaluation returns a
value strictly below `target`; every evaluated point inside the box; and
bit-for-bit deterministic behavior as a function of the 64-bit seed.

Dual annealing is the generalized simulated-annealing scheme with the
standard defaults (visiting exponent 2.62, acceptance exponent -5.0,
initial temperature 5230, restart ratio 2e-5) and no local polish: every
objective call is assumed to be one expensive simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .seeding import generator
from .trace import Box

_TAIL_LIMIT = 1e8
_MIN_VISIT_BOUND = 1e-10


class Objective:
    """Counting wrapper around an input -> real function.

    Every call increments `evaluations` by exactly one. Non-finite
    objective values are rejected.
    """

    def __init__(self, fn):
        self.fn = fn
        self.evaluations = 0

    def __call__(self, x) -> float:
        self.evaluations += 1
        value = float(self.fn(x))
        if not math.isfinite(value):
            raise ArgumentError(f"objective returned a non-finite value: {value!r}")
        return value


@dataclass(frozen=True)
class OptResult:
    best_input: tuple[float, ...]
    best_value: float
    evaluations: int
    terminated_by: str  # budget | target | convergence


@dataclass(frozen=True)
class AnnealParams:
    initial_temp: float = 5230.0
    visit: float = 2.62
    accept: float = -5.0
    restart_temp_ratio: float = 2e-5
    max_rounds: int = 1000

    def __post_init__(self):
        if not self.initial_temp > 0:
            raise ArgumentError(f"initial_temp must be positive, got {self.initial_temp}")
        if not 1.0 < self.visit <= 3.0:
            raise ArgumentError(f"visit must lie in (1, 3], got {self.visit}")
        if not self.accept < 0:
            raise ArgumentError(f"accept must be negative, got {self.accept}")
        if not 0 < self.restart_temp_ratio < 1:
            raise ArgumentError(
                f"restart_temp_ratio must lie in (0, 1), got {self.restart_temp_ratio}"
            )
        if self.max_rounds < 1:
            raise ArgumentError("max_rounds must be >= 1")


class _TargetHit(Exception):
    pass


class _OutOfBudget(Exception):
    pass


class _Search:
    """Budget accounting, best-point tracking, and early-stop control."""

    def __init__(self, objective, box: Box, budget: int, target: float):
        if not isinstance(box, Box):
            raise ArgumentError("box must be a Box")
        if budget < 1:
            raise ArgumentError(f"budget must be >= 1, got {budget}")
        self.objective = objective if isinstance(objective, Objective) else Objective(objective)
        self.box = box
        self.budget = int(budget)
        self.target = float(target)
        self.best_x: np.ndarray | None = None
        self.best_value = math.inf

    def eval(self, x) -> float:
        if self.objective.evaluations >= self.budget:
            raise _OutOfBudget
        point = np.asarray(x, dtype=float)
        value = self.objective(point)
        if value < self.best_value:
            self.best_value = value
            self.best_x = point.copy()
        if value < self.target:
            raise _TargetHit
        return value

    def result(self, terminated_by: str) -> OptResult:
        if self.best_x is None:
            raise ArgumentError("optimizer terminated before any evaluation")
        return OptResult(
            best_input=tuple(float(v) for v in self.best_x),
            best_value=self.best_value,
            evaluations=self.objective.evaluations,
            terminated_by=terminated_by,
        )


def _drive(search: _Search, body) -> OptResult:
    try:
        label = body()
    except _TargetHit:
        return search.result("target")
    except _OutOfBudget:
        return search.result("budget")
    return search.result(label)


def random_search(objective, box: Box, budget: int, target: float = -math.inf, seed: int = 0) -> OptResult:
    """Independent uniform samples from the box."""
    search = _Search(objective, box, budget, target)
    rng = generator(seed)

    def body():
        for _ in range(search.budget):
            search.eval(box.sample(rng))
        return "budget"

    return _drive(search, body)


def nelder_mead(objective, box: Box, budget: int, target: float = -math.inf, seed: int = 0) -> OptResult:
    """Simplex search with reflection 1, expansion 2, contraction 0.5, shrink 0.5.

    The initial simplex is a seeded uniform point plus per-axis offsets of
    5% of each box width; every candidate vertex is clipped to the box
    before evaluation. Converges when the simplex diameter drops below 1e-8.
    """
    search = _Search(objective, box, budget, target)
    dim = box.dim
    if budget < dim + 2:
        raise ArgumentError(f"budget {budget} cannot even evaluate the initial simplex plus one step")
    rng = generator(seed)

    def body():
        x0 = box.sample(rng)
        vertices = [x0]
        widths = box.widths()
        for i in range(dim):
            offset = np.zeros(dim)
            offset[i] = 0.05 * widths[i]
            vertices.append(box.clip(x0 + offset))
        values = [search.eval(v) for v in vertices]
        while True:
            order = sorted(range(dim + 1), key=lambda i: values[i])
            vertices = [vertices[i] for i in order]
            values = [values[i] for i in order]
            diameter = max(np.max(np.abs(v - vertices[0])) for v in vertices[1:])
            if diameter < 1e-8:
                return "convergence"
            centroid = np.mean(vertices[:-1], axis=0)
            worst = vertices[-1]
            reflected = box.clip(centroid + (centroid - worst))
            fr = search.eval(reflected)
            if fr < values[0]:
                expanded = box.clip(centroid + 2.0 * (centroid - worst))
                fe = search.eval(expanded)
                if fe < fr:
                    vertices[-1], values[-1] = expanded, fe
                else:
                    vertices[-1], values[-1] = reflected, fr
            elif fr < values[-2]:
                vertices[-1], values[-1] = reflected, fr
            else:
                if fr < values[-1]:
                    contracted = box.clip(centroid + 0.5 * (reflected - centroid))
                    fc = search.eval(contracted)
                    accept = fc <= fr
                else:
                    contracted = box.clip(centroid + 0.5 * (worst - centroid))
                    fc = search.eval(contracted)
                    accept = fc < values[-1]
                if accept:
                    vertices[-1], values[-1] = contracted, fc
                else:
                    for i in range(1, dim + 1):
                        vertices[i] = box.clip(vertices[0] + 0.5 * (vertices[i] - vertices[0]))
                        values[i] = search.eval(vertices[i])

    return _drive(search, body)


def _visit_factors(visit: float) -> tuple[float, float]:
    factor2 = math.exp((4.0 - visit) * math.log(visit - 1.0))
    factor3 = math.exp((2.0 - visit) * math.log(2.0) / (visit - 1.0))
    factor4p = math.sqrt(math.pi) * factor2 / (factor3 * (3.0 - visit))
    factor5 = 1.0 / (visit - 1.0) - 0.5
    d1 = 2.0 - factor5
    factor6 = math.pi * (1.0 - factor5) / math.sin(math.pi * (1.0 - factor5)) / math.exp(math.lgamma(d1))
    return factor4p, factor6


def dual_annealing(
    objective,
    box: Box,
    budget: int,
    target: float = -math.inf,
    seed: int = 0,
    params: AnnealParams = AnnealParams(),
) -> OptResult:
    """Generalized simulated annealing over the box.

    Visiting-distribution jumps wrap back into the box; worse points are
    accepted with the generalized Metropolis rule; the run re-anneals from
    a fresh uniform point whenever the temperature falls below
    initial_temp * restart_temp_ratio, keeping the best point found.
    """
    search = _Search(objective, box, budget, target)
    rng = generator(seed)
    dim = box.dim
    lo, hi = box.lows(), box.highs()
    width = hi - lo
    visit, accept = params.visit, params.accept
    factor4p, factor6 = _visit_factors(visit)

    def visit_sizes(temperature: float, n: int) -> np.ndarray:
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        factor1 = math.exp(math.log(temperature) / (visit - 1.0))
        factor4 = factor4p * factor1
        x *= math.exp(-(visit - 1.0) * math.log(factor6 / factor4) / (3.0 - visit))
        den = np.exp((visit - 1.0) * np.log(np.fabs(y)) / (3.0 - visit))
        return x / den

    def wrap(value: float, axis: int) -> float:
        if width[axis] == 0:
            return lo[axis]
        a = value - lo[axis]
        b = math.fmod(a, width[axis]) + width[axis]
        wrapped = math.fmod(b, width[axis]) + lo[axis]
        if abs(wrapped - lo[axis]) < _MIN_VISIT_BOUND:
            wrapped += _MIN_VISIT_BOUND
        return min(wrapped, hi[axis])

    def visit_point(current: np.ndarray, step: int, temperature: float) -> np.ndarray:
        if step < dim:
            sizes = visit_sizes(temperature, dim)
            upper_sample, lower_sample = rng.random(2)
            sizes[sizes > _TAIL_LIMIT] = _TAIL_LIMIT * upper_sample
            sizes[sizes < -_TAIL_LIMIT] = -_TAIL_LIMIT * lower_sample
            return np.array([wrap(current[i] + sizes[i], i) for i in range(dim)])
        index = step - dim
        size = visit_sizes(temperature, 1)[0]
        if size > _TAIL_LIMIT:
            size = _TAIL_LIMIT * rng.random()
        elif size < -_TAIL_LIMIT:
            size = -_TAIL_LIMIT * rng.random()
        point = current.copy()
        point[index] = wrap(current[index] + size, index)
        return point

    def body():
        current = box.sample(rng)
        e_current = search.eval(current)
        t1 = math.exp((visit - 1.0) * math.log(2.0)) - 1.0
        restart_temp = params.initial_temp * params.restart_temp_ratio
        rounds = 0
        while True:
            restarted = False
            for i in range(params.max_rounds):
                if rounds >= params.max_rounds:
                    return "convergence"
                t2 = math.exp((visit - 1.0) * math.log(i + 2.0)) - 1.0
                temperature = params.initial_temp * t1 / t2
                if temperature < restart_temp:
                    current = box.sample(rng)
                    e_current = search.eval(current)
                    restarted = True
                    break
                temperature_step = temperature / (i + 1.0)
                for j in range(2 * dim):
                    candidate = visit_point(current, j, temperature)
                    e = search.eval(candidate)
                    if e < e_current:
                        current, e_current = candidate, e
                    else:
                        r = rng.random()
                        pqv_temp = 1.0 - (1.0 - accept) * (e - e_current) / temperature_step
                        if pqv_temp > 0.0:
                            pqv = math.exp(math.log(pqv_temp) / (1.0 - accept))
                            if r <= pqv:
                                current, e_current = candidate, e
                rounds += 1
            if not restarted:
                return "convergence"

    return _drive(search, body)


OPTIMIZERS = {
    "random": random_search,
    "nelder_mead": nelder_mead,
    "dual_annealing": dual_annealing,
}


def optimize(
    name: str,
    objective,
    box: Box,
    budget: int,
    target: float = -math.inf,
    seed: int = 0,
    anneal_params: AnnealParams | None = None,
) -> OptResult:
    """Run the named optimizer; unknown names raise ArgumentError."""
    if name not in OPTIMIZERS:
        raise ArgumentError(f"unknown optimizer {name!r}, expected one of {sorted(OPTIMIZERS)}")
    if name == "dual_annealing":
        return dual_annealing(
            objective, box, budget, target, seed, anneal_params or AnnealParams()
        )
    if anneal_params is not None and name != "dual_annealing":
        raise ArgumentError(f"anneal parameters only apply to dual_annealing, not {name!r}")
    return OPTIMIZERS[name](objective, box, budget, target, seed)
