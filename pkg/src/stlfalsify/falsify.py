"""Falsification trials: minimize specification robustness over an input box.

One trial wires an environment, a formula and an optimizer together. The
objective for evaluation k simulates the environment at the proposed input
with episode_seed(seed, k), decimates the trace by the task's monitoring
stride, and returns the formula's robustness; the optimizer stops at the
first strictly negative value. Every result records the episode seed of
its minimal evaluation so the violating trace can be reproduced exactly.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass

from .errors import ArgumentError, HorizonError
from .optim import AnnealParams, optimize
from .seeding import OPTIMIZER_STREAM, derive_seed, episode_seed
from .stl import horizon, parse, robustness, to_source
from .trace import decimate


@dataclass(frozen=True)
class FalsificationResult:
    """Outcome of one falsification trial.

    success holds exactly when min_robustness < 0; falsifying_input is
    present exactly then. simulations counts every simulate call of the
    trial. episode_seed / evaluation_index identify the minimal evaluation
    (the falsifying one on success) for exact replay.
    """

    task_id: str
    optimizer: str
    formula: str
    success: bool
    falsifying_input: tuple[float, ...] | None
    min_robustness: float
    simulations: int
    terminated_by: str
    episode_seed: int
    evaluation_index: int
    seed: int
    wall_time: float

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if self.falsifying_input is not None:
            d["falsifying_input"] = list(self.falsifying_input)
        return d


def falsify(env, formula, seed: int = 0, budget: int = 300,
            optimizer: str = "dual_annealing",
            anneal_params: AnnealParams | None = None) -> FalsificationResult:
    """Search env's input box for an input whose trace violates formula.

    formula may be an AST or concrete syntax. Environment and monitor
    errors propagate to the caller.
    """
    if isinstance(formula, str):
        formula = parse(formula)
    if budget < 1:
        raise ArgumentError(f"budget must be >= 1, got {budget}")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ArgumentError(f"seed must be a non-negative integer, got {seed!r}")
    needed = horizon(formula)
    available = env.episode_steps // env.stl_stride
    if needed > available:
        raise HorizonError(
            f"formula needs a horizon of {needed} decimated steps but the episode "
            f"only provides {available}"
        )

    state = {"k": 0, "best": math.inf, "episode_seed": 0, "index": -1}

    def objective(x):
        k = state["k"]
        state["k"] = k + 1
        ep = int(episode_seed(seed, k))
        trace = decimate(env.simulate(x, ep), env.stl_stride)
        rho = float(robustness(formula, trace, 0))
        if rho < state["best"]:
            state["best"] = rho
            state["episode_seed"] = ep
            state["index"] = k
        return rho

    start = time.monotonic()
    res = optimize(
        optimizer,
        objective,
        env.input_box,
        budget,
        target=0.0,
        seed=int(derive_seed(seed, OPTIMIZER_STREAM)),
        anneal_params=anneal_params,
    )
    elapsed = time.monotonic() - start
    success = res.best_value < 0.0
    return FalsificationResult(
        task_id=env.task_id,
        optimizer=optimizer,
        formula=to_source(formula),
        success=success,
        falsifying_input=res.best_input if success else None,
        min_robustness=res.best_value,
        simulations=res.evaluations,
        terminated_by=res.terminated_by,
        episode_seed=state["episode_seed"],
        evaluation_index=state["index"],
        seed=seed,
        wall_time=elapsed,
    )
