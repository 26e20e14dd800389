"""Benchmark campaigns: grids of falsification trials with shaped reports.

A campaign crosses (environment, spec) pairs with a list of optimizers;
every cell runs the same number of independent trials. Trial seeds derive
from the master seed through a fixed splitting rule,

    trial_seed = derive_seed(master_seed, CAMPAIGN_STREAM, cell_index, trial_index),

so re-running a campaign with the same master seed reproduces every trial
exactly. Reports serialize to JSON (full per-trial detail, stable key
order) and to a summary CSV with one row per cell; per-cell averages cover
successful trials only and render as "-" when there are none. Wall-time
fields are informational and excluded from determinism comparisons via
timing_stripped().
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import ArgumentError
from .falsify import falsify
from .optim import OPTIMIZERS, AnnealParams
from .seeding import derive_seed
from .stl import parse, to_source

SCHEMA_VERSION = 1
CAMPAIGN_STREAM = 5  # seed-stream tag for trial-seed splitting


def _run_trial(args):
    env, formula, optimizer, budget, trial, trial_seed, anneal_params = args
    record = {"trial": trial, "seed": trial_seed}
    try:
        res = falsify(
            env, formula, seed=trial_seed, budget=budget,
            optimizer=optimizer, anneal_params=anneal_params,
        )
    except Exception as exc:  # partial failures are recorded, never fatal
        record["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return record
    record.update(
        success=res.success,
        falsifying_input=list(res.falsifying_input) if res.falsifying_input else None,
        min_robustness=res.min_robustness,
        simulations=res.simulations,
        terminated_by=res.terminated_by,
        episode_seed=res.episode_seed,
        evaluation_index=res.evaluation_index,
        wall_time=res.wall_time,
    )
    return record


@dataclass(frozen=True)
class CampaignReport:
    schema_version: int
    master_seed: int
    trials: int
    budget: int
    cells: tuple

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "master_seed": self.master_seed,
            "trials": self.trials,
            "budget": self.budget,
            "cells": [dict(c, results=[dict(r) for r in c["results"]]) for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        lines = ["task,optimizer,suc_fals,avg_time,avg_sims"]
        for cell in self.cells:
            avg_time = "-" if cell["avg_time"] is None else f"{cell['avg_time']:.2f}"
            avg_sim = "-" if cell["avg_simulations"] is None else f"{cell['avg_simulations']:.2f}"
            lines.append(
                f"{cell['task_id']},{cell['optimizer']},"
                f"{cell['successful_falsifications']},{avg_time},{avg_sim}"
            )
        return "\n".join(lines) + "\n"


def timing_stripped(obj):
    """Copy of a report structure with wall-time derived fields removed,
    for determinism comparisons."""
    if isinstance(obj, dict):
        return {
            k: timing_stripped(v)
            for k, v in obj.items()
            if k not in ("wall_time", "avg_time")
        }
    if isinstance(obj, list):
        return [timing_stripped(v) for v in obj]
    return obj


def run_campaign(envs, specs, optimizers, trials: int = 30, budget: int = 300,
                 master_seed: int = 0, jobs: int = 1,
                 anneal_params: AnnealParams | None = None) -> CampaignReport:
    """Run trials for every (env, spec) pair crossed with every optimizer.

    envs and specs are parallel lists (one formula per environment);
    specs may be ASTs or concrete syntax. Cells are ordered env-major,
    then by optimizer; trial results are ordered by trial index whatever
    the execution order. jobs > 1 distributes trials over processes.
    """
    envs = list(envs)
    specs = [parse(s) if isinstance(s, str) else s for s in specs]
    optimizers = list(optimizers)
    if not envs or not optimizers:
        raise ArgumentError("envs and optimizers must be nonempty")
    if len(specs) != len(envs):
        raise ArgumentError(
            f"need one spec per environment, got {len(specs)} specs for {len(envs)} envs"
        )
    for name in optimizers:
        if name not in OPTIMIZERS:
            raise ArgumentError(f"unknown optimizer {name!r}, expected one of {sorted(OPTIMIZERS)}")
    if trials < 1:
        raise ArgumentError(f"trials must be >= 1, got {trials}")
    if budget < 1:
        raise ArgumentError(f"budget must be >= 1, got {budget}")
    if jobs < 1:
        raise ArgumentError(f"jobs must be >= 1, got {jobs}")

    grid = [(env, spec, opt) for env, spec in zip(envs, specs) for opt in optimizers]
    tasks = []
    for cell_index, (env, spec, opt) in enumerate(grid):
        for trial in range(trials):
            trial_seed = int(derive_seed(master_seed, CAMPAIGN_STREAM, cell_index, trial))
            tasks.append((env, spec, opt, budget, trial, trial_seed, anneal_params))

    if jobs == 1:
        records = [_run_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_trial, tasks, chunksize=1))

    cells = []
    for cell_index, (env, spec, opt) in enumerate(grid):
        results = records[cell_index * trials:(cell_index + 1) * trials]
        wins = [r for r in results if r.get("success")]
        cells.append({
            "task_id": env.task_id,
            "optimizer": opt,
            "formula": to_source(spec),
            "trials": trials,
            "successful_falsifications": len(wins),
            "avg_time": sum(r["wall_time"] for r in wins) / len(wins) if wins else None,
            "avg_simulations": sum(r["simulations"] for r in wins) / len(wins) if wins else None,
            "results": results,
        })
    return CampaignReport(
        schema_version=SCHEMA_VERSION,
        master_seed=master_seed,
        trials=trials,
        budget=budget,
        cells=tuple(cells),
    )
