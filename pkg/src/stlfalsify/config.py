"""Engine configuration: a flat, validated schema loaded from TOML or JSON.

Every run of the falsify / campaign / evaluate commands resolves to one
EngineConfig. Files provide the base values, command-line flags override
them, and validation happens once up front with every problem reported in
a single ConfigError. The resolved configuration (defaults included) is
embedded in all emitted reports, so any run can be reproduced from its own
output file.

Schema (all keys optional unless stated):

    task              task id (e.g. "PR") or list of ids; required unless
                      `bridge` is set
    bridge            bridge endpoint, "stdio:CMD ARGS..." or "tcp:HOST:PORT"
    optimizer         "random" | "nelder_mead" | "dual_annealing" (default)
    optimizers        list of optimizer names (campaigns; default [optimizer])
    trials            per-cell trial count (campaign default 30,
                      evaluate default 100)
    budget            simulations per trial, default 300
    seed              master seed, default 0
    jobs              parallel workers, 0 = hardware threads (default 0)
    stl_stride        monitoring stride for bridged environments (default 10);
                      built-in tasks define their own stride
    spec              formula in concrete syntax
    spec_path         path of a formula file (exclusive with `spec`)
    spec_kind         "success" (default) | "danger": which builtin spec to
                      use when `spec`/`spec_path` are absent
    output            result / report path (falsify, evaluate, campaign JSON)
    output_csv        campaign summary CSV path
    defect            bool, plant the benchmark defect (default false)
    defect_mode       "dead_zone" | "gain_flip" | "delayed_grasp"
    defect_volume     defect region volume fraction, default 0.02
    defect_seed       construction seed for defect placement, default 0
    noise             bool, enable actuation noise (default false)
    noise_variance    gaussian actuation-noise variance, default 0.25
    speed_tau, v_max, ramp_time, grasp_distance, grasp_time,
    cruise_height, restore_kp, restore_kd
                      controller overrides (floats)
    anneal_initial_temp, anneal_visit, anneal_accept,
    anneal_restart_ratio, anneal_max_rounds
                      dual-annealing parameter overrides
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .errors import ArgumentError, ConfigError
from .optim import OPTIMIZERS, AnnealParams
from .trace import TASK_IDS

_CONTROLLER_KEYS = (
    "speed_tau", "v_max", "ramp_time", "grasp_distance",
    "grasp_time", "cruise_height", "restore_kp", "restore_kd",
)
_ANNEAL_KEYS = {
    "anneal_initial_temp": "initial_temp",
    "anneal_visit": "visit",
    "anneal_accept": "accept",
    "anneal_restart_ratio": "restart_temp_ratio",
    "anneal_max_rounds": "max_rounds",
}


@dataclass(frozen=True)
class EngineConfig:
    tasks: tuple[str, ...] = ()
    bridge: str | None = None
    optimizer: str = "dual_annealing"
    optimizers: tuple[str, ...] | None = None
    trials: int | None = None
    budget: int = 300
    seed: int = 0
    jobs: int = 0
    stl_stride: int | None = None
    spec: str | None = None
    spec_path: str | None = None
    spec_kind: str = "success"
    output: str | None = None
    output_csv: str | None = None
    defect: bool = False
    defect_mode: str | None = None
    defect_volume: float = 0.02
    defect_seed: int = 0
    noise: bool = False
    noise_variance: float = 0.25
    speed_tau: float | None = None
    v_max: float | None = None
    ramp_time: float | None = None
    grasp_distance: float | None = None
    grasp_time: float | None = None
    cruise_height: float | None = None
    restore_kp: float | None = None
    restore_kd: float | None = None
    anneal_initial_temp: float | None = None
    anneal_visit: float | None = None
    anneal_accept: float | None = None
    anneal_restart_ratio: float | None = None
    anneal_max_rounds: int | None = None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        del d["tasks"]
        d["task"] = list(self.tasks)
        d["optimizers"] = list(self.optimizers) if self.optimizers is not None else None
        return d

    # ---- derived builders ------------------------------------------------

    def controller_overrides(self) -> dict:
        return {k: getattr(self, k) for k in _CONTROLLER_KEYS if getattr(self, k) is not None}

    def anneal_params(self) -> AnnealParams | None:
        overrides = {
            dest: getattr(self, key)
            for key, dest in _ANNEAL_KEYS.items()
            if getattr(self, key) is not None
        }
        return AnnealParams(**overrides) if overrides else None

    def make_environment(self, task_id: str):
        """Build the configured environment for one task id."""
        from .envs import (
            DEFAULT_CONTROLLERS, ControllerParams, NoiseSpec, default_defect, make_env,
        )

        overrides = self.controller_overrides()
        controller = None
        if overrides:
            base = dataclasses.asdict(DEFAULT_CONTROLLERS[task_id])
            base.update(overrides)
            controller = ControllerParams(**base)
        defect = None
        if self.defect:
            defect = default_defect(
                task_id, seed=self.defect_seed,
                volume_fraction=self.defect_volume, mode=self.defect_mode,
            )
        noise = NoiseSpec(variance=self.noise_variance) if self.noise else None
        return make_env(task_id, controller=controller, defect=defect, noise=noise)

    def resolve_formula(self, task_id: str | None):
        """The formula this run monitors or falsifies, as an AST."""
        from .stl import parse

        if self.spec is not None:
            return parse(self.spec)
        if self.spec_path is not None:
            with open(self.spec_path, "r", encoding="utf-8") as fh:
                return parse(fh.read())
        if task_id is None:
            raise ConfigError(["a bridged run needs `spec` or `spec_path`"])
        from .envs import builtin_spec

        return builtin_spec(task_id, self.spec_kind)


def _problem(problems, key, message):
    problems.append(f"{key}: {message}")


def _take(data, key, kinds, problems, default=None):
    if key not in data:
        return default
    value = data.pop(key)
    if value is None:  # JSON null means "unset" (round-trip of to_dict output)
        return default
    if kinds is bool:
        if not isinstance(value, bool):
            _problem(problems, key, f"expected a boolean, got {value!r}")
            return default
        return value
    if kinds is int:
        if not isinstance(value, int) or isinstance(value, bool):
            _problem(problems, key, f"expected an integer, got {value!r}")
            return default
        return value
    if kinds is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            _problem(problems, key, f"expected a number, got {value!r}")
            return default
        return float(value)
    if kinds is str:
        if not isinstance(value, str):
            _problem(problems, key, f"expected a string, got {value!r}")
            return default
        return value
    raise AssertionError(kinds)


def build_config(data, overrides=None) -> EngineConfig:
    """Validate a mapping (plus flag overrides) into an EngineConfig.

    All problems are collected and raised together as one ConfigError.
    """
    merged = dict(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    problems: list[str] = []

    tasks_value = merged.pop("task", None)
    tasks: tuple[str, ...] = ()
    if tasks_value is not None:
        if isinstance(tasks_value, str):
            tasks_value = [tasks_value]
        if not isinstance(tasks_value, (list, tuple)) or not all(
            isinstance(t, str) for t in tasks_value
        ):
            _problem(problems, "task", f"expected a task id or list of ids, got {tasks_value!r}")
            tasks_value = []
        unknown = [t for t in tasks_value if t not in TASK_IDS]
        if unknown:
            _problem(problems, "task", f"unknown ids {unknown}, valid ids are {list(TASK_IDS)}")
        tasks = tuple(t for t in tasks_value if t in TASK_IDS)

    optimizers_value = merged.pop("optimizers", None)
    optimizers = None
    if optimizers_value is not None:
        if not isinstance(optimizers_value, (list, tuple)) or not all(
            isinstance(o, str) for o in optimizers_value
        ):
            _problem(problems, "optimizers", f"expected a list of names, got {optimizers_value!r}")
        else:
            optimizers = tuple(optimizers_value)
            for name in optimizers:
                if name not in OPTIMIZERS:
                    _problem(problems, "optimizers",
                             f"unknown optimizer {name!r}, valid names are {sorted(OPTIMIZERS)}")

    fields = {
        "bridge": _take(merged, "bridge", str, problems),
        "optimizer": _take(merged, "optimizer", str, problems, "dual_annealing"),
        "trials": _take(merged, "trials", int, problems),
        "budget": _take(merged, "budget", int, problems, 300),
        "seed": _take(merged, "seed", int, problems, 0),
        "jobs": _take(merged, "jobs", int, problems, 0),
        "stl_stride": _take(merged, "stl_stride", int, problems),
        "spec": _take(merged, "spec", str, problems),
        "spec_path": _take(merged, "spec_path", str, problems),
        "spec_kind": _take(merged, "spec_kind", str, problems, "success"),
        "output": _take(merged, "output", str, problems),
        "output_csv": _take(merged, "output_csv", str, problems),
        "defect": _take(merged, "defect", bool, problems, False),
        "defect_mode": _take(merged, "defect_mode", str, problems),
        "defect_volume": _take(merged, "defect_volume", float, problems, 0.02),
        "defect_seed": _take(merged, "defect_seed", int, problems, 0),
        "noise": _take(merged, "noise", bool, problems, False),
        "noise_variance": _take(merged, "noise_variance", float, problems, 0.25),
    }
    for key in _CONTROLLER_KEYS:
        fields[key] = _take(merged, key, float, problems)
    for key in _ANNEAL_KEYS:
        kind = int if key == "anneal_max_rounds" else float
        fields[key] = _take(merged, key, kind, problems)

    for key in sorted(merged):
        _problem(problems, key, "unknown configuration key")

    if fields["optimizer"] not in OPTIMIZERS:
        _problem(problems, "optimizer",
                 f"unknown optimizer {fields['optimizer']!r}, valid names are {sorted(OPTIMIZERS)}")
    if fields["trials"] is not None and fields["trials"] < 1:
        _problem(problems, "trials", f"must be >= 1, got {fields['trials']}")
    if fields["budget"] < 1:
        _problem(problems, "budget", f"must be >= 1, got {fields['budget']}")
    if fields["seed"] < 0:
        _problem(problems, "seed", f"must be >= 0, got {fields['seed']}")
    if fields["jobs"] < 0:
        _problem(problems, "jobs", f"must be >= 0, got {fields['jobs']}")
    if fields["stl_stride"] is not None and fields["stl_stride"] < 1:
        _problem(problems, "stl_stride", f"must be >= 1, got {fields['stl_stride']}")
    if fields["stl_stride"] is not None and fields["bridge"] is None:
        _problem(problems, "stl_stride",
                 "only applies to bridged environments, built-in tasks define their own stride")
    if fields["spec"] is not None and fields["spec_path"] is not None:
        _problem(problems, "spec", "spec and spec_path are mutually exclusive")
    if fields["spec_kind"] not in ("success", "danger"):
        _problem(problems, "spec_kind",
                 f"must be 'success' or 'danger', got {fields['spec_kind']!r}")
    if fields["bridge"] is not None:
        from .bridge import _parse_endpoint

        try:
            _parse_endpoint(fields["bridge"])
        except ArgumentError as exc:
            _problem(problems, "bridge", str(exc))
    if fields["bridge"] is None and not tasks:
        _problem(problems, "task", "required unless a bridge endpoint is configured")
    if not (0.0 < fields["defect_volume"] < 1.0):
        _problem(problems, "defect_volume", f"must be in (0, 1), got {fields['defect_volume']}")
    if fields["defect_seed"] < 0:
        _problem(problems, "defect_seed", f"must be >= 0, got {fields['defect_seed']}")
    if fields["defect_mode"] is not None:
        from .envs import DEFECT_MODES

        if fields["defect_mode"] not in DEFECT_MODES:
            _problem(problems, "defect_mode",
                     f"must be one of {list(DEFECT_MODES)}, got {fields['defect_mode']!r}")
    if fields["noise_variance"] <= 0:
        _problem(problems, "noise_variance", f"must be positive, got {fields['noise_variance']}")
    selected = {fields["optimizer"], *(optimizers or ())}
    anneal_set = [k for k in _ANNEAL_KEYS if fields[k] is not None]
    if anneal_set and "dual_annealing" not in selected:
        _problem(problems, anneal_set[0],
                 "annealing parameters require the dual_annealing optimizer")

    config = None
    if not problems:
        config = EngineConfig(tasks=tasks, optimizers=optimizers, **fields)
        # range-check controller and annealing overrides with the same
        # rules the underlying modules enforce
        try:
            if config.tasks:
                for t in config.tasks:
                    config.make_environment(t)
            config.anneal_params()
        except ArgumentError as exc:
            problems.append(str(exc))
    if problems:
        raise ConfigError(problems)
    return config


def load_config(path: str) -> dict:
    """Read a config mapping from a .toml or .json file."""
    if path.endswith(".json"):
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError([f"{path}: {exc}"]) from exc
    elif path.endswith(".toml"):
        import tomli

        with open(path, "rb") as fh:
            try:
                data = tomli.load(fh)
            except tomli.TOMLDecodeError as exc:
                raise ConfigError([f"{path}: {exc}"]) from exc
    else:
        raise ConfigError([f"config file must end in .toml or .json, got {path!r}"])
    if not isinstance(data, dict):
        raise ConfigError([f"config root must be a table/object, got {type(data).__name__}"])
    return data
