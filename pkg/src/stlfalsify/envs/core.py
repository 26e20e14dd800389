"""Surrogate environment model: controllers, planted defects, noise, catalog.

The eight task ids, their input boxes and their channel layouts live here,
together with the parsed success / danger specification pairs shipped as
package data. make_env assembles a SurrogateEnvironment from a task id plus
optional controller overrides, a planted defect, and an actuation noise
model; default_defect places the benchmark 2%-volume defect region at the
hardest corner of the input box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..errors import ArgumentError, DomainError
from ..seeding import derive_seed, generator
from ..trace import TASK_IDS, Box, TaskSpec, Trace
from .dynamics import DT, EPISODE_STEPS, SIMULATORS

STL_STRIDE = 10
DEFECT_MODES = ("dead_zone", "gain_flip", "delayed_grasp")
DEFECT_PLACEMENT_STREAM = 4  # seed-stream tag for defect region jitter

INPUT_BOXES = {
    "PR": Box([("x", 0.3, 0.7), ("y", -0.4, 0.4), ("z", 0.4, 0.8)]),
    "CS": Box([("x", 0.4, 0.8), ("y", -0.1, 0.3)]),
    "PH": Box([("x", 0.3, 0.7), ("y", -0.2, 0.2)]),
    "BB": Box([("x", 0.2, 0.5), ("y", -0.15, 0.15)]),
    "BC": Box([("x", 1.05, 1.15), ("y", -0.05, 0.05)]),
    "BP": Box([("x", 0.4, 0.6), ("y", -0.1, 0.1)]),
    "DO": Box([("x", 0.75, 0.85), ("y", -0.1, 0.1)]),
    "CP": Box([("x", 0.45, 0.75), ("y", -0.35, 0.35)]),
}

SIGNAL_SCHEMAS = {
    "PR": {"finger_pos": 3, "point_pos": 3},
    "CS": {"cube_pos": 3, "target_pos": 3},
    "PH": {"obj_pos": 3, "hole_pos": 3},
    "BB": {"ball_pos": 3, "tray_pos": 3},
    "BC": {"ball_pos": 3, "tool_pos": 3},
    "BP": {"ball_pos": 3, "hole_pos": 3},
    "DO": {"door_yaw": 1},
    "CP": {"cloth_pos": 3, "table_pos": 3, "ground_pos": 3},
}

# Direction of the hardest corner of each input box (+1 = high edge,
# -1 = low edge per axis). Residual task errors grow toward this corner,
# and default_defect anchors the planted region there.
HARD_CORNERS = {
    "PR": (1, 1, 1),
    "CS": (1, 1),
    "PH": (1, 1),
    "BB": (1, 1),
    "BC": (1, 1),
    "BP": (-1, 1),
    "DO": (1, 1),
    "CP": (1, 1),
}

DEFAULT_DEFECT_MODES = {
    "PR": "dead_zone",
    "CS": "dead_zone",
    "PH": "dead_zone",
    "BB": "gain_flip",
    "BC": "delayed_grasp",
    "BP": "dead_zone",
    "DO": "dead_zone",
    "CP": "dead_zone",
}


def _check_range(name, value, lo, hi):
    v = float(value)
    if not math.isfinite(v) or not (lo <= v <= hi):
        raise ArgumentError(f"{name} must be in [{lo}, {hi}], got {value!r}")
    return v


@dataclass(frozen=True)
class ControllerParams:
    """Tunable gains of the scripted task controllers.

    speed_tau is the first-order tracking constant of the arm (the commanded
    velocity is error / speed_tau, saturated at v_max). ramp_time is how long
    setpoints take to travel from the home pose to their goal. Engagement
    triggers (grasp, push, handle contact) integrate proximity within
    grasp_distance until grasp_time seconds have accumulated. Carried objects
    traverse at cruise_height. restore_kp / restore_kd drive the tray
    balancing task, which has no arm.
    """

    speed_tau: float = 0.2
    v_max: float = 1.5
    ramp_time: float = 1.0
    grasp_distance: float = 0.03
    grasp_time: float = 0.05
    cruise_height: float = 0.2
    restore_kp: float = 16.0
    restore_kd: float = 8.0

    def __post_init__(self):
        _check_range("speed_tau", self.speed_tau, 0.02, 1.0)
        _check_range("v_max", self.v_max, 0.1, 10.0)
        _check_range("ramp_time", self.ramp_time, 0.05, 5.0)
        _check_range("grasp_distance", self.grasp_distance, 0.005, 0.5)
        _check_range("grasp_time", self.grasp_time, 0.01, 2.0)
        _check_range("cruise_height", self.cruise_height, 0.05, 1.0)
        _check_range("restore_kp", self.restore_kp, 0.1, 1000.0)
        _check_range("restore_kd", self.restore_kd, 0.0, 100.0)


DEFAULT_CONTROLLERS = {
    "PR": ControllerParams(speed_tau=0.12),
    "CS": ControllerParams(),
    "PH": ControllerParams(ramp_time=0.8),
    "BB": ControllerParams(),
    "BC": ControllerParams(speed_tau=0.06, ramp_time=0.3),
    "BP": ControllerParams(speed_tau=0.15),
    "DO": ControllerParams(grasp_distance=0.06),  # handle contact, not a pinch grasp
    "CP": ControllerParams(),
}


@dataclass(frozen=True)
class NoiseSpec:
    """Zero-mean gaussian actuation noise added to every executed command."""

    kind: str = "action_gaussian"
    variance: float = 0.25

    def __post_init__(self):
        if self.kind != "action_gaussian":
            raise ArgumentError(f"unknown noise kind {self.kind!r}")
        v = float(self.variance)
        if not math.isfinite(v) or v <= 0:
            raise ArgumentError(f"noise variance must be positive, got {self.variance!r}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class DefectSpec:
    """A controller flaw active on a sub-region of the input box.

    dead_zone zeroes the executed command, gain_flip negates it (for the
    tray task: flips the restoring spring), delayed_grasp suppresses
    engagement triggers during the first half of the episode. The declared
    volume_fraction must match the region's actual share of the input box.
    """

    mode: str
    region: Box
    volume_fraction: float

    def __post_init__(self):
        if self.mode not in DEFECT_MODES:
            raise ArgumentError(f"unknown defect mode {self.mode!r}, expected one of {DEFECT_MODES}")
        if not isinstance(self.region, Box):
            raise ArgumentError("defect region must be a Box")
        f = float(self.volume_fraction)
        if not (0.0 < f < 1.0):
            raise ArgumentError(f"volume_fraction must be in (0, 1), got {self.volume_fraction!r}")


_SPEC_CACHE: dict[tuple[str, str], object] = {}
_TASK_CACHE: dict[str, TaskSpec] = {}


def spec_source(task_id: str, kind: str) -> str:
    """Raw text of a shipped specification file."""
    if task_id not in TASK_IDS:
        raise ArgumentError(f"unknown task id {task_id!r}, expected one of {TASK_IDS}")
    if kind not in ("success", "danger"):
        raise ArgumentError(f"spec kind must be 'success' or 'danger', got {kind!r}")
    name = f"{task_id.lower()}_{kind}.stl"
    return resources.files(__package__).joinpath("specs", name).read_text(encoding="utf-8")


def builtin_spec(task_id: str, kind: str):
    """Parsed formula of a shipped specification file (cached)."""
    key = (task_id, kind)
    if key not in _SPEC_CACHE:
        from ..stl import parse

        _SPEC_CACHE[key] = parse(spec_source(task_id, kind))
    return _SPEC_CACHE[key]


def task_spec(task_id: str) -> TaskSpec:
    """The static description of one benchmark task (cached)."""
    if task_id not in TASK_IDS:
        raise ArgumentError(f"unknown task id {task_id!r}, expected one of {TASK_IDS}")
    if task_id not in _TASK_CACHE:
        _TASK_CACHE[task_id] = TaskSpec(
            task_id=task_id,
            input_box=INPUT_BOXES[task_id],
            signal_schema=SIGNAL_SCHEMAS[task_id],
            episode_steps=EPISODE_STEPS,
            stl_stride=STL_STRIDE,
            success_spec=builtin_spec(task_id, "success"),
            danger_spec=builtin_spec(task_id, "danger"),
        )
    return _TASK_CACHE[task_id]


def default_defect(task_id: str, seed: int = 0, volume_fraction: float = 0.02,
                   mode: str | None = None) -> DefectSpec:
    """The benchmark planted defect: a volume_fraction slice of the input
    box anchored at the task's hardest corner, with a small seeded inward
    jitter so the exact boundary is not axis-round."""
    spec = task_spec(task_id)
    box = spec.input_box
    if not (0.0 < volume_fraction < 1.0):
        raise ArgumentError(f"volume_fraction must be in (0, 1), got {volume_fraction!r}")
    side = volume_fraction ** (1.0 / box.dim)
    rng = generator(derive_seed(seed, DEFECT_PLACEMENT_STREAM, TASK_IDS.index(task_id)))
    dims = []
    for (name, lo, hi), sign in zip(box.dims, HARD_CORNERS[task_id]):
        width = hi - lo
        r = width * side
        jitter = rng.random() * 0.05 * (width - r)
        if sign > 0:
            dims.append((name, hi - jitter - r, hi - jitter))
        else:
            dims.append((name, lo + jitter, lo + jitter + r))
    region = Box(dims)
    return DefectSpec(
        mode=mode if mode is not None else DEFAULT_DEFECT_MODES[task_id],
        region=region,
        volume_fraction=region.volume() / box.volume(),
    )


class SurrogateEnvironment:
    """One benchmark task bound to a controller, a defect, and a noise model.

    simulate(point, seed) rolls a full episode and returns a Trace sampled
    at the control rate; the same (point, seed) pair always produces the
    same trace. seed only matters when actuation noise is enabled.
    """

    def __init__(self, spec: TaskSpec, controller: ControllerParams,
                 defect: DefectSpec | None, noise: NoiseSpec | None):
        self.spec = spec
        self.controller = controller
        self.defect = defect
        self.noise = noise

    @property
    def task_id(self) -> str:
        return self.spec.task_id

    @property
    def input_box(self) -> Box:
        return self.spec.input_box

    @property
    def signal_schema(self):
        return self.spec.signal_schema

    @property
    def episode_steps(self) -> int:
        return self.spec.episode_steps

    @property
    def stl_stride(self) -> int:
        return self.spec.stl_stride

    @property
    def sample_period(self) -> float:
        return DT

    def __repr__(self):
        bits = [self.task_id]
        if self.defect is not None:
            bits.append(f"defect={self.defect.mode}")
        if self.noise is not None:
            bits.append(f"noise={self.noise.variance:g}")
        return f"SurrogateEnvironment({', '.join(bits)})"

    def simulate(self, point, seed: int) -> Trace:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.input_box.dim,):
            raise DomainError(
                f"{self.task_id} expects a {self.input_box.dim}-dimensional input, "
                f"got shape {p.shape}"
            )
        if not self.input_box.contains(p, tol=1e-12):
            raise DomainError(f"input {p.tolist()} is outside the {self.task_id} input box")
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise ArgumentError(f"seed must be an integer, got {seed!r}")
        if not (0 <= int(seed) < 2 ** 64):
            raise ArgumentError(f"seed must fit in 64 unsigned bits, got {seed}")
        mode = None
        if self.defect is not None and self.defect.region.contains(p):
            mode = self.defect.mode
        rows = None
        if self.noise is not None:
            rows = generator(int(seed)).normal(0.0, self.noise.std, (EPISODE_STEPS, 3)).tolist()
        signals = SIMULATORS[self.task_id](tuple(p), self.controller, mode, rows)
        return Trace(DT, signals)


def make_env(task_id: str, controller: ControllerParams | None = None,
             defect: DefectSpec | None = None,
             noise: NoiseSpec | None = None) -> SurrogateEnvironment:
    """Assemble a surrogate environment, validating defect placement."""
    spec = task_spec(task_id)
    if controller is None:
        controller = DEFAULT_CONTROLLERS[task_id]
    elif not isinstance(controller, ControllerParams):
        raise ArgumentError("controller must be a ControllerParams")
    if defect is not None:
        if not isinstance(defect, DefectSpec):
            raise ArgumentError("defect must be a DefectSpec")
        box = spec.input_box
        if defect.region.dim != box.dim or not box.contains_box(defect.region):
            raise ArgumentError(
                f"defect region must lie inside the {task_id} input box"
            )
        actual = defect.region.volume() / box.volume()
        if abs(actual - defect.volume_fraction) > 1e-9:
            raise ArgumentError(
                f"declared defect volume_fraction {defect.volume_fraction!r} does not match "
                f"the region's actual fraction {actual!r}"
            )
    if noise is not None and not isinstance(noise, NoiseSpec):
        raise ArgumentError("noise must be a NoiseSpec")
    return SurrogateEnvironment(spec, controller, defect, noise)
