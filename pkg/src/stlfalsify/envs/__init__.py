"""Surrogate manipulation environments with plantable controller defects."""

from ..trace import TASK_IDS
from .core import (
    DEFAULT_CONTROLLERS,
    DEFAULT_DEFECT_MODES,
    DEFECT_MODES,
    HARD_CORNERS,
    INPUT_BOXES,
    SIGNAL_SCHEMAS,
    STL_STRIDE,
    ControllerParams,
    DefectSpec,
    NoiseSpec,
    SurrogateEnvironment,
    builtin_spec,
    default_defect,
    make_env,
    spec_source,
    task_spec,
)
from .dynamics import DT, EPISODE_STEPS
from .reference import REFERENCE_SPEC, ReferenceEnvironment

__all__ = [
    "TASK_IDS",
    "DEFAULT_CONTROLLERS",
    "DEFAULT_DEFECT_MODES",
    "DEFECT_MODES",
    "HARD_CORNERS",
    "INPUT_BOXES",
    "SIGNAL_SCHEMAS",
    "STL_STRIDE",
    "DT",
    "EPISODE_STEPS",
    "ControllerParams",
    "DefectSpec",
    "NoiseSpec",
    "SurrogateEnvironment",
    "ReferenceEnvironment",
    "REFERENCE_SPEC",
    "builtin_spec",
    "default_defect",
    "make_env",
    "spec_source",
    "task_spec",
]
