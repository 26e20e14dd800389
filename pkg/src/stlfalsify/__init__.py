"""stlfalsify: specification falsification for AI-controlled simulated systems.

The package stacks four layers:

- stl: parsing, printing and quantitative (robustness) monitoring of
  bounded signal temporal logic over uniformly sampled traces;
- optim: derivative-free minimizers (random search, Nelder-Mead, dual
  annealing) with exact budget, box and determinism contracts;
- envs: eight scripted manipulation surrogates with plantable controller
  defects and actuation noise, plus a reference double integrator;
- falsify / campaign / metrics: trial orchestration, benchmark campaigns
  with JSON / CSV reports, and success-rate / danger-rate / completion-time
  evaluation.

Everything is reproducible from integer seeds; see the seeding module for
the derivation rules.
"""

from .errors import (
    ArgumentError,
    BoundError,
    BridgeError,
    ConfigError,
    DomainError,
    HorizonError,
    ParseError,
    SamplingError,
    SchemaError,
)
from .seeding import derive_seed, episode_seed, generator
from .trace import TASK_IDS, Box, TaskSpec, Trace, decimate, trace_from_csv, trace_to_csv
from .stl import (
    horizon,
    innermost_predicates,
    parse,
    robustness,
    satisfies,
    to_source,
)
from .optim import OPTIMIZERS, AnnealParams, OptResult, optimize
from .envs import (
    ControllerParams,
    DefectSpec,
    NoiseSpec,
    ReferenceEnvironment,
    SurrogateEnvironment,
    builtin_spec,
    default_defect,
    make_env,
    task_spec,
)
from .falsify import FalsificationResult, falsify
from .metrics import Metrics, evaluate
from .campaign import CampaignReport, run_campaign, timing_stripped
from .config import EngineConfig, build_config, load_config
from .bridge import PROTOCOL_VERSION, BridgedEnvironment, BridgeHandshake, attach

__version__ = "1.0.0"

__all__ = [
    "ArgumentError",
    "BoundError",
    "BridgeError",
    "ConfigError",
    "DomainError",
    "HorizonError",
    "ParseError",
    "SamplingError",
    "SchemaError",
    "derive_seed",
    "episode_seed",
    "generator",
    "TASK_IDS",
    "Box",
    "TaskSpec",
    "Trace",
    "decimate",
    "trace_from_csv",
    "trace_to_csv",
    "horizon",
    "innermost_predicates",
    "parse",
    "robustness",
    "satisfies",
    "to_source",
    "OPTIMIZERS",
    "AnnealParams",
    "OptResult",
    "optimize",
    "ControllerParams",
    "DefectSpec",
    "NoiseSpec",
    "ReferenceEnvironment",
    "SurrogateEnvironment",
    "builtin_spec",
    "default_defect",
    "make_env",
    "task_spec",
    "FalsificationResult",
    "falsify",
    "Metrics",
    "evaluate",
    "CampaignReport",
    "run_campaign",
    "timing_stripped",
    "EngineConfig",
    "build_config",
    "load_config",
    "PROTOCOL_VERSION",
    "BridgedEnvironment",
    "BridgeHandshake",
    "attach",
    "__version__",
]
