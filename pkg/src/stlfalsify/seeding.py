"""Deterministic seed derivation.

All randomness in the engine flows from 64-bit integer seeds through
counter-based Philox generators. Sub-streams are derived with SeedSequence
over an integer path, so the same (seed, path) always yields the same
stream on every platform and the streams for different paths are
statistically independent.

Stream tags (the first path element after the base seed):
  1  episode noise streams, indexed by evaluation number
  2  optimizer sampling stream
  3  input sampling stream (evaluate / metrics)
  4  defect region placement (envs module)
  5  campaign trial-seed splitting (campaign module)
"""

import numpy as np

EPISODE_STREAM = 1
OPTIMIZER_STREAM = 2
INPUT_STREAM = 3


def derive_seed(*parts: int) -> int:
    """Collapse an integer path into a fresh 64-bit seed."""
    if not parts:
        raise ValueError("derive_seed needs at least one part")
    return int(np.random.SeedSequence(list(parts)).generate_state(1, dtype=np.uint64)[0])


def episode_seed(seed: int, evaluation_index: int) -> int:
    """Seed for the noise stream of one simulated episode within a trial.

    Distinct evaluation indices get distinct noise, while re-running the
    trial with the same base seed replays every episode exactly.
    """
    return derive_seed(seed, EPISODE_STREAM, evaluation_index)


def generator(seed: int) -> np.random.Generator:
    """Philox generator for the given seed."""
    return np.random.Generator(np.random.Philox(key=seed))
