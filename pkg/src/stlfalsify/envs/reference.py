"""Reference environment: a 2-D double integrator under PD control.

This tiny closed-form plant exists so that alternative environment hosts
(e.g. the line-delimited JSON bridge) can be checked against a native
implementation sample by sample. The update uses plain IEEE double
arithmetic in a fixed order, so any language with 64-bit floats can
reproduce it exactly:

    a = 4 * (target - p) - 3 * v
    v = v + a * dt
    p = p + v * dt        (per axis, dt = 1/60)

The input is the target point in [-1, 1]^2; the episode runs 300 steps
from p = v = 0. Simulation is a pure function of the input; the seed is
accepted for interface compatibility and ignored.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..trace import Box, Trace
from .dynamics import DT, EPISODE_STEPS


class ReferenceEnvironment:
    """Deterministic double integrator; simulate() ignores the seed."""

    task_id = "REF"
    input_box = Box([("x", -1.0, 1.0), ("y", -1.0, 1.0)])
    signal_schema = {"pos": 2, "target": 2}
    episode_steps = EPISODE_STEPS
    stl_stride = 10
    sample_period = DT

    def simulate(self, point, seed: int) -> Trace:
        p = np.asarray(point, dtype=float)
        if p.shape != (2,):
            raise DomainError(f"reference env expects a 2-dimensional input, got shape {p.shape}")
        if not self.input_box.contains(p, tol=1e-12):
            raise DomainError(f"input {p.tolist()} is outside the reference input box")
        tx, ty = float(p[0]), float(p[1])
        pos = np.empty((EPISODE_STEPS + 1, 2))
        pos[0] = (0.0, 0.0)
        px = py = vx = vy = 0.0
        for k in range(EPISODE_STEPS):
            ax = 4.0 * (tx - px) - 3.0 * vx
            ay = 4.0 * (ty - py) - 3.0 * vy
            vx = vx + ax * DT
            vy = vy + ay * DT
            px = px + vx * DT
            py = py + vy * DT
            pos[k + 1] = (px, py)
        target = np.tile((tx, ty), (EPISODE_STEPS + 1, 1))
        return Trace(DT, {"pos": pos, "target": target})


REFERENCE_SPEC = "G[0,30](norm(pos - target) <= 0.8)"
