"""Acceptance criterion 8: external-bridge equivalence.

Drives the separately built gym-bridge server (gym-bridge/dist/main.js)
through the engine's bridge client. Skips cleanly when the server has not
been built (`npm run build` inside gym-bridge/) or node is unavailable;
the primary criteria in test_acceptance.py do not depend on it.
"""

import json
import shlex
import shutil
import subprocess
import time
from pathlib import Path

import numpy as np
import pytest

from stlfalsify.bridge import attach
from stlfalsify.envs import ReferenceEnvironment
from stlfalsify.envs.reference import REFERENCE_SPEC
from stlfalsify.falsify import falsify
from stlfalsify.stl import parse

SERVER = Path(__file__).resolve().parent.parent / "gym-bridge" / "dist" / "main.js"
NODE = shutil.which("node")

pytestmark = pytest.mark.skipif(
    NODE is None or not SERVER.exists(),
    reason="gym-bridge server not built (run `npm run build` in gym-bridge/)",
)


def endpoint():
    return f"stdio:{shlex.quote(NODE)} {shlex.quote(str(SERVER))}"


@pytest.fixture
def announce(capsys):
    def _announce(line):
        with capsys.disabled():
            print(line)

    return _announce


def _garbage_lines(count):
    rng = np.random.default_rng(0xFADE)
    alphabet = list("{}[]\",:0123456789abcdefXYZ \t\\é☃")
    lines = []
    for i in range(count):
        if i % 5 == 4:  # valid JSON of the wrong shape, never an object with an op
            scalar = [None, True, 3.5, "text", [1, [2, "x"]], {"note": i}][i % 6]
            lines.append(json.dumps(scalar))
        else:
            length = int(rng.integers(0, 40))
            lines.append("".join(rng.choice(alphabet, size=length)))
    return lines


def test_criterion_8_bridge_equivalence(announce):
    native = ReferenceEnvironment()
    formula = parse(REFERENCE_SPEC)

    # per-sample trace agreement, stdio transport
    max_diff = 0.0
    with attach(endpoint()) as env:
        assert env.task_id == "REF"
        assert env.episode_steps == native.episode_steps
        for point in ((0.5, 0.25), (-1.0, 1.0), (0.0, 0.0), (0.9, -0.9), (0.123, 0.456)):
            remote = env.simulate(point, seed=7)
            local = native.simulate(point, seed=7)
            for name in ("pos", "target"):
                diff = float(np.max(np.abs(remote.signals[name] - local.signals[name])))
                assert diff <= 1e-9, (point, name, diff)
                max_diff = max(max_diff, diff)

        # identical falsification outcomes over 10 seeded trials
        for seed in range(10):
            ours = falsify(native, formula, seed=seed, budget=40, optimizer="random")
            theirs = falsify(env, formula, seed=seed, budget=40, optimizer="random")
            assert theirs.success == ours.success, seed
            assert theirs.simulations == ours.simulations, seed
            assert theirs.min_robustness == ours.min_robustness, seed
            assert theirs.falsifying_input == ours.falsifying_input, seed
            assert theirs.terminated_by == ours.terminated_by, seed

    # same behavior over a TCP socket
    port_file = SERVER.parent / ".port-under-test"
    if port_file.exists():
        port_file.unlink()
    proc = subprocess.Popen([NODE, str(SERVER), "--tcp", "0",
                             "--port-file", str(port_file)],
                            stderr=subprocess.DEVNULL)
    try:
        deadline = time.monotonic() + 15.0
        while not (port_file.exists() and port_file.read_text()):
            assert time.monotonic() < deadline, "server never reported its port"
            time.sleep(0.02)
        port = int(port_file.read_text())
        with attach(f"tcp:127.0.0.1:{port}") as env:
            remote = env.simulate((0.6, -0.3), seed=1)
            local = native.simulate((0.6, -0.3), seed=1)
            assert np.max(np.abs(remote.signals["pos"] - local.signals["pos"])) <= 1e-9
    finally:
        proc.kill()
        proc.wait()
        if port_file.exists():
            port_file.unlink()

    # protocol fuzzing: 1,000 malformed lines, only error replies, no crash
    garbage = _garbage_lines(1000)
    payload = "".join(line + "\n" for line in garbage)
    payload += '{"op": "hello"}\n{"op": "close"}\n'
    proc = subprocess.Popen([NODE, str(SERVER)], stdin=subprocess.PIPE,
                            stdout=subprocess.PIPE)
    out, _ = proc.communicate(payload.encode("utf-8"), timeout=60.0)
    assert proc.returncode == 0
    replies = [json.loads(line) for line in out.decode("utf-8").splitlines()]
    assert len(replies) == len(garbage) + 1
    for reply in replies[:-1]:
        assert reply["op"] == "error", reply
        assert reply["kind"] == "protocol", reply
    assert replies[-1]["op"] == "hello"

    announce(f"[criterion 8] PASS: native vs bridged traces agree to "
             f"{max_diff:.1e} (<= 1e-9) over stdio and TCP, 10/10 seeded "
             f"falsification trials identical, 1000/1000 malformed lines "
             f"answered with error replies and no crash")
