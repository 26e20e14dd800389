"""Client for environments hosted by an external process.

An external server exposes one environment behind a small request/reply
protocol: one JSON object per line, UTF-8, over either the server's
stdin/stdout or a TCP socket. attach() connects, performs the hello
handshake, and returns an object with the same surface as the built-in
surrogate environments, so falsify(), evaluate(), and run_campaign() work
against remote systems unchanged.

Protocol:

    -> {"op": "hello"}
    <- {"op": "hello", "name": ..., "input_dim": D,
        "bounds": [[lo, hi], ...], "signals": [{"name": ..., "dim": ...}],
        "episode_steps": N, "protocol_version": "1.0.0"}
    -> {"op": "simulate", "input": [...], "seed": S}
    <- {"op": "trace", "time": [...], "signals": {"name": [[...], ...]}}
    <- {"op": "error", "kind": "domain" | "simulation" | "protocol",
        "message": ...}
    -> {"op": "close"}

An error reply leaves the connection usable; `domain` errors surface as
DomainError, everything else as BridgeError. Transport failures and
replies that take longer than the timeout (default 30 s) raise
BridgeError and abandon the connection. Endpoints:

    stdio:CMD ARGS...   spawn CMD and talk over its pipes
    tcp:HOST:PORT       connect a socket

Bridged environments pickle by endpoint and reconnect lazily on first
use, so campaign workers each hold their own connection.
"""

from __future__ import annotations

import json
import os
import re
import select
import shlex
import socket
import subprocess
import time
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, BridgeError, DomainError, SamplingError, SchemaError
from .trace import IDENTIFIER, Box, Trace

PROTOCOL_VERSION = "1.0.0"

_SEMVER = re.compile(r"^(\d+)\.(\d+)\.(\d+)$")


def _parse_endpoint(endpoint: str):
    if not isinstance(endpoint, str):
        raise ArgumentError(f"endpoint must be a string, got {type(endpoint).__name__}")
    if endpoint.startswith("stdio:"):
        command = endpoint[len("stdio:"):].strip()
        if not command:
            raise ArgumentError("stdio endpoint needs a command, e.g. 'stdio:node server.js'")
        return "stdio", command
    if endpoint.startswith("tcp:"):
        host, sep, port = endpoint[len("tcp:"):].rpartition(":")
        if not sep or not host:
            raise ArgumentError(f"tcp endpoint must be 'tcp:HOST:PORT', got {endpoint!r}")
        try:
            number = int(port)
        except ValueError:
            raise ArgumentError(f"tcp port must be an integer, got {port!r}") from None
        if not (1 <= number <= 65535):
            raise ArgumentError(f"tcp port must be in [1, 65535], got {number}")
        return "tcp", (host, number)
    raise ArgumentError(
        f"endpoint must start with 'stdio:' or 'tcp:', got {endpoint!r}"
    )


class _StdioTransport:
    """Line transport over a child process's stdin/stdout."""

    def __init__(self, command: str):
        argv = shlex.split(command)
        try:
            self._proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE
            )
        except OSError as exc:
            raise BridgeError(f"could not spawn {argv[0]!r}: {exc}") from exc
        self._buf = bytearray()

    def send_line(self, line: str):
        try:
            self._proc.stdin.write(line.encode("utf-8") + b"\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise BridgeError(f"bridge process rejected the request: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        deadline = time.monotonic() + timeout
        fd = self._proc.stdout.fileno()
        while True:
            newline = self._buf.find(b"\n")
            if newline >= 0:
                line = bytes(self._buf[:newline])
                del self._buf[: newline + 1]
                return line.decode("utf-8")
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise BridgeError(f"no reply from bridge process within {timeout:g} s")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                raise BridgeError(f"no reply from bridge process within {timeout:g} s")
            chunk = os.read(fd, 65536)
            if not chunk:
                code = self._proc.poll()
                raise BridgeError(f"bridge process closed its output (exit status {code})")
            self._buf += chunk

    def close(self):
        for stream in (self._proc.stdin, self._proc.stdout):
            try:
                stream.close()
            except OSError:
                pass
        try:
            self._proc.wait(timeout=5.0)
        except subprocess.TimeoutExpired:
            self._proc.kill()
            self._proc.wait()


class _TcpTransport:
    """Line transport over a TCP socket."""

    def __init__(self, host: str, port: int):
        try:
            self._sock = socket.create_connection((host, port), timeout=10.0)
        except OSError as exc:
            raise BridgeError(f"could not connect to {host}:{port}: {exc}") from exc
        self._file = self._sock.makefile("rb")

    def send_line(self, line: str):
        try:
            self._sock.sendall(line.encode("utf-8") + b"\n")
        except OSError as exc:
            raise BridgeError(f"bridge connection rejected the request: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        self._sock.settimeout(timeout)
        try:
            raw = self._file.readline()
        except socket.timeout:
            raise BridgeError(f"no reply from bridge within {timeout:g} s") from None
        except OSError as exc:
            raise BridgeError(f"bridge connection failed: {exc}") from exc
        if not raw:
            raise BridgeError("bridge closed the connection")
        return raw.rstrip(b"\n").decode("utf-8")

    def close(self):
        for item in (self._file, self._sock):
            try:
                item.close()
            except OSError:
                pass


@dataclass(frozen=True)
class BridgeHandshake:
    """Validated contents of a server's hello reply."""

    name: str
    input_dim: int
    bounds: tuple[tuple[float, float], ...]
    signals: tuple[tuple[str, int], ...]
    episode_steps: int
    protocol_version: str

    @classmethod
    def from_message(cls, msg) -> "BridgeHandshake":
        def bad(detail):
            return BridgeError(f"malformed handshake: {detail}")

        if not isinstance(msg, dict) or msg.get("op") != "hello":
            raise bad(f"expected a hello reply, got {msg!r}")
        name = msg.get("name")
        if not isinstance(name, str) or not name:
            raise bad(f"name must be a non-empty string, got {name!r}")
        dim = msg.get("input_dim")
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise bad(f"input_dim must be a positive integer, got {dim!r}")
        bounds_raw = msg.get("bounds")
        if not isinstance(bounds_raw, list) or len(bounds_raw) != dim:
            raise bad(f"bounds must be a list of {dim} [lo, hi] pairs")
        bounds = []
        for pair in bounds_raw:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
                or not (pair[0] <= pair[1])
            ):
                raise bad(f"bounds entry {pair!r} is not a [lo, hi] pair with lo <= hi")
            bounds.append((float(pair[0]), float(pair[1])))
        signals_raw = msg.get("signals")
        if not isinstance(signals_raw, list) or not signals_raw:
            raise bad("signals must be a non-empty list of {name, dim} objects")
        signals = []
        seen = set()
        for entry in signals_raw:
            if not isinstance(entry, dict):
                raise bad(f"signal entry {entry!r} is not an object")
            sname, sdim = entry.get("name"), entry.get("dim")
            if not isinstance(sname, str) or not IDENTIFIER.match(sname):
                raise bad(f"signal name {sname!r} is not an identifier")
            if sname in seen:
                raise bad(f"duplicate signal name {sname!r}")
            seen.add(sname)
            if not isinstance(sdim, int) or isinstance(sdim, bool) or sdim < 1:
                raise bad(f"signal {sname!r} dimension must be a positive integer, got {sdim!r}")
            signals.append((sname, sdim))
        steps = msg.get("episode_steps")
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            raise bad(f"episode_steps must be a positive integer, got {steps!r}")
        version = msg.get("protocol_version")
        if not isinstance(version, str) or not _SEMVER.match(version):
            raise bad(f"protocol_version must be MAJOR.MINOR.PATCH, got {version!r}")
        ours = _SEMVER.match(PROTOCOL_VERSION).group(1)
        if _SEMVER.match(version).group(1) != ours:
            raise BridgeError(
                f"protocol version {version} is incompatible, this client speaks {ours}.x"
            )
        return cls(name, dim, tuple(bounds), tuple(signals), steps, version)


def _roundtrip(transport, request: dict, timeout: float) -> dict:
    transport.send_line(json.dumps(request))
    line = transport.recv_line(timeout)
    try:
        reply = json.loads(line)
    except json.JSONDecodeError as exc:
        raise BridgeError(f"bridge sent invalid JSON: {line[:200]!r}") from exc
    if not isinstance(reply, dict):
        raise BridgeError(f"bridge reply must be an object, got {line[:200]!r}")
    return reply


class BridgedEnvironment:
    """An environment whose episodes run in an external process.

    Satisfies the same protocol as the surrogate environments: input_box,
    signal_schema, episode_steps, stl_stride, and simulate(point, seed).
    The monitoring stride is chosen client-side because the server only
    reports raw episode length.
    """

    def __init__(self, endpoint: str, stl_stride: int = 10, timeout: float = 30.0,
                 expected=None):
        if not isinstance(stl_stride, int) or isinstance(stl_stride, bool) or stl_stride < 1:
            raise ArgumentError(f"stl_stride must be a positive integer, got {stl_stride!r}")
        if not (timeout > 0):
            raise ArgumentError(f"timeout must be positive, got {timeout!r}")
        _parse_endpoint(endpoint)  # fail on syntax before any connection attempt
        self._endpoint = endpoint
        self._stl_stride = stl_stride
        self._timeout = float(timeout)
        self._expected = expected
        self._transport = None
        self._handshake = None
        self._sample_period = None
        self._connect()

    # ---- connection ------------------------------------------------------

    def _connect(self):
        kind, target = _parse_endpoint(self._endpoint)
        transport = _StdioTransport(target) if kind == "stdio" else _TcpTransport(*target)
        try:
            handshake = BridgeHandshake.from_message(
                _roundtrip(transport, {"op": "hello"}, self._timeout)
            )
            if self._stl_stride > handshake.episode_steps:
                raise ArgumentError(
                    f"stl_stride {self._stl_stride} exceeds the bridged episode length "
                    f"{handshake.episode_steps}"
                )
            if self._expected is not None:
                self._check_expected(handshake)
        except BaseException:
            transport.close()
            raise
        self._transport = transport
        self._handshake = handshake

    def _check_expected(self, handshake: BridgeHandshake):
        expected = dict(self._expected.signal_schema)
        for name, dim in handshake.signals:
            if name not in expected:
                raise SchemaError(f"bridged environment exposes unexpected signal {name!r}")
            if expected.pop(name) != dim:
                raise SchemaError(
                    f"signal {name!r} has dimension {dim}, "
                    f"expected {self._expected.signal_schema[name]}"
                )
        if expected:
            missing = sorted(expected)
            raise SchemaError(f"bridged environment is missing signal {missing[0]!r}")
        if handshake.input_dim != self._expected.input_box.dim:
            raise SchemaError(
                f"bridged input has {handshake.input_dim} dimensions, "
                f"expected {self._expected.input_box.dim}"
            )

    def _ensure(self) -> BridgeHandshake:
        if self._handshake is None:
            self._connect()
        return self._handshake

    # ---- environment surface ----------------------------------------------

    @property
    def task_id(self) -> str:
        return self._ensure().name

    @property
    def input_box(self) -> Box:
        hs = self._ensure()
        return Box((f"x{i}", lo, hi) for i, (lo, hi) in enumerate(hs.bounds))

    @property
    def signal_schema(self) -> dict:
        return dict(self._ensure().signals)

    @property
    def episode_steps(self) -> int:
        return self._ensure().episode_steps

    @property
    def stl_stride(self) -> int:
        return self._stl_stride

    @property
    def sample_period(self):
        """Sample spacing in seconds; None until the first episode reports it."""
        return self._sample_period

    @property
    def handshake(self) -> BridgeHandshake:
        return self._ensure()

    def simulate(self, point, seed: int) -> Trace:
        hs = self._ensure()
        vec = np.asarray(point, dtype=float).reshape(-1)
        if vec.shape[0] != hs.input_dim:
            raise DomainError(
                f"input must have {hs.input_dim} dimensions, got {vec.shape[0]}"
            )
        if not self.input_box.contains(vec, tol=1e-12):
            raise DomainError(f"input {vec.tolist()} lies outside the bridged input box")
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise ArgumentError(f"seed must be an integer, got {seed!r}")
        seed = int(seed)
        if not (0 <= seed < 2**64):
            raise ArgumentError(f"seed must be in [0, 2**64), got {seed}")
        reply = _roundtrip(
            self._transport, {"op": "simulate", "input": vec.tolist(), "seed": seed},
            self._timeout,
        )
        op = reply.get("op")
        if op == "error":
            kind = reply.get("kind", "simulation")
            message = reply.get("message", "unspecified failure")
            if kind == "domain":
                raise DomainError(str(message))
            raise BridgeError(f"bridge reported a {kind} error: {message}")
        if op != "trace":
            raise BridgeError(f"expected a trace reply, got op {op!r}")
        return self._build_trace(reply, hs)

    def _build_trace(self, reply: dict, hs: BridgeHandshake) -> Trace:
        rows = hs.episode_steps + 1
        times = reply.get("time")
        if not isinstance(times, list) or len(times) != rows:
            raise SchemaError(
                f"trace time axis must have {rows} samples, got "
                f"{len(times) if isinstance(times, list) else times!r}"
            )
        payload = reply.get("signals")
        if not isinstance(payload, dict):
            raise SchemaError("trace reply is missing its signals object")
        schema = dict(hs.signals)
        for name in payload:
            if name not in schema:
                raise SchemaError(f"trace carries undeclared signal {name!r}")
        signals = {}
        for name, dim in schema.items():
            columns = payload.get(name)
            if columns is None:
                raise SchemaError(f"trace is missing signal {name!r}")
            arr = np.asarray(columns, dtype=float)
            if arr.ndim != 2 or arr.shape != (rows, dim):
                raise SchemaError(
                    f"signal {name!r} must be a {rows}x{dim} array, got shape "
                    f"{'x'.join(map(str, arr.shape))}"
                )
            signals[name] = arr
        axis = np.asarray(times, dtype=float)
        gaps = np.diff(axis)
        if gaps.size == 0 or gaps[0] <= 0:
            raise SamplingError("trace time axis must be strictly increasing")
        if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12):
            raise SamplingError("trace time axis is not uniformly spaced")
        period = float(gaps[0])
        self._sample_period = period
        return Trace(period, signals)

    # ---- lifecycle ---------------------------------------------------------

    def close(self):
        transport, self._transport, self._handshake = self._transport, None, None
        if transport is not None:
            try:
                transport.send_line(json.dumps({"op": "close"}))
            except BridgeError:
                pass
            transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    # Campaign workers receive environments by pickle; only the address
    # travels, each process dials its own connection on first use.
    def __getstate__(self):
        return {
            "endpoint": self._endpoint,
            "stl_stride": self._stl_stride,
            "timeout": self._timeout,
            "expected": self._expected,
        }

    def __setstate__(self, state):
        self._endpoint = state["endpoint"]
        self._stl_stride = state["stl_stride"]
        self._timeout = state["timeout"]
        self._expected = state["expected"]
        self._transport = None
        self._handshake = None
        self._sample_period = None


def attach(endpoint: str, stl_stride: int = 10, timeout: float = 30.0,
           expected=None) -> BridgedEnvironment:
    """Connect to an external environment and return it ready to simulate.

    `expected` may be a TaskSpec; the handshake is then checked against its
    signal schema and input dimensionality, raising SchemaError on any
    mismatch.
    """
    return BridgedEnvironment(endpoint, stl_stride=stl_stride, timeout=timeout,
                              expected=expected)
