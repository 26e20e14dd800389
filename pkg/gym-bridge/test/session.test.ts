import { describe, expect, it } from "vitest";
import { DT, EPISODE_STEPS, ReferenceEnv, type GymEnvironment } from "../src/env.js";
import type { ErrorReply, HelloReply, TraceReply } from "../src/protocol.js";
import { Session } from "../src/session.js";

function fresh(): Session {
  return new Session(new ReferenceEnv());
}

function one(session: Session, line: string): Record<string, unknown> {
  const replies = session.handleLine(line);
  expect(replies).not.toBeNull();
  expect(replies!.length).toBe(1);
  return JSON.parse(replies![0]!);
}

function simulate(session: Session, input: number[], seed = 0): TraceReply {
  const reply = one(session, JSON.stringify({ op: "simulate", input, seed }));
  expect(reply.op).toBe("trace");
  return reply as unknown as TraceReply;
}

/** The closed-form trajectory, recomputed independently of the env class. */
function referenceTrajectory(tx: number, ty: number): number[][] {
  const rows: number[][] = [[0, 0]];
  let px = 0, py = 0, vx = 0, vy = 0;
  for (let k = 0; k < EPISODE_STEPS; k++) {
    const ax = 4 * (tx - px) - 3 * vx;
    const ay = 4 * (ty - py) - 3 * vy;
    vx += ax * DT;
    vy += ay * DT;
    px += vx * DT;
    py += vy * DT;
    rows.push([px, py]);
  }
  return rows;
}

describe("hello", () => {
  it("reports the declared schema", () => {
    const hello = one(fresh(), '{"op": "hello"}') as unknown as HelloReply;
    expect(hello.op).toBe("hello");
    expect(hello.name).toBe("REF");
    expect(hello.input_dim).toBe(2);
    expect(hello.bounds).toEqual([[-1, 1], [-1, 1]]);
    expect(hello.signals).toEqual([
      { name: "pos", dim: 2 },
      { name: "target", dim: 2 },
    ]);
    expect(hello.episode_steps).toBe(300);
    expect(hello.protocol_version).toBe("1.0.0");
  });

  it("answers repeated hellos", () => {
    const session = fresh();
    expect(one(session, '{"op": "hello"}').op).toBe("hello");
    expect(one(session, '{"op": "hello"}').op).toBe("hello");
  });
});

describe("simulate", () => {
  it("rolls a full episode with one row per step plus the reset", () => {
    const trace = simulate(fresh(), [0.5, 0.25], 7);
    expect(trace.time.length).toBe(301);
    expect(trace.time[0]).toBe(0);
    expect(trace.time[1]).toBeCloseTo(DT, 12);
    expect(Object.keys(trace.signals).sort()).toEqual(["pos", "target"]);
    expect(trace.signals["pos"]!.length).toBe(301);
    expect(trace.signals["target"]!.length).toBe(301);
    expect(trace.signals["pos"]![0]).toEqual([0, 0]);
    expect(trace.signals["target"]![17]).toEqual([0.5, 0.25]);
  });

  it("matches the closed form exactly", () => {
    const trace = simulate(fresh(), [0.3, -0.8], 1);
    const expected = referenceTrajectory(0.3, -0.8);
    for (let k = 0; k < expected.length; k++) {
      expect(trace.signals["pos"]![k]).toEqual(expected[k]);
    }
  });

  it("ignores the seed", () => {
    const a = simulate(fresh(), [0.4, 0.4], 0);
    const b = simulate(fresh(), [0.4, 0.4], 123456789);
    expect(a.signals["pos"]).toEqual(b.signals["pos"]);
  });

  it("rejects inputs outside the bounds with a domain error", () => {
    const reply = one(
      fresh(), '{"op": "simulate", "input": [1.5, 0.0], "seed": 0}',
    ) as unknown as ErrorReply;
    expect(reply.op).toBe("error");
    expect(reply.kind).toBe("domain");
    expect(reply.message).toContain("outside");
  });

  it("rejects wrong dimension counts with a domain error", () => {
    const reply = one(
      fresh(), '{"op": "simulate", "input": [0.1], "seed": 0}',
    ) as unknown as ErrorReply;
    expect(reply.kind).toBe("domain");
    expect(reply.message).toContain("2 dimensions");
  });

  it.each([
    ['{"op": "simulate", "seed": 0}', "input"],
    ['{"op": "simulate", "input": "wide", "seed": 0}', "input"],
    ['{"op": "simulate", "input": [0.1, true], "seed": 0}', "input"],
    ['{"op": "simulate", "input": [0.1, 0.2]}', "seed"],
    ['{"op": "simulate", "input": [0.1, 0.2], "seed": "zero"}', "seed"],
    ['{"op": "simulate", "input": [0.1, 0.2], "seed": -1}', "seed"],
    ['{"op": "simulate", "input": [0.1, 0.2], "seed": 0.5}', "seed"],
    ['{"op": "simulate", "input": [0.1, 0.2], "seed": 18446744073709551616}', "seed"],
  ])("rejects malformed payload %s as a protocol error", (line, field) => {
    const reply = one(fresh(), line) as unknown as ErrorReply;
    expect(reply.op).toBe("error");
    expect(reply.kind).toBe("protocol");
    expect(reply.message).toContain(field);
  });

  it("reports an episode exception as a simulation error with the stack", () => {
    const broken: GymEnvironment = {
      name: "BROKEN",
      bounds: [[-1, 1]],
      signals: [{ name: "pos", dim: 1 }],
      episodeSteps: 10,
      samplePeriod: DT,
      reset: () => ({ pos: [0] }),
      step: () => {
        throw new Error("actuator melted");
      },
    };
    const session = new Session(broken);
    const reply = one(
      session, '{"op": "simulate", "input": [0.0], "seed": 0}',
    ) as unknown as ErrorReply;
    expect(reply.kind).toBe("simulation");
    expect(reply.message).toContain("actuator melted");
    expect(reply.message).toContain("at "); // stack frames travel along
  });

  it("reports a wrong-shaped observation as a simulation error", () => {
    const lying: GymEnvironment = {
      name: "LIAR",
      bounds: [[-1, 1]],
      signals: [{ name: "pos", dim: 3 }],
      episodeSteps: 5,
      samplePeriod: DT,
      reset: () => ({ pos: [0, 0] }),
      step: () => ({ pos: [0, 0] }),
    };
    const reply = one(
      new Session(lying), '{"op": "simulate", "input": [0.0], "seed": 0}',
    ) as unknown as ErrorReply;
    expect(reply.kind).toBe("simulation");
    expect(reply.message).toContain("pos");
  });
});

describe("session lifecycle", () => {
  it("close ends the session", () => {
    expect(fresh().handleLine('{"op": "close"}')).toBeNull();
  });

  it("stays usable after every kind of error reply", () => {
    const session = fresh();
    one(session, "garbage");
    one(session, '{"op": "simulate", "input": [9, 9], "seed": 0}');
    one(session, '{"op": "warp"}');
    const trace = simulate(session, [0.2, 0.2]);
    expect(trace.time.length).toBe(301);
  });
});

describe("protocol totality", () => {
  it.each([
    "",
    "   ",
    "not json",
    "{",
    "[1, 2, 3]",
    '"just a string"',
    "42",
    "null",
    "true",
    '{"no_op": 1}',
    '{"op": null}',
    '{"op": 7}',
    '{"op": "warp"}',
  ])("answers %j with one protocol error", (line) => {
    const reply = one(fresh(), line) as unknown as ErrorReply;
    expect(reply.op).toBe("error");
    expect(reply.kind).toBe("protocol");
  });

  it("survives 1000 fuzzed lines with exactly one error reply each", () => {
    const session = fresh();
    // xorshift so the corpus is fixed without pulling in an RNG package
    let state = 0x9e3779b9;
    const next = () => {
      state ^= state << 13;
      state ^= state >>> 17;
      state ^= state << 5;
      return (state >>> 0) / 0x100000000;
    };
    const alphabet = "{}[]\",:0123456789abcdefXYZ \\\té☃";
    for (let i = 0; i < 1000; i++) {
      const length = Math.floor(next() * 40);
      let line = "";
      for (let j = 0; j < length; j++) {
        line += alphabet[Math.floor(next() * alphabet.length)];
      }
      const replies = session.handleLine(line);
      expect(replies).not.toBeNull();
      expect(replies!.length).toBe(1);
      const reply = JSON.parse(replies![0]!);
      expect(reply.op).toBe("error");
    }
    // and the session still simulates afterwards
    expect(simulate(session, [0.1, -0.1]).time.length).toBe(301);
  });
});
