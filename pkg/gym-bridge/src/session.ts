/**
 * Per-connection request handling, independent of any transport.
 *
 * handleLine maps one request line to its reply lines. It never throws:
 * malformed JSON, wrong shapes, and unknown ops all come back as protocol
 * errors; inputs outside the declared bounds as domain errors; episode
 * exceptions as simulation errors carrying the stack. A null return means
 * the peer sent a close op and the session is over.
 */

import type { GymEnvironment } from "./env.js";
import {
  errorReply,
  isFiniteNumber,
  isUnsignedSeed,
  PROTOCOL_VERSION,
  type HelloReply,
  type Reply,
} from "./protocol.js";

export class Session {
  constructor(private readonly env: GymEnvironment) {}

  handleLine(line: string): string[] | null {
    const replies = this.respond(line);
    return replies === null ? null : replies.map((reply) => JSON.stringify(reply));
  }

  private respond(line: string): Reply[] | null {
    const trimmed = line.trim();
    if (trimmed === "") {
      return [errorReply("protocol", "empty request line")];
    }
    let message: unknown;
    try {
      message = JSON.parse(trimmed);
    } catch {
      return [errorReply("protocol", "request is not valid JSON")];
    }
    if (typeof message !== "object" || message === null || Array.isArray(message)) {
      return [errorReply("protocol", "request must be a JSON object")];
    }
    const op = (message as Record<string, unknown>)["op"];
    switch (op) {
      case "hello":
        return [this.hello()];
      case "simulate":
        return [this.simulate(message as Record<string, unknown>)];
      case "close":
        return null;
      default:
        return [errorReply("protocol", `unknown op ${JSON.stringify(op ?? null)}`)];
    }
  }

  private hello(): HelloReply {
    return {
      op: "hello",
      name: this.env.name,
      input_dim: this.env.bounds.length,
      bounds: this.env.bounds.map(([lo, hi]) => [lo, hi]),
      signals: this.env.signals.map(({ name, dim }) => ({ name, dim })),
      episode_steps: this.env.episodeSteps,
      protocol_version: PROTOCOL_VERSION,
    };
  }

  private simulate(message: Record<string, unknown>): Reply {
    const input = message["input"];
    if (!Array.isArray(input) || !input.every(isFiniteNumber)) {
      return errorReply("protocol", "input must be an array of numbers");
    }
    const seed = message["seed"];
    if (!isUnsignedSeed(seed)) {
      return errorReply("protocol", "seed must be an unsigned 64-bit integer");
    }
    const dim = this.env.bounds.length;
    if (input.length !== dim) {
      return errorReply(
        "domain",
        `input must have ${dim} dimensions, got ${input.length}`,
      );
    }
    for (let i = 0; i < dim; i++) {
      const [lo, hi] = this.env.bounds[i]!;
      const value = input[i]!;
      if (value < lo || value > hi) {
        return errorReply(
          "domain",
          `input[${i}] = ${value} is outside the declared bounds [${lo}, ${hi}]`,
        );
      }
    }
    try {
      return this.rollEpisode(input, seed);
    } catch (err) {
      const detail = err instanceof Error ? err.stack ?? err.message : String(err);
      return errorReply("simulation", detail);
    }
  }

  private rollEpisode(input: number[], seed: number): Reply {
    const rows = this.env.episodeSteps + 1;
    const time = new Array<number>(rows);
    const columns: Record<string, number[][]> = {};
    for (const { name } of this.env.signals) {
      columns[name] = new Array<number[]>(rows);
    }
    let sample = this.env.reset(input, seed);
    this.record(columns, time, 0, sample);
    for (let k = 1; k < rows; k++) {
      sample = this.env.step();
      this.record(columns, time, k, sample);
    }
    return { op: "trace", time, signals: columns };
  }

  private record(
    columns: Record<string, number[][]>,
    time: number[],
    k: number,
    sample: Record<string, number[]>,
  ): void {
    time[k] = k * this.env.samplePeriod;
    for (const { name, dim } of this.env.signals) {
      const value = sample[name];
      if (!Array.isArray(value) || value.length !== dim || !value.every(isFiniteNumber)) {
        throw new Error(
          `environment reported signal '${name}' with the wrong shape at step ${k}`,
        );
      }
      columns[name]![k] = Array.from(value);
    }
  }
}
