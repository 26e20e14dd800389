/**
 * Wire protocol: UTF-8 JSON, one message per line, '\n' terminated.
 *
 * Requests:
 *   {"op": "hello"}
 *   {"op": "simulate", "input": [x0, x1, ...], "seed": N}
 *   {"op": "close"}
 *
 * Replies:
 *   {"op": "hello", "name", "input_dim", "bounds", "signals",
 *    "episode_steps", "protocol_version"}
 *   {"op": "trace", "time": [...], "signals": {name: [[...], ...]}}
 *   {"op": "error", "kind": "domain" | "simulation" | "protocol", "message"}
 *
 * Every request line, well formed or not, gets exactly one reply line;
 * only a close op (or EOF) ends the session.
 */

export const PROTOCOL_VERSION = "1.0.0";

export type ErrorKind = "domain" | "simulation" | "protocol";

export interface SignalSpec {
  name: string;
  dim: number;
}

export interface HelloReply {
  op: "hello";
  name: string;
  input_dim: number;
  bounds: Array<[number, number]>;
  signals: SignalSpec[];
  episode_steps: number;
  protocol_version: string;
}

export interface TraceReply {
  op: "trace";
  time: number[];
  signals: Record<string, number[][]>;
}

export interface ErrorReply {
  op: "error";
  kind: ErrorKind;
  message: string;
}

export type Reply = HelloReply | TraceReply | ErrorReply;

export function errorReply(kind: ErrorKind, message: string): ErrorReply {
  return { op: "error", kind, message };
}

/** A finite JSON number (strict JSON cannot carry NaN or Infinity, but a
 * hand-rolled client might). */
export function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

export function isUnsignedSeed(value: unknown): value is number {
  return (
    typeof value === "number" &&
    Number.isInteger(value) &&
    value >= 0 &&
    value < 2 ** 64
  );
}
