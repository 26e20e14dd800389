/**
 * Environment surface the bridge can host.
 *
 * A Gym-style episode: reset with an initial-configuration vector and a
 * seed, then step episodeSteps times. Every reset and step reports all
 * declared signals, so a full episode yields episodeSteps + 1 rows. The
 * environment owns its controller; the engine only chooses the initial
 * configuration.
 */

import type { SignalSpec } from "./protocol.js";

export interface GymEnvironment {
  readonly name: string;
  /** Input box, one [lo, hi] pair per input dimension. */
  readonly bounds: Array<[number, number]>;
  readonly signals: SignalSpec[];
  readonly episodeSteps: number;
  /** Seconds between consecutive samples. */
  readonly samplePeriod: number;
  /** Start a new episode; returns the signal values at step 0. */
  reset(input: number[], seed: number): Record<string, number[]>;
  /** Advance one control step; returns the signal values after it. */
  step(): Record<string, number[]>;
}

export type EnvFactory = () => GymEnvironment;

export const DT = 1 / 60;
export const EPISODE_STEPS = 300;

/**
 * Deterministic reference double integrator.
 *
 * A point mass starts at the origin at rest and is driven toward the
 * input target with acceleration 4 (target - pos) - 3 vel, integrated
 * semi-implicitly at 60 Hz. The seed is ignored: the engine's native
 * reference environment computes the identical closed-form trajectory,
 * which is what makes cross-implementation equivalence checkable.
 */
export class ReferenceEnv implements GymEnvironment {
  readonly name = "REF";
  readonly bounds: Array<[number, number]> = [
    [-1, 1],
    [-1, 1],
  ];
  readonly signals: SignalSpec[] = [
    { name: "pos", dim: 2 },
    { name: "target", dim: 2 },
  ];
  readonly episodeSteps = EPISODE_STEPS;
  readonly samplePeriod = DT;

  private px = 0;
  private py = 0;
  private vx = 0;
  private vy = 0;
  private tx = 0;
  private ty = 0;

  reset(input: number[], _seed: number): Record<string, number[]> {
    this.tx = input[0] ?? 0;
    this.ty = input[1] ?? 0;
    this.px = this.py = this.vx = this.vy = 0;
    return this.observe();
  }

  step(): Record<string, number[]> {
    // Operation order matters: it must match the native implementation
    // bit for bit, not just to a tolerance.
    const ax = 4 * (this.tx - this.px) - 3 * this.vx;
    const ay = 4 * (this.ty - this.py) - 3 * this.vy;
    this.vx = this.vx + ax * DT;
    this.vy = this.vy + ay * DT;
    this.px = this.px + this.vx * DT;
    this.py = this.py + this.vy * DT;
    return this.observe();
  }

  private observe(): Record<string, number[]> {
    return { pos: [this.px, this.py], target: [this.tx, this.ty] };
  }
}
