/**
 * Kernel math, matching the reference implementation output for output.
 * Inner loops are written plainly; this side of the benchmark is meant to
 * measure straightforward code, not hand-tuned code.
 */

import { INCREMENT, MASK64, MULTIPLIER, lcgNext, unitFloat } from "./rng.js";

export function trialShare(nTotal: bigint, worldSize: number, rank: number): bigint {
  const ws = BigInt(worldSize);
  const base = nTotal / ws;
  const extra = nTotal % ws;
  return base + (BigInt(rank) < extra ? 1n : 0n);
}

/** Count unit-circle hits over n trials; x then y per trial. */
export function mcHits(n: bigint, seed: bigint): bigint {
  let state = seed & MASK64;
  let hits = 0n;
  const unit = 2 ** -53;
  for (let i = 0n; i < n; i++) {
    state = (state * MULTIPLIER + INCREMENT) & MASK64;
    const x = Number(state >> 11n) * unit;
    state = (state * MULTIPLIER + INCREMENT) & MASK64;
    const y = Number(state >> 11n) * unit;
    if (x * x + y * y <= 1.0) hits++;
  }
  return hits;
}

export function partitionRange(
  lo: bigint,
  hi: bigint,
  worldSize: number,
  rank: number,
): [bigint, bigint] {
  if (lo > hi) throw new Error(`lo ${lo} > hi ${hi}`);
  if (worldSize < 1 || rank < 0 || rank >= worldSize) {
    throw new Error(`rank ${rank} of ${worldSize}`);
  }
  const chunk = (hi - lo) / BigInt(worldSize);
  const start = lo + BigInt(rank) * chunk;
  const end = rank === worldSize - 1 ? hi : start + chunk;
  return [start, end];
}

export function isPrime(n: number): boolean {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 === 0) return false;
  for (let d = 3; d * d <= n; d += 2) {
    if (n % d === 0) return false;
  }
  return true;
}

const SAFE = 2 ** 53 - 1;

export function primesInRange(start: bigint, end: bigint): bigint[] {
  if (end > BigInt(SAFE)) throw new Error("range exceeds exact double arithmetic");
  const out: bigint[] = [];
  for (let n = Number(start); n < Number(end); n++) {
    if (isPrime(n)) out.push(BigInt(n));
  }
  return out;
}

export { lcgNext, unitFloat };
