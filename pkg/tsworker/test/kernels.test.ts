import { describe, expect, it } from "vitest";
import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { isPrime, mcHits, partitionRange, trialShare } from "../src/kernels.js";
import { lcgNext, unitFloat } from "../src/rng.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const VECTORS = path.resolve(HERE, "../../tests/vectors/kernel_vectors.csv");

function loadVectors(): [string, string, string][] {
  const lines = fs.readFileSync(VECTORS, "utf-8").trim().split("\n").slice(1);
  return lines.map((line) => line.split(",") as [string, string, string]);
}

describe("shared kernel vectors", () => {
  const vectors = loadVectors();

  it("has the full ten-thousand-case corpus", () => {
    expect(vectors.length).toBe(10000);
  });

  it("matches every lcg_next case", () => {
    for (const [fn, arg, expected] of vectors) {
      if (fn !== "lcg_next") continue;
      expect(lcgNext(BigInt(arg)).toString()).toBe(expected);
    }
  });

  it("matches every unit_float case bit for bit", () => {
    const buf = Buffer.alloc(8);
    for (const [fn, arg, expected] of vectors) {
      if (fn !== "unit_float") continue;
      buf.writeDoubleBE(unitFloat(BigInt(arg)), 0);
      expect(buf.toString("hex")).toBe(expected);
    }
  });

  it("matches every is_prime case", () => {
    for (const [fn, arg, expected] of vectors) {
      if (fn !== "is_prime") continue;
      expect(isPrime(Number(arg)) ? "1" : "0").toBe(expected);
    }
  });

  it("matches every partition_range case", () => {
    for (const [fn, arg, expected] of vectors) {
      if (fn !== "partition_range") continue;
      const [lo, hi, world, rank] = arg.split(":");
      const [start, end] = partitionRange(
        BigInt(lo), BigInt(hi), Number(world), Number(rank),
      );
      expect(`${start}:${end}`).toBe(expected);
    }
  });
});

describe("kernel behavior", () => {
  it("mcHits matches the frozen reference values", () => {
    expect(mcHits(0n, 42n)).toBe(0n);
    expect(mcHits(1000n, 42n)).toBe(793n); // frozen from tests/reference_lcg.py
  });

  it("trial shares cover the total", () => {
    const total = 10_000_001n;
    let sum = 0n;
    for (let r = 0; r < 7; r++) sum += trialShare(total, 7, r);
    expect(sum).toBe(total);
  });

  it("primes under 30", () => {
    const primes = [];
    for (let n = 0; n < 30; n++) if (isPrime(n)) primes.push(n);
    expect(primes).toEqual([2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
  });
});
