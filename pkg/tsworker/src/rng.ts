/**
 * The shared 64-bit LCG.  Must produce the same stream as every other
 * implementation, bit for bit: state' = (state * 6364136223846793005 +
 * 1442695040888963407) mod 2^64; unit floats take the top 53 bits.
 */

export const MULTIPLIER = 6364136223846793005n;
export const INCREMENT = 1442695040888963407n;
export const MASK64 = (1n << 64n) - 1n;

export function lcgNext(state: bigint): bigint {
  return (state * MULTIPLIER + INCREMENT) & MASK64;
}

export function unitFloat(x: bigint): number {
  return Number(x >> 11n) * 2 ** -53;
}
