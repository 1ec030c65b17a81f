/**
 * Deterministic 64-bit hashing and pseudorandom streams.
 *
 * BigInt arithmetic masked to 64 bits so values match any fixed-width
 * implementation bit for bit regardless of host platform.
 */

const MASK64 = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;

export function fnv1a64(data: Uint8Array): bigint {
  let h = FNV_OFFSET;
  for (const b of data) {
    h ^= BigInt(b);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h;
}

function mix(z: bigint): bigint {
  z ^= z >> 30n;
  z = (z * MIX1) & MASK64;
  z ^= z >> 27n;
  z = (z * MIX2) & MASK64;
  return z ^ (z >> 31n);
}

export class SplitMix64 {
  private state: bigint;

  constructor(seed: bigint) {
    this.state = seed & MASK64;
  }

  nextU64(): bigint {
    this.state = (this.state + GAMMA) & MASK64;
    return mix(this.state);
  }

  nextBelow(bound: bigint): bigint {
    if (bound <= 0n) throw new RangeError("bound must be positive");
    return this.nextU64() % bound;
  }
}
