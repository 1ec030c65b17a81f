/**
 * Frame synthesis for the two server modes.
 *
 * Blend mode must be byte-identical to the primary implementation's
 * in-process linear backend: per sample, IEEE double arithmetic
 * w*left + (1-w)*right, round half up, clamp to [0, 255]. The operand
 * order matters and is fixed here.
 */

import { SplitMix64, fnv1a64 } from "./rng.js";

export function blendFrames(left: Uint8Array, right: Uint8Array, w: number): Uint8Array {
  const out = new Uint8Array(left.length);
  for (let i = 0; i < left.length; i++) {
    const v = Math.floor(w * left[i] + (1 - w) * right[i] + 0.5);
    out[i] = v < 0 ? 0 : v > 255 ? 255 : v;
  }
  return out;
}

/**
 * Blend plus a text-seeded perturbation of at most one sample level,
 * demonstrating that the output depends on the motion text. The seed
 * mixes the text hash with the frame's position so every frame of a
 * clip perturbs differently but deterministically.
 */
export function noiseTextFrames(
  left: Uint8Array,
  right: Uint8Array,
  w: number,
  motionText: string,
  frameIndex: number,
): Uint8Array {
  const out = blendFrames(left, right, w);
  const seed = fnv1a64(new TextEncoder().encode(motionText)) ^ BigInt(frameIndex + 1);
  const stream = new SplitMix64(seed);
  for (let i = 0; i < out.length; i++) {
    const delta = Number(stream.nextBelow(3n)) - 1;
    const v = out[i] + delta;
    out[i] = v < 0 ? 0 : v > 255 ? 255 : v;
  }
  return out;
}
