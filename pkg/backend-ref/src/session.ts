/**
 * Protocol session: handshake, request loop, shutdown.
 *
 * Error policy per the protocol: a malformed or unknown message gets an
 * error reply and the session continues; a hello with the wrong version
 * gets an error reply and the session ends nonzero; broken framing ends
 * the session nonzero because no further message boundary exists.
 */

import { blendFrames, noiseTextFrames } from "./blend.js";
import { ByteReader, encodeMessage, readMessage } from "./framing.js";

export const PROTOCOL_VERSION = 1;

export type Mode = "blend" | "noise-text";

export interface SessionOptions {
  mode: Mode;
}

type WriteFn = (data: Buffer) => Promise<void>;

interface GenerateFields {
  width: number;
  height: number;
  planes: number;
  count: number;
  motionText: string;
  weights: number[];
}

function asCount(value: unknown, lo: number, hi: number): number | null {
  if (typeof value !== "number" || !Number.isInteger(value)) return null;
  if (value < lo || value > hi) return null;
  return value;
}

function parseGenerate(msg: Record<string, unknown>): GenerateFields | string {
  const width = asCount(msg.width, 1, 65535);
  const height = asCount(msg.height, 1, 65535);
  const planes = asCount(msg.planes, 1, 3);
  const count = asCount(msg.count, 1, 65535);
  if (width === null || height === null || count === null) {
    return "generate fields width/height/count must be positive integers";
  }
  if (planes !== 1 && planes !== 3) {
    return "planes must be 1 or 3";
  }
  if (typeof msg.motion_text !== "string") {
    return "motion_text must be a string";
  }
  const wi = msg.weights_i;
  const wl = msg.weights_l;
  for (const [name, arr] of [["weights_i", wi], ["weights_l", wl]] as const) {
    if (!Array.isArray(arr) || arr.length !== count) {
      return `${name} must be an array of ${count} numbers`;
    }
    for (const w of arr) {
      if (typeof w !== "number" || !(w >= 0 && w <= 1)) {
        return `${name} entries must lie in [0, 1]`;
      }
    }
  }
  return {
    width, height, planes, count,
    motionText: msg.motion_text,
    weights: wi as number[],
  };
}

export async function serve(
  reader: ByteReader,
  write: WriteFn,
  options: SessionOptions,
): Promise<number> {
  const sendError = (message: string) =>
    write(encodeMessage({ type: "error", message }));

  let greeted = false;
  let requests = 0;
  for (;;) {
    const incoming = await readMessage(reader);
    if (incoming.kind === "eof") return 0;
    if (incoming.kind === "fatal") {
      await sendError(incoming.reason);
      return 1;
    }
    if (incoming.kind === "bad") {
      await sendError(incoming.reason);
      continue;
    }
    const msg = incoming.msg;
    if (msg.type === "bye") return 0;

    if (!greeted) {
      if (msg.type !== "hello") {
        await sendError(`expected hello, got ${msg.type}`);
        continue;
      }
      if (msg.version !== PROTOCOL_VERSION) {
        await sendError(`unsupported protocol version ${msg.version}`);
        return 1;
      }
      greeted = true;
      await write(encodeMessage({ type: "hello", version: PROTOCOL_VERSION }));
      continue;
    }

    if (msg.type === "hello") {
      await sendError("hello repeated after the handshake");
      continue;
    }
    if (msg.type !== "generate") {
      await sendError(`unknown message type ${msg.type}`);
      continue;
    }

    requests += 1;
    const fields = parseGenerate(msg);
    const geometryKnown =
      typeof fields !== "string" ||
      (asCount(msg.width, 1, 65535) !== null &&
        asCount(msg.height, 1, 65535) !== null &&
        (msg.planes === 1 || msg.planes === 3));
    if (typeof fields === "string") {
      // Keyframe payloads follow every generate; drain them when the
      // geometry is trustworthy so the stream stays framed.
      if (geometryKnown) {
        const size =
          (msg.width as number) * (msg.height as number) * (msg.planes as number);
        if ((await reader.readExact(2 * size)) === null) {
          await sendError(`request ${requests}: stream ended inside keyframe payloads`);
          return 1;
        }
      }
      await sendError(`request ${requests}: ${fields}`);
      if (geometryKnown) continue;
      return 1;
    }

    const size = fields.width * fields.height * fields.planes;
    const left = await reader.readExact(size);
    const right = left === null ? null : await reader.readExact(size);
    if (left === null || right === null) {
      await sendError(`request ${requests}: stream ended inside keyframe payloads`);
      return 1;
    }

    const frames: Uint8Array[] = [];
    for (let k = 0; k < fields.count; k++) {
      const w = fields.weights[k];
      frames.push(
        options.mode === "blend"
          ? blendFrames(left, right, w)
          : noiseTextFrames(left, right, w, fields.motionText, k),
      );
    }
    await write(encodeMessage({ type: "frames", count: fields.count }));
    for (const frame of frames) {
      await write(Buffer.from(frame.buffer, frame.byteOffset, frame.byteLength));
    }
  }
}
