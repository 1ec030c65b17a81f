/**
 * Length-prefixed JSON framing over byte streams.
 *
 * Control messages are a big-endian u32 length followed by UTF-8 JSON.
 * Raw frame payloads travel as bare bytes between messages, so the
 * reader exposes exact-count reads rather than line or chunk semantics.
 */

export const MAX_MESSAGE = 1 << 24;

export class ByteReader {
  private buffer: Buffer = Buffer.alloc(0);
  private iterator: AsyncIterator<Buffer>;

  constructor(stream: AsyncIterable<Buffer>) {
    this.iterator = stream[Symbol.asyncIterator]();
  }

  /** Read exactly n bytes; null means EOF arrived first. */
  async readExact(n: number): Promise<Buffer | null> {
    while (this.buffer.length < n) {
      const { value, done } = await this.iterator.next();
      if (done) return null;
      this.buffer = Buffer.concat([this.buffer, value]);
    }
    const out = this.buffer.subarray(0, n);
    this.buffer = this.buffer.subarray(n);
    return out;
  }
}

export function encodeMessage(obj: Record<string, unknown>): Buffer {
  const body = Buffer.from(JSON.stringify(obj), "utf8");
  const head = Buffer.alloc(4);
  head.writeUInt32BE(body.length, 0);
  return Buffer.concat([head, body]);
}

export type Incoming =
  | { kind: "eof" }
  | { kind: "fatal"; reason: string }
  | { kind: "bad"; reason: string }
  | { kind: "msg"; msg: Record<string, unknown> };

/**
 * Read one framed message. "bad" means the frame was intact but its
 * contents were not a typed JSON object, so the caller can reply with
 * an error and keep the stream; "fatal" means framing itself broke.
 */
export async function readMessage(reader: ByteReader): Promise<Incoming> {
  const head = await reader.readExact(4);
  if (head === null) return { kind: "eof" };
  const length = head.readUInt32BE(0);
  if (length > MAX_MESSAGE) {
    return { kind: "fatal", reason: `announced message length ${length} is implausible` };
  }
  const body = await reader.readExact(length);
  if (body === null) return { kind: "fatal", reason: "stream ended inside a message" };
  let parsed: unknown;
  try {
    parsed = JSON.parse(body.toString("utf8"));
  } catch {
    return { kind: "bad", reason: "message is not valid JSON" };
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    return { kind: "bad", reason: "message is not a JSON object" };
  }
  const msg = parsed as Record<string, unknown>;
  if (typeof msg.type !== "string") {
    return { kind: "bad", reason: "message has no type field" };
  }
  return { kind: "msg", msg };
}
