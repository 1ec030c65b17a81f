/**
 * Entry point: speak the generation protocol on stdin/stdout.
 *
 * Usage: node dist/server.js [--mode blend|noise-text]
 *
 * Real model backends (diffusion samplers, adapter-conditioned
 * generators) plug in by replacing the frame synthesis in blend.ts;
 * everything protocol-side stays as is.
 */

import { ByteReader } from "./framing.js";
import { serve, type Mode } from "./session.js";

function parseArgs(argv: string[]): Mode {
  let mode: Mode = "blend";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--mode") {
      const value = argv[++i];
      if (value !== "blend" && value !== "noise-text") {
        process.stderr.write(`unknown mode ${value}\n`);
        process.exit(2);
      }
      mode = value;
    } else {
      process.stderr.write(`usage: server.js [--mode blend|noise-text]\n`);
      process.exit(2);
    }
  }
  return mode;
}

function writeTo(stream: NodeJS.WritableStream) {
  return (data: Buffer) =>
    new Promise<void>((resolve, reject) => {
      stream.write(data, (err) => (err ? reject(err) : resolve()));
    });
}

const mode = parseArgs(process.argv.slice(2));
const reader = new ByteReader(process.stdin as AsyncIterable<Buffer>);
serve(reader, writeTo(process.stdout), { mode })
  .then((code) => process.exit(code))
  .catch((err) => {
    process.stderr.write(`fatal: ${err}\n`);
    process.exit(1);
  });
