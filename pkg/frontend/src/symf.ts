/**
 * SYMF latent interchange files, the wire format shared with the OFDM
 * simulator. Little-endian throughout:
 *
 *     bytes 0..3    magic "SYMF"
 *     u32           version, currently 1
 *     u32           N, subcarriers per frame
 *     u64           frame count
 *     then frameCount * N records of (f32 real, f32 imag)
 *
 * Values are stored as float32; reading returns the stored values
 * bit-exactly, widened to float64.
 */

import * as fs from "fs";
import { ComplexBatch, makeBatch } from "./dsp.js";
import { writeFileAtomic } from "./fsio.js";

const MAGIC = "SYMF";
const VERSION = 1;
const HEADER_BYTES = 20;

export function encodeSymf(batch: ComplexBatch): Buffer {
  const { re, im, frameCount, n } = batch;
  const buf = Buffer.alloc(HEADER_BYTES + frameCount * n * 8);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(VERSION, 4);
  buf.writeUInt32LE(n, 8);
  buf.writeBigUInt64LE(BigInt(frameCount), 12);
  for (let i = 0; i < frameCount * n; i++) {
    buf.writeFloatLE(Math.fround(re[i]), HEADER_BYTES + i * 8);
    buf.writeFloatLE(Math.fround(im[i]), HEADER_BYTES + i * 8 + 4);
  }
  return buf;
}

export function decodeSymf(buf: Buffer, label = "buffer"): ComplexBatch {
  if (buf.length < HEADER_BYTES) {
    throw new Error(`${label}: truncated header (${buf.length} bytes)`);
  }
  const magic = buf.toString("ascii", 0, 4);
  if (magic !== MAGIC) {
    throw new Error(`${label}: bad magic ${JSON.stringify(magic)}, expected "SYMF"`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== VERSION) {
    throw new Error(`${label}: unsupported version ${version}`);
  }
  const n = buf.readUInt32LE(8);
  if (n === 0) {
    throw new Error(`${label}: N must be positive`);
  }
  const frameCount = Number(buf.readBigUInt64LE(12));
  const expected = HEADER_BYTES + frameCount * n * 8;
  if (buf.length !== expected) {
    throw new Error(
      `${label}: payload is ${buf.length - HEADER_BYTES} bytes, header implies ${expected - HEADER_BYTES}`,
    );
  }
  const batch = makeBatch(frameCount, n);
  for (let i = 0; i < frameCount * n; i++) {
    batch.re[i] = buf.readFloatLE(HEADER_BYTES + i * 8);
    batch.im[i] = buf.readFloatLE(HEADER_BYTES + i * 8 + 4);
  }
  return batch;
}

export function writeSymf(filePath: string, batch: ComplexBatch) {
  writeFileAtomic(filePath, encodeSymf(batch));
}

export function readSymf(filePath: string): ComplexBatch {
  return decodeSymf(fs.readFileSync(filePath), filePath);
}
