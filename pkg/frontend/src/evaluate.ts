/**
 * Reconstruction quality over the air: run coded images through the
 * OFDM chain at a given noise level and report PSNR against the 8-bit
 * originals. The codec seam lets tests swap the learned model for an
 * identity packer with a known exact roundtrip.
 */

import {
  ComplexBatch,
  cloneBatch,
  fftBatch,
  hardClip,
  ifftBatch,
  addNoise,
  makeBatch,
  snrToSigmaSquared,
  softClip,
} from "./dsp.js";
import { IMAGE_VALUES } from "./dataset.js";
import { derivedRng } from "./rng.js";

export interface Codec {
  framesPerImage: number;
  encodeToFrames(images: Float32Array, imageCount: number): ComplexBatch;
  decodeFromFrames(frames: ComplexBatch): Float32Array;
}

export type Technique =
  | { kind: "none" }
  | { kind: "clip"; rho: number }
  | { kind: "softclip"; rho: number; gamma: number };

export interface EvalOptions {
  snrDb: number;
  trials: number;
  technique: Technique;
  seed: number;
}

/**
 * Peak-255 PSNR of a reconstruction in [0, 1] floats against uint8
 * pixels. The reconstruction is quantized back to 8-bit before the
 * error is taken, so a lossless chain scores exactly infinite.
 */
export function psnrDb(reference: Uint8Array, recon: Float32Array): number {
  if (reference.length !== recon.length) {
    throw new Error(
      `reference has ${reference.length} values, reconstruction ${recon.length}`,
    );
  }
  let acc = 0;
  for (let i = 0; i < reference.length; i++) {
    const q = Math.round(Math.min(255, Math.max(0, recon[i] * 255)));
    const d = reference[i] - q;
    acc += d * d;
  }
  const mse = acc / reference.length;
  if (mse === 0) return Infinity;
  return 10 * Math.log10((255 * 255) / mse);
}

function applyTechnique(time: ComplexBatch, technique: Technique) {
  switch (technique.kind) {
    case "none":
      return;
    case "clip":
      hardClip(time, technique.rho);
      return;
    case "softclip":
      softClip(time, technique.rho, technique.gamma);
      return;
  }
}

/**
 * One pass through modulator, limiter, noise, demodulator. Mutates
 * nothing; returns the received frequency frames.
 */
export function runChannel(
  frames: ComplexBatch,
  technique: Technique,
  sigmaSquared: number,
  noiseRng: () => number,
): ComplexBatch {
  const time = cloneBatch(frames);
  ifftBatch(time);
  applyTechnique(time, technique);
  if (sigmaSquared > 0) {
    addNoise(time, sigmaSquared, noiseRng);
  }
  fftBatch(time);
  return time;
}

/**
 * Mean PSNR in dB over images and noise draws. Infinite snrDb with no
 * limiter skips the transforms outright, since a unitary roundtrip is
 * exact only in that degenerate case; this keeps the lossless-codec
 * sanity check at true infinity.
 */
export function evaluatePsnr(
  codec: Codec,
  images: Float32Array,
  pixels: Uint8Array,
  imageCount: number,
  opts: EvalOptions,
): number {
  if (opts.trials < 1) {
    throw new Error(`trials must be >= 1, got ${opts.trials}`);
  }
  if (imageCount === 0) {
    throw new Error("cannot evaluate an empty image set");
  }
  const frames = codec.encodeToFrames(images, imageCount);
  const noiseless = !Number.isFinite(opts.snrDb);
  if (noiseless && opts.technique.kind === "none") {
    const recon = codec.decodeFromFrames(frames);
    return meanImagePsnr(pixels, recon, imageCount);
  }
  const sigmaSquared = noiseless ? 0 : snrToSigmaSquared(opts.snrDb);
  let acc = 0;
  let infinite = false;
  for (let t = 0; t < opts.trials; t++) {
    const rng = derivedRng(opts.seed, 90000 + t);
    const received = runChannel(frames, opts.technique, sigmaSquared, rng);
    const recon = codec.decodeFromFrames(received);
    const p = meanImagePsnr(pixels, recon, imageCount);
    if (!Number.isFinite(p)) infinite = true;
    else acc += p;
  }
  if (infinite) return Infinity;
  return acc / opts.trials;
}

function meanImagePsnr(
  pixels: Uint8Array,
  recon: Float32Array,
  imageCount: number,
): number {
  let acc = 0;
  for (let b = 0; b < imageCount; b++) {
    const p = psnrDb(
      pixels.subarray(b * IMAGE_VALUES, (b + 1) * IMAGE_VALUES),
      recon.subarray(b * IMAGE_VALUES, (b + 1) * IMAGE_VALUES),
    );
    if (!Number.isFinite(p)) return Infinity;
    acc += p;
  }
  return acc / imageCount;
}

export interface GridRow {
  snrDb: number;
  psnrDb: number;
}

export function evaluateGrid(
  codec: Codec,
  images: Float32Array,
  pixels: Uint8Array,
  imageCount: number,
  snrGrid: number[],
  trials: number,
  technique: Technique,
  seed: number,
): GridRow[] {
  return snrGrid.map((snrDb) => ({
    snrDb,
    psnrDb: evaluatePsnr(codec, images, pixels, imageCount, {
      snrDb,
      trials,
      technique,
      seed,
    }),
  }));
}

function formatNumber(x: number): string {
  if (x === Infinity) return "inf";
  if (x === -Infinity) return "-inf";
  return String(x);
}

export function gridToCsv(rows: GridRow[]): string {
  const lines = ["snr_db,psnr_db"];
  for (const row of rows) {
    lines.push(`${formatNumber(row.snrDb)},${formatNumber(row.psnrDb)}`);
  }
  return lines.join("\n") + "\n";
}

/**
 * Packs raw pixel values straight into symbols, two per complex slot,
 * with no scaling. Lossless end to end, so PSNR through a clean chain
 * must come back infinite.
 */
export function identityCodec(nSubcarriers: number): Codec {
  const symbolsPerImage = IMAGE_VALUES / 2;
  const framesPerImage = Math.ceil(symbolsPerImage / nSubcarriers);
  return {
    framesPerImage,
    encodeToFrames(images: Float32Array, imageCount: number): ComplexBatch {
      const out = makeBatch(imageCount * framesPerImage, nSubcarriers);
      for (let b = 0; b < imageCount; b++) {
        const dst = b * framesPerImage * nSubcarriers;
        for (let j = 0; j < symbolsPerImage; j++) {
          out.re[dst + j] = images[b * IMAGE_VALUES + 2 * j];
          out.im[dst + j] = images[b * IMAGE_VALUES + 2 * j + 1];
        }
      }
      return out;
    },
    decodeFromFrames(frames: ComplexBatch): Float32Array {
      const imageCount = frames.frameCount / framesPerImage;
      const out = new Float32Array(imageCount * IMAGE_VALUES);
      for (let b = 0; b < imageCount; b++) {
        const src = b * framesPerImage * nSubcarriers;
        for (let j = 0; j < symbolsPerImage; j++) {
          out[b * IMAGE_VALUES + 2 * j] = frames.re[src + j];
          out[b * IMAGE_VALUES + 2 * j + 1] = frames.im[src + j];
        }
      }
      return out;
    },
  };
}
