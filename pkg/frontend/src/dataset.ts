/**
 * Procedural 32x32 RGB corpus. Images are smooth composites of low
 * frequency gratings, soft blobs and a base gradient, quantized to 8-bit
 * like a real photo corpus. Everything derives from the seed, so a
 * dataset identifier plus seed pins the exact pixels on any machine.
 */

import { Rng, derivedRng } from "./rng.js";

export const IMAGE_SIZE = 32;
export const IMAGE_CHANNELS = 3;
export const IMAGE_VALUES = IMAGE_SIZE * IMAGE_SIZE * IMAGE_CHANNELS;

export const DATASET_IDS = ["blobs32"] as const;
export type DatasetId = (typeof DATASET_IDS)[number];

export interface Dataset {
  id: DatasetId;
  /** 8-bit pixels, imageCount * 32*32*3, HWC row-major. */
  pixels: Uint8Array;
  imageCount: number;
}

function renderImage(rng: Rng, out: Uint8Array, offset: number) {
  const s = IMAGE_SIZE;
  const luma = new Float64Array(s * s);

  // base gradient
  const gx = (rng() - 0.5) * 1.2;
  const gy = (rng() - 0.5) * 1.2;
  const bias = 0.35 + 0.3 * rng();
  for (let y = 0; y < s; y++) {
    for (let x = 0; x < s; x++) {
      luma[y * s + x] = bias + gx * ((x - s / 2) / s) + gy * ((y - s / 2) / s);
    }
  }

  // a few low-frequency gratings
  const gratings = 2 + Math.floor(rng() * 3);
  for (let g = 0; g < gratings; g++) {
    const fx = ((rng() * 4 + 0.5) * 2 * Math.PI) / s;
    const fy = ((rng() * 4 + 0.5) * 2 * Math.PI) / s;
    const phase = rng() * 2 * Math.PI;
    const amp = 0.05 + 0.12 * rng();
    for (let y = 0; y < s; y++) {
      for (let x = 0; x < s; x++) {
        luma[y * s + x] += amp * Math.cos(fx * x + fy * y + phase);
      }
    }
  }

  // soft blobs
  const blobs = 1 + Math.floor(rng() * 3);
  for (let b = 0; b < blobs; b++) {
    const cx = rng() * s;
    const cy = rng() * s;
    const radius = 3 + rng() * 7;
    const amp = (rng() - 0.35) * 0.8;
    const inv = 1 / (2 * radius * radius);
    for (let y = 0; y < s; y++) {
      for (let x = 0; x < s; x++) {
        const d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        luma[y * s + x] += amp * Math.exp(-d2 * inv);
      }
    }
  }

  // per-channel tint around the shared luma
  const tint = [0.9 + 0.2 * rng(), 0.9 + 0.2 * rng(), 0.9 + 0.2 * rng()];
  const shift = [0.05 * (rng() - 0.5), 0.05 * (rng() - 0.5), 0.05 * (rng() - 0.5)];
  for (let p = 0; p < s * s; p++) {
    for (let c = 0; c < IMAGE_CHANNELS; c++) {
      const v = luma[p] * tint[c] + shift[c];
      const q = Math.round(Math.min(1, Math.max(0, v)) * 255);
      out[offset + p * IMAGE_CHANNELS + c] = q;
    }
  }
}

export function makeDataset(id: DatasetId, imageCount: number, seed: number): Dataset {
  if (!DATASET_IDS.includes(id)) {
    throw new Error(`unknown dataset ${JSON.stringify(id)}, expected one of ${DATASET_IDS}`);
  }
  if (imageCount < 0) {
    throw new Error(`imageCount must be >= 0, got ${imageCount}`);
  }
  const pixels = new Uint8Array(imageCount * IMAGE_VALUES);
  for (let i = 0; i < imageCount; i++) {
    // one stream per image: image i is the same whatever the corpus size
    renderImage(derivedRng(seed, 1000 + i), pixels, i * IMAGE_VALUES);
  }
  return { id, pixels, imageCount };
}

/** Pixels of one image scaled to [0, 1] floats. */
export function imageFloats(data: Dataset, index: number): Float32Array {
  if (index < 0 || index >= data.imageCount) {
    throw new Error(`image ${index} out of range, corpus holds ${data.imageCount}`);
  }
  const out = new Float32Array(IMAGE_VALUES);
  const base = index * IMAGE_VALUES;
  for (let i = 0; i < IMAGE_VALUES; i++) out[i] = data.pixels[base + i] / 255;
  return out;
}

/** All images as one [imageCount, 32*32*3] float block in [0, 1]. */
export function datasetFloats(data: Dataset): Float32Array {
  const out = new Float32Array(data.pixels.length);
  for (let i = 0; i < out.length; i++) out[i] = data.pixels[i] / 255;
  return out;
}
