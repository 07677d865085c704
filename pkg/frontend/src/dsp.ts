/**
 * Complex frame batches and the OFDM signal chain: unitary FFT/IFFT,
 * peak-to-average power, hard and soft amplitude clipping, AWGN.
 *
 * A batch is a pair of flat Float64Arrays holding frameCount * n values
 * row-major. Both transforms are unitary (1/sqrt(n) each way), so a
 * modulate/demodulate round trip is the identity up to rounding and the
 * symbol power equals the sample power.
 */

import { Rng, gaussian } from "./rng.js";

export interface ComplexBatch {
  re: Float64Array;
  im: Float64Array;
  frameCount: number;
  n: number;
}

export function makeBatch(frameCount: number, n: number): ComplexBatch {
  return {
    re: new Float64Array(frameCount * n),
    im: new Float64Array(frameCount * n),
    frameCount,
    n,
  };
}

export function cloneBatch(batch: ComplexBatch): ComplexBatch {
  return {
    re: batch.re.slice(),
    im: batch.im.slice(),
    frameCount: batch.frameCount,
    n: batch.n,
  };
}

function checkPowerOfTwo(n: number) {
  if (n < 1 || (n & (n - 1)) !== 0) {
    throw new Error(`frame length must be a power of two, got ${n}`);
  }
}

/**
 * In-place radix-2 transform of every frame. sign=+1 is the inverse
 * transform (modulator), sign=-1 the forward one (demodulator); both
 * scale by 1/sqrt(n).
 */
function transform(batch: ComplexBatch, sign: 1 | -1) {
  const { re, im, frameCount, n } = batch;
  checkPowerOfTwo(n);
  const scale = 1 / Math.sqrt(n);
  for (let f = 0; f < frameCount; f++) {
    const base = f * n;
    // bit-reversal permutation
    for (let i = 1, j = 0; i < n; i++) {
      let bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) {
        const tr = re[base + i];
        re[base + i] = re[base + j];
        re[base + j] = tr;
        const ti = im[base + i];
        im[base + i] = im[base + j];
        im[base + j] = ti;
      }
    }
    for (let len = 2; len <= n; len <<= 1) {
      const ang = (sign * 2 * Math.PI) / len;
      const wr = Math.cos(ang);
      const wi = Math.sin(ang);
      for (let start = 0; start < n; start += len) {
        let cr = 1;
        let ci = 0;
        for (let k = 0; k < len / 2; k++) {
          const a = base + start + k;
          const b = a + len / 2;
          const vr = re[b] * cr - im[b] * ci;
          const vi = re[b] * ci + im[b] * cr;
          re[b] = re[a] - vr;
          im[b] = im[a] - vi;
          re[a] += vr;
          im[a] += vi;
          const nr = cr * wr - ci * wi;
          ci = cr * wi + ci * wr;
          cr = nr;
        }
      }
    }
    for (let i = 0; i < n; i++) {
      re[base + i] *= scale;
      im[base + i] *= scale;
    }
  }
}

/** Frequency symbols to time samples, in place. */
export function ifftBatch(batch: ComplexBatch) {
  transform(batch, 1);
}

/** Time samples back to frequency symbols, in place. */
export function fftBatch(batch: ComplexBatch) {
  transform(batch, -1);
}

/** Per-frame peak power over mean power, linear. */
export function paprLinear(batch: ComplexBatch): Float64Array {
  const { re, im, frameCount, n } = batch;
  const out = new Float64Array(frameCount);
  for (let f = 0; f < frameCount; f++) {
    let peak = 0;
    let acc = 0;
    for (let k = 0; k < n; k++) {
      const i = f * n + k;
      const p = re[i] * re[i] + im[i] * im[i];
      acc += p;
      if (p > peak) peak = p;
    }
    out[f] = peak / (acc / n);
  }
  return out;
}

export function paprDb(batch: ComplexBatch): Float64Array {
  return paprLinear(batch).map((v) => 10 * Math.log10(v));
}

export function meanPower(batch: ComplexBatch): number {
  const { re, im } = batch;
  let acc = 0;
  for (let i = 0; i < re.length; i++) acc += re[i] * re[i] + im[i] * im[i];
  return acc / re.length;
}

/**
 * Cap each sample's magnitude at rho times its frame's RMS, keeping the
 * phase. Acts in place.
 */
export function hardClip(batch: ComplexBatch, rho: number) {
  const { re, im, frameCount, n } = batch;
  for (let f = 0; f < frameCount; f++) {
    let acc = 0;
    for (let k = 0; k < n; k++) {
      const i = f * n + k;
      acc += re[i] * re[i] + im[i] * im[i];
    }
    const thresh = rho * Math.sqrt(acc / n);
    for (let k = 0; k < n; k++) {
      const i = f * n + k;
      const r = Math.sqrt(re[i] * re[i] + im[i] * im[i]);
      if (r >= thresh && r > 0) {
        const s = thresh / r;
        re[i] *= s;
        im[i] *= s;
      }
    }
  }
}

/**
 * Differentiable limiter y * (1 - relu(|y| - rho*ybar) / (|y| + gamma)),
 * where ybar is the frame's mean amplitude. Acts in place. The same
 * expression runs inside the training graph; this is the float64
 * reference for it.
 */
export function softClip(batch: ComplexBatch, rho: number, gamma: number) {
  const { re, im, frameCount, n } = batch;
  for (let f = 0; f < frameCount; f++) {
    let acc = 0;
    for (let k = 0; k < n; k++) {
      const i = f * n + k;
      acc += Math.sqrt(re[i] * re[i] + im[i] * im[i]);
    }
    const thresh = rho * (acc / n);
    for (let k = 0; k < n; k++) {
      const i = f * n + k;
      const r = Math.sqrt(re[i] * re[i] + im[i] * im[i]);
      const factor = 1 - Math.max(r - thresh, 0) / (r + gamma);
      re[i] *= factor;
      im[i] *= factor;
    }
  }
}

/**
 * Add circular Gaussian noise of total variance sigmaSquared per complex
 * sample, in place. The variance is taken against the nominal unit
 * signal power, not the measured one.
 */
export function addNoise(batch: ComplexBatch, sigmaSquared: number, rng: Rng) {
  const { re, im } = batch;
  const std = Math.sqrt(sigmaSquared / 2);
  for (let i = 0; i < re.length; i++) {
    re[i] += std * gaussian(rng);
    im[i] += std * gaussian(rng);
  }
}

export function snrToSigmaSquared(snrDb: number): number {
  return Math.pow(10, -snrDb / 10);
}
