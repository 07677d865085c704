/**
 * Convolutional autoencoder whose bottleneck rides OFDM frames.
 *
 * The encoder maps a 32x32x3 image to complex channel symbols, power
 * normalized per batch so the mean symbol power is one. Symbols are
 * modulated onto frames of nSubcarriers by a unitary inverse transform
 * built as a fixed matrix multiply, which keeps the whole chain inside
 * the training graph: the peak-power penalty and the optional soft
 * limiter both see the time-domain samples and backpropagate into the
 * encoder weights.
 *
 * Convolutions are built from padding, slicing and one matrix multiply
 * per layer rather than the conv ops. The stock CPU backend computes
 * the filter gradient of a real conv op with a naive scalar loop that
 * is two orders of magnitude slower than its matmul; routing the math
 * through matmul keeps the backward pass usable without a native
 * backend.
 */

import * as tf from "@tensorflow/tfjs";
import {
  DatasetId,
  IMAGE_CHANNELS,
  IMAGE_SIZE,
  IMAGE_VALUES,
} from "./dataset.js";
import { makeConvOp } from "./convops.js";
import { ComplexBatch, makeBatch } from "./dsp.js";
import { derivedRng } from "./rng.js";

const FEATURE_SIZE = IMAGE_SIZE / 4; // two stride-2 stages
const KERNEL = 3;

export interface SoftClipSpec {
  rho: number;
  gamma: number;
}

export interface TrainerSpec {
  dataset: DatasetId;
  /** Complex channel symbols per source value, k/n. */
  bandwidthRatio: number;
  nSubcarriers: number;
  lambda: number;
  softClip: SoftClipSpec | null;
  snrTrainRange: [number, number];
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  trainImages: number;
  heldoutImages: number;
}

export const DEFAULT_SPEC: TrainerSpec = {
  dataset: "blobs32",
  bandwidthRatio: 1 / 6,
  nSubcarriers: 64,
  lambda: 0,
  softClip: null,
  snrTrainRange: [0, 20],
  epochs: 30,
  batchSize: 32,
  learningRate: 2e-3,
  seed: 1,
  trainImages: 128,
  heldoutImages: 32,
};

export function validateSpec(spec: TrainerSpec) {
  if (!(spec.bandwidthRatio > 0)) {
    throw new Error(`bandwidthRatio must be > 0, got ${spec.bandwidthRatio}`);
  }
  const n = spec.nSubcarriers;
  if (n < 2 || (n & (n - 1)) !== 0) {
    throw new Error(`nSubcarriers must be a power of two >= 2, got ${n}`);
  }
  const [lo, hi] = spec.snrTrainRange;
  if (!(lo <= hi)) {
    throw new Error(`snrTrainRange must be ordered, got [${lo}, ${hi}]`);
  }
  if (spec.lambda < 0) {
    throw new Error(`lambda must be >= 0, got ${spec.lambda}`);
  }
  if (spec.softClip && !(spec.softClip.rho > 0)) {
    throw new Error(`softClip.rho must be > 0, got ${spec.softClip.rho}`);
  }
  if (spec.softClip && !(spec.softClip.gamma > 0)) {
    throw new Error(`softClip.gamma must be > 0, got ${spec.softClip.gamma}`);
  }
  if (!Number.isInteger(spec.epochs) || spec.epochs < 0) {
    throw new Error(`epochs must be a non-negative integer, got ${spec.epochs}`);
  }
  if (!Number.isInteger(spec.batchSize) || spec.batchSize < 1) {
    throw new Error(`batchSize must be a positive integer, got ${spec.batchSize}`);
  }
  if (!(spec.learningRate > 0)) {
    throw new Error(`learningRate must be > 0, got ${spec.learningRate}`);
  }
  if (!Number.isInteger(spec.trainImages) || spec.trainImages < 1) {
    throw new Error(`trainImages must be a positive integer, got ${spec.trainImages}`);
  }
  if (!Number.isInteger(spec.heldoutImages) || spec.heldoutImages < 1) {
    throw new Error(`heldoutImages must be a positive integer, got ${spec.heldoutImages}`);
  }
}

/** Bottleneck channel count realizing the requested bandwidth ratio. */
export function latentChannelsFor(bandwidthRatio: number): number {
  const channels = Math.round(
    (2 * bandwidthRatio * IMAGE_VALUES) / (FEATURE_SIZE * FEATURE_SIZE),
  );
  if (channels < 1) {
    throw new Error(`bandwidthRatio ${bandwidthRatio} leaves no latent channels`);
  }
  return channels;
}

type Activation = "relu" | "sigmoid" | "linear";

interface ConvSpec {
  ci: number;
  co: number;
  stride: 1 | 2;
  activation: Activation;
  /** Double height and width (nearest neighbor) before convolving. */
  upsample?: boolean;
}

interface ConvLayer {
  spec: ConvSpec;
  /** [KERNEL*KERNEL*ci, co], patch-major rows. */
  kernel: tf.Variable;
  bias: tf.Variable;
  op: (x: tf.Tensor4D, kernel: tf.Tensor2D, bias: tf.Tensor1D) => tf.Tensor4D;
}

function initConv(spec: ConvSpec, seed: number): ConvLayer {
  const rows = KERNEL * KERNEL * spec.ci;
  const fanIn = rows;
  const fanOut = KERNEL * KERNEL * spec.co;
  const limit = Math.sqrt(6 / (fanIn + fanOut));
  const rng = derivedRng(seed, 0);
  const values = new Float32Array(rows * spec.co);
  for (let i = 0; i < values.length; i++) {
    values[i] = (2 * rng() - 1) * limit;
  }
  return {
    spec,
    kernel: tf.tidy(() => tf.variable(tf.tensor2d(values, [rows, spec.co]))),
    bias: tf.tidy(() => tf.variable(tf.zeros([spec.co]))),
    op: makeConvOp({
      ci: spec.ci,
      co: spec.co,
      stride: spec.stride,
      upsample: spec.upsample === true,
    }),
  };
}

class ConvStack {
  readonly layers: ConvLayer[];

  constructor(specs: ConvSpec[], seed: number) {
    this.layers = specs.map((s, i) => initConv(s, seed + i));
  }

  apply(x: tf.Tensor4D): tf.Tensor4D {
    let h = x;
    for (const layer of this.layers) {
      h = layer.op(h, layer.kernel as tf.Tensor2D, layer.bias as tf.Tensor1D);
      if (layer.spec.activation === "relu") h = tf.relu(h);
      else if (layer.spec.activation === "sigmoid") h = tf.sigmoid(h);
    }
    return h;
  }

  variables(): tf.Variable[] {
    return this.layers.flatMap((l) => [l.kernel, l.bias]);
  }

  dispose() {
    for (const l of this.layers) {
      l.kernel.dispose();
      l.bias.dispose();
    }
  }
}

interface DftMatrices {
  /** [n, n] such that timeSamples = symbols x matrix (inverse transform). */
  invRe: tf.Tensor2D;
  invIm: tf.Tensor2D;
  /** Forward transform, back to symbols. */
  fwdRe: tf.Tensor2D;
  fwdIm: tf.Tensor2D;
}

function buildDftMatrices(n: number): DftMatrices {
  const invRe = new Float32Array(n * n);
  const invIm = new Float32Array(n * n);
  const fwdRe = new Float32Array(n * n);
  const fwdIm = new Float32Array(n * n);
  const scale = 1 / Math.sqrt(n);
  for (let m = 0; m < n; m++) {
    for (let k = 0; k < n; k++) {
      const ang = (2 * Math.PI * m * k) / n;
      // y[k] = sum_m z[m] e^{+i ang} / sqrt(n); stored transposed for matMul
      invRe[m * n + k] = Math.cos(ang) * scale;
      invIm[m * n + k] = Math.sin(ang) * scale;
      fwdRe[m * n + k] = Math.cos(ang) * scale;
      fwdIm[m * n + k] = -Math.sin(ang) * scale;
    }
  }
  return {
    invRe: tf.tensor2d(invRe, [n, n]),
    invIm: tf.tensor2d(invIm, [n, n]),
    fwdRe: tf.tensor2d(fwdRe, [n, n]),
    fwdIm: tf.tensor2d(fwdIm, [n, n]),
  };
}

export interface ForwardStats {
  loss: tf.Scalar;
  mse: tf.Scalar;
  meanPaprLinear: tf.Scalar;
}

export interface StoredWeight {
  shape: number[];
  values: Float32Array;
}

export class Autoencoder {
  readonly spec: TrainerSpec;
  readonly latentChannels: number;
  /** Complex symbols per image. */
  readonly symbolsPerImage: number;
  readonly framesPerImage: number;
  /** Zero symbols appended to fill the last frame of each image. */
  readonly padLength: number;
  private encoder: ConvStack;
  private decoder: ConvStack;
  private dft: DftMatrices;

  constructor(spec: TrainerSpec) {
    validateSpec(spec);
    this.spec = spec;
    this.latentChannels = latentChannelsFor(spec.bandwidthRatio);
    this.symbolsPerImage = (FEATURE_SIZE * FEATURE_SIZE * this.latentChannels) / 2;
    if (!Number.isInteger(this.symbolsPerImage)) {
      throw new Error(
        `latent channel count ${this.latentChannels} does not split into complex pairs`,
      );
    }
    this.framesPerImage = Math.ceil(this.symbolsPerImage / spec.nSubcarriers);
    this.padLength =
      this.framesPerImage * spec.nSubcarriers - this.symbolsPerImage;
    const c = this.latentChannels;
    this.encoder = new ConvStack(
      [
        { ci: IMAGE_CHANNELS, co: 8, stride: 2, activation: "relu" },
        { ci: 8, co: 16, stride: 2, activation: "relu" },
        { ci: 16, co: 16, stride: 1, activation: "relu" },
        { ci: 16, co: c, stride: 1, activation: "linear" },
      ],
      spec.seed + 100,
    );
    this.decoder = new ConvStack(
      [
        { ci: c, co: 16, stride: 1, activation: "relu" },
        { ci: 16, co: 16, stride: 1, activation: "relu", upsample: true },
        { ci: 16, co: 8, stride: 1, activation: "relu", upsample: true },
        { ci: 8, co: IMAGE_CHANNELS, stride: 1, activation: "sigmoid" },
      ],
      spec.seed + 200,
    );
    this.dft = buildDftMatrices(spec.nSubcarriers);
  }

  trainableWeights(): tf.Variable[] {
    return [...this.encoder.variables(), ...this.decoder.variables()];
  }

  exportWeights(): StoredWeight[] {
    return this.trainableWeights().map((v) => ({
      shape: v.shape.slice(),
      values: new Float32Array(v.dataSync()),
    }));
  }

  importWeights(stored: StoredWeight[]) {
    const vars = this.trainableWeights();
    if (stored.length !== vars.length) {
      throw new Error(
        `checkpoint holds ${stored.length} weight arrays, model has ${vars.length}`,
      );
    }
    vars.forEach((v, i) => {
      const w = stored[i];
      if (w.shape.join(",") !== v.shape.join(",")) {
        throw new Error(
          `weight ${i} has shape [${w.shape}], model expects [${v.shape}]`,
        );
      }
      const t = tf.tensor(w.values, w.shape);
      v.assign(t);
      t.dispose();
    });
  }

  /**
   * Encoder output as power-normalized complex pairs, [batch, symbols]
   * real and imaginary. Consecutive flattened activations pair up as
   * (real, imaginary); normalization scales the whole batch so the mean
   * symbol power is exactly one.
   */
  encodeToSymbols(images: tf.Tensor4D): { re: tf.Tensor2D; im: tf.Tensor2D } {
    const feat = this.encoder.apply(images);
    const flat = tf.reshape(feat, [-1, this.symbolsPerImage, 2]);
    let re = tf.reshape(
      tf.slice(flat, [0, 0, 0], [-1, -1, 1]),
      [-1, this.symbolsPerImage],
    ) as tf.Tensor2D;
    let im = tf.reshape(
      tf.slice(flat, [0, 0, 1], [-1, -1, 1]),
      [-1, this.symbolsPerImage],
    ) as tf.Tensor2D;
    const power = tf.mean(tf.add(tf.square(re), tf.square(im)));
    const scale = tf.rsqrt(power);
    re = tf.mul(re, scale) as tf.Tensor2D;
    im = tf.mul(im, scale) as tf.Tensor2D;
    return { re, im };
  }

  /** Symbols grouped into frames, zero-padding the tail when needed. */
  private toFrames(re: tf.Tensor2D, im: tf.Tensor2D): { re: tf.Tensor3D; im: tf.Tensor3D } {
    const n = this.spec.nSubcarriers;
    let reP = re;
    let imP = im;
    if (this.padLength > 0) {
      reP = tf.pad(re, [[0, 0], [0, this.padLength]]) as tf.Tensor2D;
      imP = tf.pad(im, [[0, 0], [0, this.padLength]]) as tf.Tensor2D;
    }
    return {
      re: tf.reshape(reP, [-1, this.framesPerImage, n]) as tf.Tensor3D,
      im: tf.reshape(imP, [-1, this.framesPerImage, n]) as tf.Tensor3D,
    };
  }

  modulate(fr: { re: tf.Tensor3D; im: tf.Tensor3D }) {
    const { invRe, invIm } = this.dft;
    const yr = tf.sub(tf.matMul(fr.re, invRe), tf.matMul(fr.im, invIm));
    const yi = tf.add(tf.matMul(fr.re, invIm), tf.matMul(fr.im, invRe));
    return { re: yr as tf.Tensor3D, im: yi as tf.Tensor3D };
  }

  demodulate(y: { re: tf.Tensor3D; im: tf.Tensor3D }) {
    const { fwdRe, fwdIm } = this.dft;
    const zr = tf.sub(tf.matMul(y.re, fwdRe), tf.matMul(y.im, fwdIm));
    const zi = tf.add(tf.matMul(y.re, fwdIm), tf.matMul(y.im, fwdRe));
    return { re: zr as tf.Tensor3D, im: zi as tf.Tensor3D };
  }

  /** Per-frame peak power over mean power of time samples, [batch, frames]. */
  paprOf(y: { re: tf.Tensor3D; im: tf.Tensor3D }): tf.Tensor2D {
    const p = tf.add(tf.square(y.re), tf.square(y.im));
    const peak = tf.max(p, -1);
    const mean = tf.mean(p, -1);
    return tf.div(peak, mean) as tf.Tensor2D;
  }

  /**
   * In-graph soft limiter, the trainable counterpart of the hard clipper:
   * y * (1 - relu(|y| - rho*ybar) / (|y| + gamma)) with ybar the frame
   * mean amplitude. The 1e-20 inside the root only guards the gradient
   * at an exactly zero sample.
   */
  applySoftClip(y: { re: tf.Tensor3D; im: tf.Tensor3D }, clip: SoftClipSpec) {
    const p = tf.add(tf.square(y.re), tf.square(y.im));
    const r = tf.sqrt(tf.add(p, 1e-20));
    const ybar = tf.mean(r, -1, true);
    const thresh = tf.mul(ybar, clip.rho);
    const factor = tf.sub(
      1,
      tf.div(tf.relu(tf.sub(r, thresh)), tf.add(r, clip.gamma)),
    );
    return {
      re: tf.mul(y.re, factor) as tf.Tensor3D,
      im: tf.mul(y.im, factor) as tf.Tensor3D,
    };
  }

  /**
   * Full training-time chain: encode, modulate, limit when configured,
   * add the supplied channel noise, demodulate, decode. The peak-power
   * penalty is measured before the limiter and the noise, on the signal
   * the amplifier would see without them.
   */
  forward(images: tf.Tensor4D, noiseRe: tf.Tensor3D, noiseIm: tf.Tensor3D): ForwardStats {
    const { lambda, softClip } = this.spec;
    const z = this.encodeToSymbols(images);
    const frames = this.toFrames(z.re, z.im);
    let y = this.modulate(frames);
    const papr = this.paprOf(y);
    const meanPaprLinear = tf.mean(papr) as tf.Scalar;
    if (softClip) {
      y = this.applySoftClip(y, softClip);
    }
    const noisy = {
      re: tf.add(y.re, noiseRe) as tf.Tensor3D,
      im: tf.add(y.im, noiseIm) as tf.Tensor3D,
    };
    const zHat = this.demodulate(noisy);
    const decoded = this.decodeFromFrameTensors(zHat.re, zHat.im);
    const mse = tf.mean(tf.square(tf.sub(images, decoded))) as tf.Scalar;
    const loss = tf.add(mse, tf.mul(lambda, meanPaprLinear)) as tf.Scalar;
    return { loss, mse, meanPaprLinear };
  }

  /** Frame tensors back to images; drops the zero pad first. */
  decodeFromFrameTensors(re: tf.Tensor3D, im: tf.Tensor3D): tf.Tensor4D {
    const n = this.spec.nSubcarriers;
    let reF = tf.reshape(re, [-1, this.framesPerImage * n]) as tf.Tensor2D;
    let imF = tf.reshape(im, [-1, this.framesPerImage * n]) as tf.Tensor2D;
    if (this.padLength > 0) {
      reF = tf.slice(reF, [0, 0], [-1, this.symbolsPerImage]) as tf.Tensor2D;
      imF = tf.slice(imF, [0, 0], [-1, this.symbolsPerImage]) as tf.Tensor2D;
    }
    const paired = tf.stack([reF, imF], 2);
    const feat = tf.reshape(paired, [
      -1, FEATURE_SIZE, FEATURE_SIZE, this.latentChannels,
    ]) as tf.Tensor4D;
    return this.decoder.apply(feat);
  }

  /**
   * Encode images to frequency frames on the CPU side, for export and
   * evaluation. Returns float64 copies of the float32 graph values.
   */
  encodeToFrames(images: Float32Array, imageCount: number): ComplexBatch {
    const out = makeBatch(
      imageCount * this.framesPerImage,
      this.spec.nSubcarriers,
    );
    if (imageCount === 0) return out;
    tf.tidy(() => {
      const x = tf.tensor4d(images, [
        imageCount, IMAGE_SIZE, IMAGE_SIZE, IMAGE_CHANNELS,
      ]);
      const z = this.encodeToSymbols(x);
      const re = z.re.dataSync();
      const im = z.im.dataSync();
      const k = this.symbolsPerImage;
      const n = this.spec.nSubcarriers;
      for (let b = 0; b < imageCount; b++) {
        const dst = b * this.framesPerImage * n;
        for (let j = 0; j < k; j++) {
          out.re[dst + j] = re[b * k + j];
          out.im[dst + j] = im[b * k + j];
        }
        // pad positions stay zero
      }
    });
    return out;
  }

  /** Decode frequency frames (as produced by encodeToFrames) to images. */
  decodeFromFrames(frames: ComplexBatch): Float32Array {
    const n = this.spec.nSubcarriers;
    if (frames.n !== n) {
      throw new Error(`frames carry ${frames.n} subcarriers, model expects ${n}`);
    }
    if (frames.frameCount % this.framesPerImage !== 0) {
      throw new Error(
        `frame count ${frames.frameCount} is not a multiple of ${this.framesPerImage}`,
      );
    }
    const imageCount = frames.frameCount / this.framesPerImage;
    if (imageCount === 0) return new Float32Array(0);
    return tf.tidy(() => {
      const re = tf.tensor3d(new Float32Array(frames.re), [
        imageCount, this.framesPerImage, n,
      ]);
      const im = tf.tensor3d(new Float32Array(frames.im), [
        imageCount, this.framesPerImage, n,
      ]);
      const decoded = this.decodeFromFrameTensors(re, im);
      return new Float32Array(decoded.dataSync());
    });
  }

  dispose() {
    this.encoder.dispose();
    this.decoder.dispose();
    this.dft.invRe.dispose();
    this.dft.invIm.dispose();
    this.dft.fwdRe.dispose();
    this.dft.fwdIm.dispose();
  }
}
