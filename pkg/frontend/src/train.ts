/**
 * Training loop with a live channel in the graph: every batch draws a
 * noise level from the configured range, runs the autoencoder through
 * modulation and that noise, and steps Adam on reconstruction error
 * plus the weighted peak-power penalty.
 */

import * as fs from "node:fs";
import * as tf from "@tensorflow/tfjs";
import { Dataset, datasetFloats, IMAGE_VALUES, makeDataset } from "./dataset.js";
import { evaluatePsnr, Technique } from "./evaluate.js";
import { writeFileAtomic } from "./fsio.js";
import { Autoencoder, TrainerSpec, validateSpec } from "./model.js";
import { derivedRng, gaussian, Rng } from "./rng.js";

export interface EpochLog {
  epoch: number;
  mse: number;
  meanPaprLinear: number;
  psnrDb: number;
}

export interface TrainResult {
  model: Autoencoder;
  log: EpochLog[];
  dataset: Dataset;
}

function fillNoise(
  re: Float32Array,
  im: Float32Array,
  imageCount: number,
  samplesPerImage: number,
  snrRng: Rng,
  noiseRng: Rng,
  snrRange: [number, number],
) {
  const [lo, hi] = snrRange;
  for (let b = 0; b < imageCount; b++) {
    const snrDb = lo + (hi - lo) * snrRng();
    const std = Math.sqrt(Math.pow(10, -snrDb / 10) / 2);
    const off = b * samplesPerImage;
    for (let j = 0; j < samplesPerImage; j++) {
      re[off + j] = std * gaussian(noiseRng);
      im[off + j] = std * gaussian(noiseRng);
    }
  }
}

export function trainModel(
  spec: TrainerSpec,
  opts: { quiet?: boolean } = {},
): TrainResult {
  validateSpec(spec);
  const dataset = makeDataset(
    spec.dataset,
    spec.trainImages + spec.heldoutImages,
    spec.seed,
  );
  const floats = datasetFloats(dataset);
  const trainFloats = floats.subarray(0, spec.trainImages * IMAGE_VALUES);
  const heldFloats = floats.subarray(spec.trainImages * IMAGE_VALUES);
  const heldPixels = dataset.pixels.subarray(spec.trainImages * IMAGE_VALUES);

  const model = new Autoencoder(spec);
  const optimizer = tf.train.adam(spec.learningRate);
  const vars = model.trainableWeights();
  const shuffleRng = derivedRng(spec.seed, 3);
  const snrRng = derivedRng(spec.seed, 4);
  const noiseRng = derivedRng(spec.seed, 5);

  const n = spec.nSubcarriers;
  const samplesPerImage = model.framesPerImage * n;
  const heldTechnique: Technique = spec.softClip
    ? { kind: "softclip", rho: spec.softClip.rho, gamma: spec.softClip.gamma }
    : { kind: "none" };
  const heldSnr = (spec.snrTrainRange[0] + spec.snrTrainRange[1]) / 2;

  const order = new Int32Array(spec.trainImages);
  for (let i = 0; i < order.length; i++) order[i] = i;
  const log: EpochLog[] = [];

  for (let epoch = 0; epoch < spec.epochs; epoch++) {
    // Fisher-Yates on the image order, one fresh pass per epoch
    for (let i = order.length - 1; i > 0; i--) {
      const j = Math.floor(shuffleRng() * (i + 1));
      const tmp = order[i];
      order[i] = order[j];
      order[j] = tmp;
    }
    let mseAcc = 0;
    let paprAcc = 0;
    let seen = 0;
    for (let start = 0; start < spec.trainImages; start += spec.batchSize) {
      const bs = Math.min(spec.batchSize, spec.trainImages - start);
      const batchImages = new Float32Array(bs * IMAGE_VALUES);
      for (let b = 0; b < bs; b++) {
        const src = order[start + b] * IMAGE_VALUES;
        batchImages.set(trainFloats.subarray(src, src + IMAGE_VALUES), b * IMAGE_VALUES);
      }
      const noiseRe = new Float32Array(bs * samplesPerImage);
      const noiseIm = new Float32Array(bs * samplesPerImage);
      fillNoise(
        noiseRe, noiseIm, bs, samplesPerImage,
        snrRng, noiseRng, spec.snrTrainRange,
      );

      const x = tf.tensor4d(batchImages, [bs, 32, 32, 3]);
      const nr = tf.tensor3d(noiseRe, [bs, model.framesPerImage, n]);
      const ni = tf.tensor3d(noiseIm, [bs, model.framesPerImage, n]);
      let batchMse = 0;
      let batchPapr = 0;
      const { value, grads } = tf.variableGrads(() => {
        const s = model.forward(x, nr, ni);
        batchMse = s.mse.dataSync()[0];
        batchPapr = s.meanPaprLinear.dataSync()[0];
        return s.loss;
      }, vars);
      const lossVal = value.dataSync()[0];
      x.dispose();
      nr.dispose();
      ni.dispose();
      value.dispose();
      if (!Number.isFinite(lossVal)) {
        tf.dispose(grads);
        const batchIdx = Math.floor(start / spec.batchSize) + 1;
        throw new Error(
          `training diverged: non-finite loss at epoch ${epoch + 1}, batch ` +
            `${batchIdx} (lr=${spec.learningRate}, lambda=${spec.lambda}); ` +
            `lower the learning rate or the peak-power weight`,
        );
      }
      // variableGrads hands back plain tensors; applyGradients takes them
      optimizer.applyGradients(
        grads as unknown as Parameters<typeof optimizer.applyGradients>[0],
      );
      tf.dispose(grads);
      mseAcc += batchMse * bs;
      paprAcc += batchPapr * bs;
      seen += bs;
    }

    const psnr = evaluatePsnr(
      model, heldFloats, heldPixels, spec.heldoutImages,
      {
        snrDb: heldSnr,
        trials: 1,
        technique: heldTechnique,
        seed: spec.seed + 70000 + epoch,
      },
    );
    const row: EpochLog = {
      epoch: epoch + 1,
      mse: mseAcc / seen,
      meanPaprLinear: paprAcc / seen,
      psnrDb: psnr,
    };
    log.push(row);
    if (!opts.quiet) {
      console.log(
        `epoch ${row.epoch}/${spec.epochs} mse=${row.mse.toFixed(6)} ` +
          `papr=${row.meanPaprLinear.toFixed(3)} psnr=${row.psnrDb.toFixed(2)}dB`,
      );
    }
  }
  optimizer.dispose();
  return { model, log, dataset };
}

function formatNumber(x: number): string {
  if (x === Infinity) return "inf";
  if (x === -Infinity) return "-inf";
  return String(x);
}

export function logToCsv(log: EpochLog[]): string {
  const lines = ["epoch,mse,mean_papr_linear,psnr_db"];
  for (const row of log) {
    lines.push(
      `${row.epoch},${formatNumber(row.mse)},` +
        `${formatNumber(row.meanPaprLinear)},${formatNumber(row.psnrDb)}`,
    );
  }
  return lines.join("\n") + "\n";
}

export function writeTrainingLog(path: string, log: EpochLog[]) {
  writeFileAtomic(path, logToCsv(log));
}

interface PackedWeight {
  shape: number[];
  data: string;
}

interface Checkpoint {
  version: number;
  spec: TrainerSpec;
  weights: PackedWeight[];
}

export function saveCheckpoint(path: string, model: Autoencoder) {
  const weights: PackedWeight[] = model.exportWeights().map((w) => ({
    shape: w.shape,
    data: Buffer.from(w.values.buffer, 0, w.values.byteLength).toString("base64"),
  }));
  const ckpt: Checkpoint = { version: 1, spec: model.spec, weights };
  writeFileAtomic(path, JSON.stringify(ckpt));
}

export function loadCheckpoint(path: string): Autoencoder {
  const ckpt = JSON.parse(fs.readFileSync(path, "utf8")) as Checkpoint;
  if (ckpt.version !== 1) {
    throw new Error(`${path}: unsupported checkpoint version ${ckpt.version}`);
  }
  const model = new Autoencoder(ckpt.spec);
  model.importWeights(
    ckpt.weights.map((w) => {
      const raw = Buffer.from(w.data, "base64");
      const aligned = new ArrayBuffer(raw.byteLength);
      new Uint8Array(aligned).set(raw);
      return { shape: w.shape, values: new Float32Array(aligned) };
    }),
  );
  return model;
}
