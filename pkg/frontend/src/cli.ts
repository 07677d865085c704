/**
 * Command line around the trainer: fit a model, export its symbols,
 * score reconstructions over the channel.
 *
 *   node dist/cli.js train --out model.json --log train.csv
 *   node dist/cli.js export-latents --model model.json --out latents.symf
 *   node dist/cli.js evaluate --model model.json --snr 0,5,10,15,20
 */

import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import * as tf from "@tensorflow/tfjs";
import { DATASET_IDS, DatasetId, datasetFloats, makeDataset } from "./dataset.js";
import { evaluateGrid, gridToCsv, Technique } from "./evaluate.js";
import { writeFileAtomic } from "./fsio.js";
import { exportLatents } from "./latents.js";
import { DEFAULT_SPEC, TrainerSpec, validateSpec } from "./model.js";
import {
  loadCheckpoint,
  saveCheckpoint,
  trainModel,
  writeTrainingLog,
} from "./train.js";

class UsageError extends Error {}

function fail(message: string): never {
  console.error(`error: ${message}`);
  process.exit(2);
}

function num(raw: string, flag: string): number {
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new UsageError(`invalid value '${raw}' for ${flag}`);
  }
  return v;
}

function intNum(raw: string, flag: string): number {
  const v = num(raw, flag);
  if (!Number.isInteger(v)) {
    throw new UsageError(`${flag} must be an integer, got '${raw}'`);
  }
  return v;
}

function ratio(raw: string): number {
  const m = raw.match(/^(\d+)\s*\/\s*(\d+)$/);
  if (m) {
    const den = Number(m[2]);
    if (den === 0) throw new UsageError(`invalid ratio '${raw}'`);
    return Number(m[1]) / den;
  }
  return num(raw, "--bandwidth-ratio");
}

function snrList(raw: string): number[] {
  return raw.split(",").map((tok) => {
    const t = tok.trim();
    if (t === "inf") return Infinity;
    return num(t, "--snr");
  });
}

function datasetId(raw: string): DatasetId {
  if (!(DATASET_IDS as readonly string[]).includes(raw)) {
    throw new UsageError(
      `unknown dataset '${raw}' (expected one of: ${DATASET_IDS.join(", ")})`,
    );
  }
  return raw as DatasetId;
}

const TRAIN_OPTIONS = {
  out: { type: "string" },
  log: { type: "string" },
  dataset: { type: "string" },
  "train-images": { type: "string" },
  "heldout-images": { type: "string" },
  "bandwidth-ratio": { type: "string" },
  n: { type: "string" },
  lambda: { type: "string" },
  "softclip-rho": { type: "string" },
  "softclip-gamma": { type: "string" },
  "snr-train": { type: "string" },
  epochs: { type: "string" },
  "batch-size": { type: "string" },
  lr: { type: "string" },
  seed: { type: "string" },
  quiet: { type: "boolean" },
} as const;

function buildSpec(v: Record<string, string | boolean | undefined>): TrainerSpec {
  const d = DEFAULT_SPEC;
  const s = (key: string) => v[key] as string | undefined;
  let softClip = d.softClip;
  if (s("softclip-rho") !== undefined) {
    softClip = {
      rho: num(s("softclip-rho")!, "--softclip-rho"),
      gamma: s("softclip-gamma") !== undefined
        ? num(s("softclip-gamma")!, "--softclip-gamma")
        : 1e-12,
    };
  } else if (s("softclip-gamma") !== undefined) {
    throw new UsageError("--softclip-gamma requires --softclip-rho");
  }
  let snrTrainRange = d.snrTrainRange;
  if (s("snr-train") !== undefined) {
    const parts = snrList(s("snr-train")!);
    if (parts.length !== 2 || parts.some((p) => !Number.isFinite(p))) {
      throw new UsageError(
        `--snr-train expects 'lo,hi' in dB, got '${s("snr-train")}'`,
      );
    }
    snrTrainRange = [parts[0], parts[1]];
  }
  const spec: TrainerSpec = {
    dataset: s("dataset") !== undefined ? datasetId(s("dataset")!) : d.dataset,
    bandwidthRatio: s("bandwidth-ratio") !== undefined
      ? ratio(s("bandwidth-ratio")!)
      : d.bandwidthRatio,
    nSubcarriers: s("n") !== undefined ? intNum(s("n")!, "--n") : d.nSubcarriers,
    lambda: s("lambda") !== undefined ? num(s("lambda")!, "--lambda") : d.lambda,
    softClip,
    snrTrainRange,
    epochs: s("epochs") !== undefined ? intNum(s("epochs")!, "--epochs") : d.epochs,
    batchSize: s("batch-size") !== undefined
      ? intNum(s("batch-size")!, "--batch-size")
      : d.batchSize,
    learningRate: s("lr") !== undefined ? num(s("lr")!, "--lr") : d.learningRate,
    seed: s("seed") !== undefined ? intNum(s("seed")!, "--seed") : d.seed,
    trainImages: s("train-images") !== undefined
      ? intNum(s("train-images")!, "--train-images")
      : d.trainImages,
    heldoutImages: s("heldout-images") !== undefined
      ? intNum(s("heldout-images")!, "--heldout-images")
      : d.heldoutImages,
  };
  try {
    validateSpec(spec);
  } catch (e) {
    throw new UsageError((e as Error).message);
  }
  return spec;
}

function cmdTrain(args: string[]) {
  const { values } = parseArgs({ args, options: TRAIN_OPTIONS, strict: true });
  if (!values.out) throw new UsageError("train requires --out <checkpoint.json>");
  const spec = buildSpec(values);
  const quiet = values.quiet === true;
  const { model, log } = trainModel(spec, { quiet });
  saveCheckpoint(values.out, model);
  if (values.log) writeTrainingLog(values.log, log);
  if (!quiet) console.log(`saved checkpoint to ${values.out}`);
  model.dispose();
}

function cmdExportLatents(args: string[]) {
  const { values } = parseArgs({
    args,
    options: {
      model: { type: "string" },
      out: { type: "string" },
      images: { type: "string" },
      seed: { type: "string" },
      quiet: { type: "boolean" },
    },
    strict: true,
  });
  if (!values.model) throw new UsageError("export-latents requires --model <checkpoint.json>");
  if (!values.out) throw new UsageError("export-latents requires --out <file.symf>");
  const imageCount = values.images !== undefined
    ? intNum(values.images, "--images")
    : 64;
  if (imageCount < 0) throw new UsageError("--images must be >= 0");
  const seed = values.seed !== undefined ? intNum(values.seed, "--seed") : 7;
  const model = loadCheckpoint(values.model);
  const data = makeDataset(model.spec.dataset, imageCount, seed);
  exportLatents(model, datasetFloats(data), imageCount, values.out, {
    quiet: values.quiet === true,
  });
  model.dispose();
}

function cmdEvaluate(args: string[]) {
  const { values } = parseArgs({
    args,
    options: {
      model: { type: "string" },
      images: { type: "string" },
      seed: { type: "string" },
      snr: { type: "string" },
      trials: { type: "string" },
      technique: { type: "string" },
      rho: { type: "string" },
      gamma: { type: "string" },
      out: { type: "string" },
    },
    strict: true,
  });
  if (!values.model) throw new UsageError("evaluate requires --model <checkpoint.json>");
  const imageCount = values.images !== undefined
    ? intNum(values.images, "--images")
    : 64;
  const seed = values.seed !== undefined ? intNum(values.seed, "--seed") : 7;
  const grid = values.snr !== undefined ? snrList(values.snr) : [0, 5, 10, 15, 20];
  const trials = values.trials !== undefined ? intNum(values.trials, "--trials") : 10;
  const kind = values.technique ?? "none";
  const rho = values.rho !== undefined ? num(values.rho, "--rho") : 1.4;
  const gamma = values.gamma !== undefined ? num(values.gamma, "--gamma") : 1e-12;
  let technique: Technique;
  if (kind === "none") technique = { kind: "none" };
  else if (kind === "clip") technique = { kind: "clip", rho };
  else if (kind === "softclip") technique = { kind: "softclip", rho, gamma };
  else {
    throw new UsageError(
      `unknown technique '${kind}' (expected one of: clip, none, softclip)`,
    );
  }
  const model = loadCheckpoint(values.model);
  const data = makeDataset(model.spec.dataset, imageCount, seed);
  const rows = evaluateGrid(
    model, datasetFloats(data), data.pixels, imageCount,
    grid, trials, technique, seed,
  );
  const csv = gridToCsv(rows);
  if (values.out) {
    writeFileAtomic(values.out, csv);
  } else {
    process.stdout.write(csv);
  }
  model.dispose();
}

export function main(argv: string[]) {
  // keeps the bundled backend from printing its advisory banner on first use
  tf.enableProdMode();
  const [command, ...rest] = argv;
  try {
    switch (command) {
      case "train":
        cmdTrain(rest);
        return;
      case "export-latents":
        cmdExportLatents(rest);
        return;
      case "evaluate":
        cmdEvaluate(rest);
        return;
      default:
        throw new UsageError(
          `unknown command '${command ?? ""}' (expected one of: ` +
            `evaluate, export-latents, train)`,
        );
    }
  } catch (e) {
    if (e instanceof UsageError) fail(e.message);
    // parseArgs rejects unknown flags with its own error type
    if (e instanceof TypeError) fail((e as Error).message);
    console.error(`error: ${(e as Error).message}`);
    process.exit(1);
  }
}

if (
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  main(process.argv.slice(2));
}
