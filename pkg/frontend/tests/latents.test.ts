import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, expect, test, vi } from "vitest";
import { datasetFloats, makeDataset } from "../src/dataset";
import { exportLatents } from "../src/latents";
import { Autoencoder, DEFAULT_SPEC, TrainerSpec } from "../src/model";
import { readSymf } from "../src/symf";

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "latents-test-"));
afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function model(overrides: Partial<TrainerSpec> = {}): Autoencoder {
  return new Autoencoder({
    ...DEFAULT_SPEC,
    trainImages: 4,
    heldoutImages: 2,
    epochs: 0,
    ...overrides,
  });
}

test("export writes every encoded frame with unit symbol power", () => {
  const m = model();
  const data = makeDataset("blobs32", 5, 7);
  const p = path.join(tmp, "full.symf");
  const info = exportLatents(m, datasetFloats(data), 5, p, { quiet: true });
  expect(info.frameCount).toBe(40);
  expect(info.n).toBe(64);
  expect(info.framesPerImage).toBe(8);
  expect(info.padLength).toBe(0);
  expect(Math.abs(info.meanSymbolPower - 1)).toBeLessThanOrEqual(1e-3);
  const batch = readSymf(p);
  expect(batch.frameCount).toBe(40);
  const direct = m.encodeToFrames(datasetFloats(data), 5);
  // graph values are float32 already, so the file roundtrip is exact
  expect(Array.from(batch.re)).toEqual(Array.from(direct.re));
  expect(Array.from(batch.im)).toEqual(Array.from(direct.im));
  m.dispose();
});

test("export reports the zero pad when frames do not divide evenly", () => {
  const m = model({ bandwidthRatio: 15 / 96 });
  const data = makeDataset("blobs32", 2, 7);
  const p = path.join(tmp, "padded.symf");
  const log = vi.spyOn(console, "log").mockImplementation(() => {});
  const info = exportLatents(m, datasetFloats(data), 2, p);
  const logged = log.mock.calls.map((c) => String(c[0]));
  log.mockRestore();
  expect(info.padLength).toBe(32);
  expect(logged.some((line) => /padded with 32 zero symbols/.test(line))).toBe(true);
  const batch = readSymf(p);
  for (let b = 0; b < 2; b++) {
    const off = (b * 8 + 7) * 64;
    for (let j = 32; j < 64; j++) {
      expect(batch.re[off + j]).toBe(0);
      expect(batch.im[off + j]).toBe(0);
    }
  }
  // pad symbols carry no power but the per-symbol mean still excludes them
  expect(Math.abs(info.meanSymbolPower - 1)).toBeLessThanOrEqual(1e-3);
  m.dispose();
});

test("one image at the narrowest ratio yields a single frame", () => {
  const m = model({ bandwidthRatio: 1 / 48 });
  const data = makeDataset("blobs32", 1, 7);
  const p = path.join(tmp, "single.symf");
  const info = exportLatents(m, datasetFloats(data), 1, p, { quiet: true });
  expect(info.frameCount).toBe(1);
  expect(readSymf(p).frameCount).toBe(1);
  m.dispose();
});

test("an empty image set writes a valid empty symbol file", () => {
  const m = model();
  const p = path.join(tmp, "empty.symf");
  const info = exportLatents(m, new Float32Array(0), 0, p, { quiet: true });
  expect(info.frameCount).toBe(0);
  expect(info.meanSymbolPower).toBe(0);
  const batch = readSymf(p);
  expect(batch.frameCount).toBe(0);
  expect(batch.n).toBe(64);
  m.dispose();
});
