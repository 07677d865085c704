import { expect, test } from "vitest";
import {
  datasetFloats,
  imageFloats,
  IMAGE_VALUES,
  makeDataset,
} from "../src/dataset";

test("generation is deterministic in the seed", () => {
  const a = makeDataset("blobs32", 8, 3);
  const b = makeDataset("blobs32", 8, 3);
  expect(Buffer.from(a.pixels).equals(Buffer.from(b.pixels))).toBe(true);
  const c = makeDataset("blobs32", 8, 4);
  expect(Buffer.from(a.pixels).equals(Buffer.from(c.pixels))).toBe(false);
});

test("image i does not depend on how many images are made", () => {
  const small = makeDataset("blobs32", 4, 11);
  const large = makeDataset("blobs32", 32, 11);
  for (let i = 0; i < 4; i++) {
    const a = small.pixels.subarray(i * IMAGE_VALUES, (i + 1) * IMAGE_VALUES);
    const b = large.pixels.subarray(i * IMAGE_VALUES, (i + 1) * IMAGE_VALUES);
    expect(Buffer.from(a).equals(Buffer.from(b))).toBe(true);
  }
});

test("pixels fill the 8-bit range without sticking to one value", () => {
  const data = makeDataset("blobs32", 16, 5);
  let lo = 255;
  let hi = 0;
  const counts = new Map<number, number>();
  for (const v of data.pixels) {
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
    counts.set(v, (counts.get(v) ?? 0) + 1);
  }
  expect(lo).toBeLessThan(40);
  expect(hi).toBeGreaterThan(215);
  const most = Math.max(...counts.values());
  expect(most / data.pixels.length).toBeLessThan(0.2);
});

test("floats are pixels over 255", () => {
  const data = makeDataset("blobs32", 3, 6);
  const all = datasetFloats(data);
  expect(all.length).toBe(3 * IMAGE_VALUES);
  for (let i = 0; i < all.length; i++) {
    expect(all[i]).toBe(Math.fround(data.pixels[i] / 255));
  }
  const one = imageFloats(data, 2);
  for (let i = 0; i < IMAGE_VALUES; i++) {
    expect(one[i]).toBe(all[2 * IMAGE_VALUES + i]);
  }
});

test("unknown ids are rejected", () => {
  expect(() => makeDataset("nope" as never, 1, 1)).toThrow(/dataset/);
});

test("neighboring images differ", () => {
  const data = makeDataset("blobs32", 2, 9);
  const a = data.pixels.subarray(0, IMAGE_VALUES);
  const b = data.pixels.subarray(IMAGE_VALUES);
  let diff = 0;
  for (let i = 0; i < IMAGE_VALUES; i++) {
    if (a[i] !== b[i]) diff++;
  }
  expect(diff / IMAGE_VALUES).toBeGreaterThan(0.5);
});
