import { expect, test } from "vitest";
import { derivedRng, gaussian, gaussianArray, makeRng } from "../src/rng";

test("same seed gives the same stream", () => {
  const a = makeRng(42);
  const b = makeRng(42);
  for (let i = 0; i < 1000; i++) {
    expect(a()).toBe(b());
  }
});

test("different seeds diverge", () => {
  const a = makeRng(1);
  const b = makeRng(2);
  let same = 0;
  for (let i = 0; i < 100; i++) {
    if (a() === b()) same++;
  }
  expect(same).toBeLessThan(3);
});

test("values stay in [0, 1)", () => {
  const rng = makeRng(7);
  for (let i = 0; i < 10000; i++) {
    const v = rng();
    expect(v).toBeGreaterThanOrEqual(0);
    expect(v).toBeLessThan(1);
  }
});

test("derived streams differ by purpose and stay reproducible", () => {
  const a1 = derivedRng(5, 10);
  const a2 = derivedRng(5, 10);
  const b = derivedRng(5, 11);
  const av = Array.from({ length: 50 }, () => a1());
  expect(Array.from({ length: 50 }, () => a2())).toEqual(av);
  const bv = Array.from({ length: 50 }, () => b());
  expect(bv).not.toEqual(av);
});

test("gaussian moments are roughly standard", () => {
  const rng = makeRng(123);
  const n = 200000;
  let mean = 0;
  let m2 = 0;
  for (let i = 0; i < n; i++) {
    const v = gaussian(rng);
    mean += v;
    m2 += v * v;
  }
  mean /= n;
  m2 /= n;
  expect(Math.abs(mean)).toBeLessThan(0.01);
  expect(Math.abs(m2 - 1)).toBeLessThan(0.02);
});

test("gaussianArray matches repeated draws", () => {
  const a = gaussianArray(makeRng(9), 16);
  const rng = makeRng(9);
  for (let i = 0; i < 16; i++) {
    expect(a[i]).toBe(gaussian(rng));
  }
});
