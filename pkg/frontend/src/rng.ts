/**
 * Seeded random number generation (sfc32). Every stochastic piece of the
 * trainer draws from an explicit stream so runs are reproducible from the
 * master seed alone.
 */

export type Rng = () => number;

/** sfc32 PRNG returning uniforms in [0, 1). */
export function makeRng(seed: number): Rng {
  let a = 0x9e3779b9 ^ seed;
  let b = 0x243f6a88 ^ (seed << 13) ^ (seed >>> 7);
  let c = 0xb7e15162 ^ (seed * 0x85ebca6b);
  let d = seed >>> 0;
  // warm up past the correlated first outputs
  const next = () => {
    a >>>= 0; b >>>= 0; c >>>= 0; d >>>= 0;
    const t = (a + b + d) >>> 0;
    d = (d + 1) >>> 0;
    a = b ^ (b >>> 9);
    b = (c + (c << 3)) >>> 0;
    c = ((c << 21) | (c >>> 11)) >>> 0;
    c = (c + t) >>> 0;
    return t / 4294967296;
  };
  for (let i = 0; i < 12; i++) next();
  return next;
}

/**
 * Derive an independent stream from (seed, purpose). Purposes keep the
 * dataset, weight init, channel noise and SNR draws decoupled, so changing
 * one leaves the others untouched.
 */
export function derivedRng(seed: number, purpose: number): Rng {
  return makeRng(((seed * 0x01000193) ^ (purpose * 0x9e3779b1)) >>> 0);
}

/** Standard normal via Box-Muller, consuming two uniforms per value. */
export function gaussian(rng: Rng): number {
  let u = 0;
  while (u === 0) u = rng();
  const v = rng();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}

export function gaussianArray(rng: Rng, n: number): Float64Array {
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) out[i] = gaussian(rng);
  return out;
}
