/**
 * Export encoder output as a symbol file the channel simulator replays
 * directly. Each image contributes a whole number of frames; when the
 * symbol count does not fill the last one, it is padded with zeros and
 * the pad length is reported so downstream tools can account for it.
 */

import { meanPower } from "./dsp.js";
import { Autoencoder } from "./model.js";
import { writeSymf } from "./symf.js";

export interface ExportInfo {
  frameCount: number;
  n: number;
  framesPerImage: number;
  /** Zero symbols appended per image to fill its final frame. */
  padLength: number;
  /** Mean |z|^2 over the real (non-pad) symbols. */
  meanSymbolPower: number;
}

export function exportLatents(
  model: Autoencoder,
  images: Float32Array,
  imageCount: number,
  outPath: string,
  opts: { quiet?: boolean } = {},
): ExportInfo {
  const frames = model.encodeToFrames(images, imageCount);
  writeSymf(outPath, frames);
  const n = model.spec.nSubcarriers;
  let power = 0;
  const k = model.symbolsPerImage;
  for (let b = 0; b < imageCount; b++) {
    const off = b * model.framesPerImage * n;
    for (let j = 0; j < k; j++) {
      power += frames.re[off + j] ** 2 + frames.im[off + j] ** 2;
    }
  }
  const info: ExportInfo = {
    frameCount: frames.frameCount,
    n,
    framesPerImage: model.framesPerImage,
    padLength: model.padLength,
    meanSymbolPower: imageCount === 0 ? 0 : power / (imageCount * k),
  };
  if (!opts.quiet) {
    if (info.padLength > 0) {
      console.log(
        `export: ${info.frameCount} frames, final frame of each image ` +
          `padded with ${info.padLength} zero symbols`,
      );
    } else {
      console.log(`export: ${info.frameCount} frames, no padding`);
    }
    console.log(
      `export: mean symbol power ${info.meanSymbolPower.toFixed(6)} ` +
        `(whole-file ${meanPower(frames).toFixed(6)} with pad)`,
    );
  }
  return info;
}
