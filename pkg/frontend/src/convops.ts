/**
 * 3x3 convolution as a differentiable custom op with hand-rolled
 * typed-array kernels. The stock CPU backend spends its time in
 * generic slice, pad and split loops when a conv is phrased through
 * its ops; writing the three passes (forward, input gradient, filter
 * gradient) as flat loops over Float32Arrays makes a training step
 * cheap enough to run without a native backend.
 *
 * Supported shapes cover what the autoencoder needs: same padding,
 * stride 1 or 2, and an optional fused nearest-neighbor doubling of
 * the input before the convolution.
 */

import * as tf from "@tensorflow/tfjs";

export interface ConvGeometry {
  ci: number;
  co: number;
  stride: 1 | 2;
  /** Double height and width (nearest neighbor) before convolving. */
  upsample: boolean;
}

const K = 3;
const PAD = 1;

/** y[b,i,j,co] = sum_{dh,dw,ci} x[b, i*s+dh-1, j*s+dw-1, ci] * k[(dh*3+dw)*ci..., co] + bias */
export function convForward(
  x: Float32Array,
  kernel: Float32Array,
  bias: Float32Array,
  batch: number,
  hin: number,
  win: number,
  geo: ConvGeometry,
): { y: Float32Array; ho: number; wo: number } {
  const { ci, co, stride, upsample } = geo;
  const hu = upsample ? 2 * hin : hin;
  const wu = upsample ? 2 * win : win;
  const ho = hu / stride;
  const wo = wu / stride;
  const y = new Float32Array(batch * ho * wo * co);
  const acc = new Float64Array(co);
  for (let b = 0; b < batch; b++) {
    const xb = b * hin * win * ci;
    const yb = b * ho * wo * co;
    for (let i = 0; i < ho; i++) {
      for (let j = 0; j < wo; j++) {
        for (let c = 0; c < co; c++) acc[c] = bias[c];
        for (let dh = 0; dh < K; dh++) {
          const p = i * stride + dh - PAD;
          if (p < 0 || p >= hu) continue;
          const pr = upsample ? p >> 1 : p;
          for (let dw = 0; dw < K; dw++) {
            const q = j * stride + dw - PAD;
            if (q < 0 || q >= wu) continue;
            const qc = upsample ? q >> 1 : q;
            const xoff = xb + (pr * win + qc) * ci;
            const koff = (dh * K + dw) * ci * co;
            for (let c = 0; c < ci; c++) {
              const xv = x[xoff + c];
              const krow = koff + c * co;
              for (let o = 0; o < co; o++) {
                acc[o] += xv * kernel[krow + o];
              }
            }
          }
        }
        const yoff = yb + (i * wo + j) * co;
        for (let c = 0; c < co; c++) y[yoff + c] = acc[c];
      }
    }
  }
  return { y, ho, wo };
}

/** Gradients for x, kernel and bias in one traversal of the output. */
export function convBackward(
  x: Float32Array,
  kernel: Float32Array,
  dy: Float32Array,
  batch: number,
  hin: number,
  win: number,
  geo: ConvGeometry,
): { dx: Float32Array; dk: Float32Array; db: Float32Array } {
  const { ci, co, stride, upsample } = geo;
  const hu = upsample ? 2 * hin : hin;
  const wu = upsample ? 2 * win : win;
  const ho = hu / stride;
  const wo = wu / stride;
  const dx = new Float32Array(x.length);
  const dk = new Float32Array(kernel.length);
  const db = new Float32Array(co);
  for (let b = 0; b < batch; b++) {
    const xb = b * hin * win * ci;
    const yb = b * ho * wo * co;
    for (let i = 0; i < ho; i++) {
      for (let j = 0; j < wo; j++) {
        const yoff = yb + (i * wo + j) * co;
        for (let o = 0; o < co; o++) db[o] += dy[yoff + o];
        for (let dh = 0; dh < K; dh++) {
          const p = i * stride + dh - PAD;
          if (p < 0 || p >= hu) continue;
          const pr = upsample ? p >> 1 : p;
          for (let dw = 0; dw < K; dw++) {
            const q = j * stride + dw - PAD;
            if (q < 0 || q >= wu) continue;
            const qc = upsample ? q >> 1 : q;
            const xoff = xb + (pr * win + qc) * ci;
            const koff = (dh * K + dw) * ci * co;
            for (let c = 0; c < ci; c++) {
              const xv = x[xoff + c];
              const krow = koff + c * co;
              let t = 0;
              for (let o = 0; o < co; o++) {
                const d = dy[yoff + o];
                dk[krow + o] += xv * d;
                t += kernel[krow + o] * d;
              }
              dx[xoff + c] += t;
            }
          }
        }
      }
    }
  }
  return { dx, dk, db };
}

/**
 * Wrap the loops as an op the tape can differentiate. Geometry is
 * fixed per layer; batch and spatial extent come from the input.
 */
export function makeConvOp(geo: ConvGeometry) {
  return tf.customGrad(
    (...args: unknown[]): { value: tf.Tensor; gradFunc: (dy: tf.Tensor, saved: tf.Tensor[]) => tf.Tensor[] } => {
      const x = args[0] as tf.Tensor4D;
      const kernel = args[1] as tf.Tensor2D;
      const bias = args[2] as tf.Tensor1D;
      const save = args[3] as tf.GradSaveFunc;
      const [batch, hin, win] = x.shape;
      const { y, ho, wo } = convForward(
        x.dataSync() as Float32Array,
        kernel.dataSync() as Float32Array,
        bias.dataSync() as Float32Array,
        batch, hin, win, geo,
      );
      save([x, kernel]);
      const value = tf.tensor4d(y, [batch, ho, wo, geo.co]);
      const gradFunc = (dy: tf.Tensor, saved: tf.Tensor[]) => {
        const [xs, ks] = saved;
        const { dx, dk, db } = convBackward(
          xs.dataSync() as Float32Array,
          ks.dataSync() as Float32Array,
          dy.dataSync() as Float32Array,
          batch, hin, win, geo,
        );
        return [
          tf.tensor4d(dx, [batch, hin, win, geo.ci]),
          tf.tensor2d(dk, [K * K * geo.ci, geo.co]),
          tf.tensor1d(db),
        ];
      };
      return { value, gradFunc };
    },
  ) as (x: tf.Tensor4D, kernel: tf.Tensor2D, bias: tf.Tensor1D) => tf.Tensor4D;
}
