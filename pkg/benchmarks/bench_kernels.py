"""Time the numba kernels against the pure-numpy fallbacks.

Runs every kernel from both implementation tables on the same batch and
reports best-of-N wall times with the speedup ratio. The numba column
requires numba to be importable; JIT compilation happens during warmup
and is not billed.

Usage: python3 benchmarks/bench_kernels.py [--frames 20000] [--n 64] [--repeats 5]
"""

import argparse
import time

import numpy as np

from paprsim._kernels import HAVE_NUMBA, NUMBA_IMPL, NUMPY_IMPL


def _call(impl, name, batch, v_prime):
    if name == "papr_linear":
        return impl[name](batch)
    if name == "clip":
        return impl[name](batch, 1.4)
    if name == "compand":
        return impl[name](batch, 4.0)
    if name == "expand":
        return impl[name](batch, 4.0, v_prime)
    return impl[name](batch, 1.4, 1e-12)


def _best_of(impl, name, batch, v_prime, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        _call(impl, name, batch, v_prime)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--frames", type=int, default=20_000)
    parser.add_argument("--n", type=int, default=64)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    batch = (
        rng.standard_normal((args.frames, args.n))
        + 1j * rng.standard_normal((args.frames, args.n))
    ) / np.sqrt(2.0)
    v_prime = np.mean(np.abs(batch), axis=1)

    print(f"batch {args.frames} x {args.n}, best of {args.repeats}")
    header = f"{'kernel':<12} {'numpy':>10} {'numba':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name in NUMPY_IMPL:
        if HAVE_NUMBA:
            _call(NUMBA_IMPL, name, batch[:64], v_prime[:64])  # warm the JIT
        t_np = _best_of(NUMPY_IMPL, name, batch, v_prime, args.repeats)
        if HAVE_NUMBA:
            t_nb = _best_of(NUMBA_IMPL, name, batch, v_prime, args.repeats)
            print(f"{name:<12} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x")
        else:
            print(f"{name:<12} {t_np * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")


if __name__ == "__main__":
    main()
