"""Mu-law companding and receiver-side expansion.

The compressor maps each sample magnitude r to
V * ln(1 + mu*r/V) / ln(1 + mu), phase kept, with V the frame's mean
amplitude; magnitude V is its fixed point. The expander is the exact
magnitude inverse, parameterized by the reference amplitude v_prime the
receiver uses. recover_v_prime estimates that reference from the received
frame alone by solving the mean-amplitude consistency equation; with no
noise it returns the transmitter's V exactly, under noise it drifts, which
is where companding's low-SNR distortion comes from.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .core import TimeFrame, require_nonzero
from .errors import ConfigError


@dataclass(frozen=True)
class CompandConfig:
    """mu controls the degree of amplitude compression."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigError(f"mu must be > 0, got {self.mu}")


def compand_batch(samples: np.ndarray, mu: float) -> np.ndarray:
    """Compress each row of a (n_frames, N) batch against its own mean amplitude."""
    return _kernels.compand(samples, mu)


def expand_batch(samples: np.ndarray, mu: float, v_prime: np.ndarray) -> np.ndarray:
    """Invert the compressor rowwise, using the given per-row reference amplitude."""
    v_prime = np.asarray(v_prime, dtype=float)
    if np.any(v_prime <= 0):
        raise ConfigError("v_prime must be > 0")
    return _kernels.expand(samples, mu, v_prime)


def compand(frame: TimeFrame, cfg: CompandConfig) -> TimeFrame:
    require_nonzero(frame.samples)
    return TimeFrame(compand_batch(frame.samples[None, :], cfg.mu)[0], frame.n_subcarriers)


def expand(frame: TimeFrame, cfg: CompandConfig, v_prime: float) -> TimeFrame:
    if not v_prime > 0:
        raise ConfigError(f"v_prime must be > 0, got {v_prime}")
    out = expand_batch(frame.samples[None, :], cfg.mu, np.array([v_prime]))[0]
    return TimeFrame(out, frame.n_subcarriers)


def _expanded_mean_amplitude(mags: np.ndarray, mu: float, ref: float) -> float:
    c = math.log1p(mu)
    return float(np.mean((ref / mu) * np.expm1(mags * c / ref)))


def recover_v_prime(received_samples: np.ndarray, mu: float) -> float:
    """Reference amplitude consistent with the received companded frame.

    Solves mean_k expand_mag(|z_k|; W) = W for W. The left side is
    strictly decreasing in W and the equation has exactly one positive
    root; for a noiseless companded frame that root is the mean amplitude
    the compressor used. Returns 0.0 for an all-zero frame.
    """
    mags = np.abs(np.asarray(received_samples))
    mean_mag = float(np.mean(mags))
    if mean_mag == 0.0:
        return 0.0

    def gap(w):
        return _expanded_mean_amplitude(mags, mu, w) - w

    # mean |z| lower-bounds the root (expansion is convex in the magnitude,
    # so the expanded mean at W = mean|z| is >= mean|z|).
    lo = mean_mag
    if gap(lo) <= 0.0:
        return lo
    hi = 2.0 * lo
    while gap(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12 * lo:  # pragma: no cover - equation always crosses zero
            raise ArithmeticError("v_prime bracket search failed")
    # tightest tolerances brentq accepts; the root is simple, so this
    # converges to the last representable bit
    return float(brentq(gap, lo, hi, xtol=5e-324, rtol=8.9e-16, maxiter=200))


def recover_v_prime_batch(samples: np.ndarray, mu: float) -> np.ndarray:
    return np.array([recover_v_prime(row, mu) for row in samples])
