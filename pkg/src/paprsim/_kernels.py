"""Hot per-sample kernels, batched one frame per row.

Two interchangeable implementations live here: numba @njit loops (default
when numba imports) and pure-numpy vectorized fallbacks. Set the
environment variable ``PAPRSIM_DISABLE_NUMBA=1`` before import to force
the numpy path. ``benchmarks/bench_kernels.py`` times the two against
each other.

All kernels take complex128 arrays of shape (n_frames, n) and assume the
caller has already rejected degenerate inputs (all-zero frames where the
operation is undefined); zero rows pass through unchanged rather than
dividing by zero.
"""

import math
import os

import numpy as np

_DISABLE = os.environ.get("PAPRSIM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# numpy implementations


def _papr_linear_np(y: np.ndarray) -> np.ndarray:
    power = y.real * y.real + y.imag * y.imag
    return np.max(power, axis=1) / np.mean(power, axis=1)


def _clip_np(y: np.ndarray, rho: float) -> np.ndarray:
    power = y.real * y.real + y.imag * y.imag
    thresh = rho * np.sqrt(np.mean(power, axis=1, keepdims=True))
    mag = np.sqrt(power)
    scale = np.ones_like(mag)
    over = (mag >= thresh) & (mag > 0.0)
    scale[over] = np.broadcast_to(thresh, mag.shape)[over] / mag[over]
    return y * scale


def _compand_np(y: np.ndarray, mu: float) -> np.ndarray:
    mag = np.abs(y)
    v = np.mean(mag, axis=1, keepdims=True)
    c = math.log1p(mu)
    out_mag = np.zeros_like(mag)
    nz = np.broadcast_to(v, mag.shape) > 0.0
    vb = np.broadcast_to(v, mag.shape)
    out_mag[nz] = vb[nz] * np.log1p(mu * mag[nz] / vb[nz]) / c
    scale = np.ones_like(mag)
    pos = mag > 0.0
    scale[pos] = out_mag[pos] / mag[pos]
    return y * scale


def _expand_np(z: np.ndarray, mu: float, v_prime: np.ndarray) -> np.ndarray:
    mag = np.abs(z)
    c = math.log1p(mu)
    vb = np.broadcast_to(v_prime[:, None], mag.shape)
    out_mag = (vb / mu) * np.expm1(mag * c / vb)
    scale = np.ones_like(mag)
    pos = mag > 0.0
    scale[pos] = out_mag[pos] / mag[pos]
    return z * scale


def _soft_clip_np(y: np.ndarray, rho: float, gamma: float) -> np.ndarray:
    mag = np.abs(y)
    thresh = rho * np.mean(mag, axis=1, keepdims=True)
    factor = 1.0 - np.maximum(mag - thresh, 0.0) / (mag + gamma)
    return y * factor


# ---------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _papr_linear_nb(y):
        nf, n = y.shape
        out = np.empty(nf)
        for f in range(nf):
            peak = 0.0
            acc = 0.0
            for k in range(n):
                v = y[f, k]
                p = v.real * v.real + v.imag * v.imag
                acc += p
                if p > peak:
                    peak = p
            out[f] = peak / (acc / n)
        return out

    @njit(cache=True, nogil=True)
    def _clip_nb(y, rho):
        # magnitudes via sqrt(re^2+im^2) throughout: hypot's overflow guard
        # costs 2x here and normalized signals never approach that regime
        nf, n = y.shape
        out = np.empty_like(y)
        for f in range(nf):
            acc = 0.0
            for k in range(n):
                v = y[f, k]
                acc += v.real * v.real + v.imag * v.imag
            thresh = rho * math.sqrt(acc / n)
            for k in range(n):
                v = y[f, k]
                r = math.sqrt(v.real * v.real + v.imag * v.imag)
                if r >= thresh and r > 0.0:
                    out[f, k] = v * (thresh / r)
                else:
                    out[f, k] = v
        return out

    @njit(cache=True, nogil=True)
    def _compand_nb(y, mu):
        nf, n = y.shape
        c = math.log1p(mu)
        out = np.empty_like(y)
        for f in range(nf):
            acc = 0.0
            for k in range(n):
                v = y[f, k]
                acc += math.sqrt(v.real * v.real + v.imag * v.imag)
            v_mean = acc / n
            for k in range(n):
                v = y[f, k]
                r = math.sqrt(v.real * v.real + v.imag * v.imag)
                if r > 0.0 and v_mean > 0.0:
                    out_mag = v_mean * math.log1p(mu * r / v_mean) / c
                    out[f, k] = v * (out_mag / r)
                else:
                    out[f, k] = v
        return out

    @njit(cache=True, nogil=True)
    def _expand_nb(z, mu, v_prime):
        nf, n = z.shape
        c = math.log1p(mu)
        out = np.empty_like(z)
        for f in range(nf):
            vp = v_prime[f]
            for k in range(n):
                v = z[f, k]
                r = math.sqrt(v.real * v.real + v.imag * v.imag)
                if r > 0.0:
                    out_mag = (vp / mu) * math.expm1(r * c / vp)
                    out[f, k] = v * (out_mag / r)
                else:
                    out[f, k] = v
        return out

    @njit(cache=True, nogil=True)
    def _soft_clip_nb(y, rho, gamma):
        nf, n = y.shape
        out = np.empty_like(y)
        for f in range(nf):
            acc = 0.0
            for k in range(n):
                v = y[f, k]
                acc += math.sqrt(v.real * v.real + v.imag * v.imag)
            thresh = rho * (acc / n)
            for k in range(n):
                v = y[f, k]
                r = math.sqrt(v.real * v.real + v.imag * v.imag)
                excess = r - thresh
                if excess < 0.0:
                    excess = 0.0
                out[f, k] = v * (1.0 - excess / (r + gamma))
        return out


NUMPY_IMPL = {
    "papr_linear": _papr_linear_np,
    "clip": _clip_np,
    "compand": _compand_np,
    "expand": _expand_np,
    "soft_clip": _soft_clip_np,
}

NUMBA_IMPL = (
    {
        "papr_linear": _papr_linear_nb,
        "clip": _clip_nb,
        "compand": _compand_nb,
        "expand": _expand_nb,
        "soft_clip": _soft_clip_nb,
    }
    if HAVE_NUMBA
    else None
)

_ACTIVE = NUMBA_IMPL if (HAVE_NUMBA and not _DISABLE) else NUMPY_IMPL


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if _ACTIVE is NUMBA_IMPL else "numpy"


papr_linear = _ACTIVE["papr_linear"]
clip = _ACTIVE["clip"]
compand = _ACTIVE["compand"]
expand = _ACTIVE["expand"]
soft_clip = _ACTIVE["soft_clip"]
