"""Differentiable PAPR loss and soft clipping with analytic gradients.

Gradients follow the real-pair convention: for a complex array z, the
gradient G satisfies dL = Re(sum(conj(G) * dz)), i.e. G[k] packs
dL/dRe(z[k]) + j*dL/dIm(z[k]). Everything here is verified against
central finite differences by grad_check.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import FrequencyFrame, TimeFrame, fft, ifft, require_nonzero
from .errors import ConfigError

_REL_FLOOR = 1e-12


@dataclass(frozen=True)
class LossWeights:
    """Trade-off weight for the reconstruction + peak-power objective."""

    lambda_: float

    def __post_init__(self):
        if self.lambda_ < 0:
            raise ConfigError(f"lambda_ must be >= 0, got {self.lambda_}")


@dataclass(frozen=True)
class SoftClipConfig:
    rho: float
    gamma: float = 1e-12

    def __post_init__(self):
        if self.rho <= 0:
            raise ConfigError(f"rho must be > 0, got {self.rho}")
        if self.gamma <= 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    probe_count: int
    step: float


def papr_loss(frame: FrequencyFrame, db: bool = False):
    """Per-frame PAPR of the modulated signal and its gradient.

    Returns (value, gradient w.r.t. the frequency symbols). The value is
    the linear ratio max|y|^2 / mean|y|^2 by default; db=True returns the
    same quantity in dB with the gradient rescaled to match. The max is
    handled by subgradient at the first argmax sample.
    """
    require_nonzero(frame.symbols, "papr_loss input")
    y = ifft(frame).samples
    power = np.abs(y) ** 2
    peak_index = int(np.argmax(power))
    peak = power[peak_index]
    mean = float(np.mean(power))
    value = peak / mean

    n = y.shape[0]
    grad_y = (-2.0 * value / (mean * n)) * y
    grad_y[peak_index] += (2.0 / mean) * y[peak_index]
    if db:
        scale = 10.0 / (math.log(10.0) * value)
        value = 10.0 * math.log10(value)
        grad_y *= scale
    grad = fft(TimeFrame(grad_y, frame.n_subcarriers)).symbols
    return float(value), grad


def combined_loss(mse_term: float, papr_term: float, w: LossWeights) -> float:
    return mse_term + w.lambda_ * papr_term


@dataclass(frozen=True)
class SoftClipGradOp:
    """Jacobian action of one soft-clip application at a fixed input.

    jvp maps an input perturbation to the output perturbation, vjp maps
    an output cotangent back to the input. With through_mean=False the
    threshold rho*mean|y| is a constant of the differentiation; with
    through_mean=True its dependence on every sample is chained in.
    """

    samples: np.ndarray
    rho: float
    gamma: float
    through_mean: bool
    threshold: float = field(init=False)
    _radius: np.ndarray = field(init=False)
    _scale: np.ndarray = field(init=False)
    _scale_slope: np.ndarray = field(init=False)
    _active: np.ndarray = field(init=False)

    def __post_init__(self):
        r = np.abs(self.samples)
        t = self.rho * float(np.mean(r))
        active = r > t
        scale = 1.0 - np.maximum(r - t, 0.0) / (r + self.gamma)
        slope = np.where(active, -(t + self.gamma) / (r + self.gamma) ** 2, 0.0)
        object.__setattr__(self, "threshold", t)
        object.__setattr__(self, "_radius", r)
        object.__setattr__(self, "_scale", scale)
        object.__setattr__(self, "_scale_slope", slope)
        object.__setattr__(self, "_active", active)

    def apply(self, samples: np.ndarray, recompute_threshold: bool = False) -> np.ndarray:
        """Soft-clip arbitrary samples; the frozen threshold is the default."""
        r = np.abs(samples)
        t = self.rho * float(np.mean(r)) if recompute_threshold else self.threshold
        return samples * (1.0 - np.maximum(r - t, 0.0) / (r + self.gamma))

    def _radius_rate(self, dy: np.ndarray) -> np.ndarray:
        # d|y|/dt = Re(conj(y) dy)/|y|; 0 chosen at the origin
        rate = np.real(np.conj(self.samples) * dy)
        return np.divide(rate, self._radius, out=np.zeros_like(rate), where=self._radius > 0)

    def jvp(self, dy: np.ndarray) -> np.ndarray:
        dr = self._radius_rate(dy)
        out = self._scale * dy + self.samples * (self._scale_slope * dr)
        if self.through_mean:
            dt = self.rho * float(np.mean(dr))
            out += self.samples * (self._active / (self._radius + self.gamma)) * dt
        return out

    def vjp(self, cotangent: np.ndarray) -> np.ndarray:
        align = np.real(np.conj(cotangent) * self.samples)
        radial = np.divide(
            self._scale_slope * align,
            self._radius,
            out=np.zeros_like(align),
            where=self._radius > 0,
        )
        grad = self._scale * cotangent + radial * self.samples
        if self.through_mean:
            kappa = float(np.sum(align * self._active / (self._radius + self.gamma)))
            unit = np.divide(
                self.samples,
                self._radius,
                out=np.zeros_like(self.samples),
                where=self._radius > 0,
            )
            grad += (kappa * self.rho / self.samples.shape[0]) * unit
        return grad


def soft_clip(frame: TimeFrame, cfg: SoftClipConfig, through_mean: bool = False):
    """Differentiable magnitude limiter y*(1 - relu(|y|-rho*ybar)/(|y|+gamma)).

    ybar is the frame mean amplitude. Returns the clipped frame and the
    gradient operator taken at this input.
    """
    out = _kernels.soft_clip(frame.samples[None, :], cfg.rho, cfg.gamma)[0]
    op = SoftClipGradOp(
        samples=frame.samples.copy(),
        rho=cfg.rho,
        gamma=cfg.gamma,
        through_mean=through_mean,
    )
    return TimeFrame(out, frame.n_subcarriers), op


def _rel_error(analytic, numeric) -> float:
    diff = np.abs(np.asarray(analytic) - np.asarray(numeric))
    floor = np.maximum(
        np.maximum(np.abs(np.asarray(analytic)), np.abs(np.asarray(numeric))),
        _REL_FLOOR,
    )
    return float(np.max(diff / floor))


def _random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def _papr_probe(rng: np.random.Generator, step: float, n: int) -> float:
    # degenerate max: resample until the two largest peaks split by > 1%
    for _ in range(1000):
        z = _random_complex(rng, n)
        power = np.abs(ifft(FrequencyFrame(z)).samples) ** 2
        top = np.sort(power)[-2:]
        if (top[1] - top[0]) / top[1] > 1e-2:
            break
    else:
        raise ArithmeticError("no well-separated argmax found in 1000 draws")

    _, grad = papr_loss(FrequencyFrame(z))
    d = _random_complex(rng, n)

    def value(symbols):
        return papr_loss(FrequencyFrame(symbols))[0]

    numeric = (value(z + step * d) - value(z - step * d)) / (2.0 * step)
    analytic = float(np.sum(np.real(np.conj(grad) * d)))
    return _rel_error(analytic, numeric)


def _soft_clip_probe(
    rng: np.random.Generator,
    step: float,
    n: int,
    cfg: SoftClipConfig,
    through_mean: bool,
) -> float:
    # rectifier kink: resample until every radius clears the threshold band
    for _ in range(1000):
        y = _random_complex(rng, n)
        r = np.abs(y)
        t = cfg.rho * float(np.mean(r))
        if float(np.min(np.abs(r - t))) > 10.0 * step:
            break
    else:
        raise ArithmeticError("no kink-free frame found in 1000 draws")

    _, op = soft_clip(TimeFrame(y), cfg, through_mean=through_mean)
    d = _random_complex(rng, n)
    g = _random_complex(rng, n)

    def forward(samples):
        return op.apply(samples, recompute_threshold=through_mean)

    numeric_jvp = (forward(y + step * d) - forward(y - step * d)) / (2.0 * step)
    jvp_err = _rel_error(op.jvp(d), numeric_jvp)

    def paired(samples):
        return float(np.sum(np.real(np.conj(g) * forward(samples))))

    numeric_pair = (paired(y + step * d) - paired(y - step * d)) / (2.0 * step)
    analytic_pair = float(np.sum(np.real(np.conj(op.vjp(g)) * d)))
    vjp_err = _rel_error(analytic_pair, numeric_pair)
    return max(jvp_err, vjp_err)


GRAD_CHECK_OPS = ("papr_loss", "soft_clip")


def grad_check(
    op_id: str,
    trials: int,
    step: float,
    rng: np.random.Generator,
    n_subcarriers: int = 32,
    rho: float = 1.4,
    through_mean: bool = False,
) -> GradCheckReport:
    """Compare analytic gradients with central differences on random probes.

    Probes landing in non-differentiable neighbourhoods (argmax near-ties
    for the loss, rectifier kinks for the clipper) are rejected and
    redrawn. Returns the worst relative error over all probes.
    """
    if op_id not in GRAD_CHECK_OPS:
        raise ConfigError(f"unknown grad_check op {op_id!r}, expected one of {GRAD_CHECK_OPS}")
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if step <= 0:
        raise ConfigError(f"step must be > 0, got {step}")

    cfg = SoftClipConfig(rho=rho)
    worst = 0.0
    for _ in range(trials):
        if op_id == "papr_loss":
            err = _papr_probe(rng, step, n_subcarriers)
        else:
            err = _soft_clip_probe(rng, step, n_subcarriers, cfg, through_mean)
        worst = max(worst, err)
    return GradCheckReport(max_rel_error=worst, probe_count=trials, step=step)
