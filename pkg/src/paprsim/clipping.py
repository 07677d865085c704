"""Amplitude clipping at a threshold tied to the frame RMS.

Samples whose magnitude reaches rho * sqrt(mean power) are pulled down to
that threshold with their phase kept; everything below passes through.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import TimeFrame, require_nonzero
from .errors import ConfigError


@dataclass(frozen=True)
class ClipConfig:
    """rho is the clipping ratio: threshold amplitude over frame RMS."""

    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ConfigError(f"rho must be > 0, got {self.rho}")


def clip_batch(samples: np.ndarray, rho: float) -> np.ndarray:
    """Clip each row of a (n_frames, N) batch at rho times its own RMS."""
    return _kernels.clip(samples, rho)


def clip(frame: TimeFrame, cfg: ClipConfig) -> TimeFrame:
    """Clip one OFDM symbol; the threshold uses its pre-clip mean power."""
    require_nonzero(frame.samples)
    return TimeFrame(clip_batch(frame.samples[None, :], cfg.rho)[0], frame.n_subcarriers)
