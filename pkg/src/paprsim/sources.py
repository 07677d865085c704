"""Frequency-domain symbol generators.

Three sources feed the simulator: a 16QAM digital reference, a
correlated circular-Gaussian surrogate for analog learned
constellations, and a reader for real latent streams stored in SYMF
files. Gaussian and file frames are RMS-normalized per frame so the
mean symbol power is exactly one; 16QAM has unit average power by
constellation scaling.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .core import FrequencyFrame
from .errors import ConfigError, EndOfStreamError
from .rng import frame_rng
from .symf import read_symf

# 16QAM Gray mapping: index bits b3 b2 b1 b0 give I from b3 b2 and Q from
# b1 b0, with the two-bit Gray code 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
# Scaling by 1/sqrt(10) makes the constellation unit average power.
_GRAY_LEVELS = np.array([-3.0, -1.0, +3.0, +1.0])
QAM16_CONSTELLATION = (
    _GRAY_LEVELS[(np.arange(16) >> 2) & 3] + 1j * _GRAY_LEVELS[np.arange(16) & 3]
) / np.sqrt(10.0)

SOURCE_KINDS = ("qam16", "gaussian_surrogate", "latent_file")


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    n_subcarriers: int
    path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ConfigError(f"unknown source kind {self.kind!r}, expected one of {SOURCE_KINDS}")
        if (self.path is not None) != (self.kind == "latent_file"):
            raise ConfigError("path must be given exactly when kind is 'latent_file'")
        if self.n_subcarriers < 1:
            raise ConfigError(f"n_subcarriers must be positive, got {self.n_subcarriers}")


class FrameSource:
    """Stream of frequency frames. One reader per stream handle."""

    n_subcarriers: int

    def frame_symbols(self, index: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def batch_symbols(self, master_seed: int, indices) -> np.ndarray:
        """Frames for the given indices, each from its own per-frame stream.

        Frame i depends only on (master_seed, i), so any partition of the
        index range across workers reproduces the same symbols.
        """
        indices = np.asarray(indices)
        out = np.empty((indices.size, self.n_subcarriers), dtype=np.complex128)
        for row, i in enumerate(indices):
            out[row] = self.frame_symbols(int(i), frame_rng(master_seed, int(i)))
        return out

    def __len__(self):
        raise TypeError(f"{type(self).__name__} is unbounded")


class Qam16Source(FrameSource):
    """Uniform draws from the Gray-mapped 16QAM constellation."""

    def __init__(self, n_subcarriers: int):
        self.n_subcarriers = n_subcarriers

    def frame_symbols(self, index, rng):
        return QAM16_CONSTELLATION[rng.integers(0, 16, size=self.n_subcarriers)]


class GaussianSource(FrameSource):
    """Correlated circular complex Gaussian symbols, RMS-normalized per frame.

    Stand-in for learned analog constellations. Entries of a latent
    vector are locally correlated (neighbors share receptive fields),
    and carriers that add coherently pile up into time-domain peaks, so
    the peak statistics of such streams sit above those of independent
    discrete constellations, with the gap widening as the carrier count
    grows. A first-order recursion gives adjacent symbols the requested
    correlation; correlation=0 recovers the independent case.
    """

    def __init__(self, n_subcarriers: int, correlation: float = 0.5):
        if not 0.0 <= correlation < 1.0:
            raise ConfigError(f"correlation must be in [0, 1), got {correlation}")
        self.n_subcarriers = n_subcarriers
        self.correlation = correlation

    def frame_symbols(self, index, rng):
        n = self.n_subcarriers
        w = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        a = self.correlation
        if a > 0.0 and n > 1:
            # stationary start: z_0 = w_0, then z_k = a z_{k-1} + sqrt(1-a^2) w_k,
            # so every symbol keeps unit variance and lag-1 correlation a
            z = np.empty_like(w)
            z[0] = w[0]
            z[1:], _ = lfilter(
                [np.sqrt(1.0 - a * a)], [1.0, -a], w[1:], zi=np.array([a * w[0]])
            )
        else:
            z = w
        return z / np.sqrt(np.mean(np.abs(z) ** 2))


class LatentFileSource(FrameSource):
    """Frames from a SYMF file, RMS-normalized per frame on read.

    Supports both sequential reads (generate_frame) and random access by
    frame index; reading past the stored frame count raises
    EndOfStreamError.
    """

    def __init__(self, path):
        stored = read_symf(path)
        self.path = path
        self.n_subcarriers = stored.shape[1]
        self._frames = stored.astype(np.complex128)
        self._cursor = 0

    def __len__(self):
        return self._frames.shape[0]

    def frame_symbols(self, index, rng=None):
        if index >= len(self) or index < 0:
            raise EndOfStreamError(
                f"{self.path}: frame {index} requested but file holds {len(self)}"
            )
        z = self._frames[index]
        power = np.mean(np.abs(z) ** 2)
        if power > 0:
            z = z / np.sqrt(power)
        return z

    def next_symbols(self) -> np.ndarray:
        z = self.frame_symbols(self._cursor)
        self._cursor += 1
        return z


def make_source(spec: SourceSpec) -> FrameSource:
    if spec.kind == "qam16":
        return Qam16Source(spec.n_subcarriers)
    if spec.kind == "gaussian_surrogate":
        return GaussianSource(spec.n_subcarriers)
    source = LatentFileSource(spec.path)
    if source.n_subcarriers != spec.n_subcarriers:
        raise ConfigError(
            f"{spec.path} holds N={source.n_subcarriers} frames, spec says N={spec.n_subcarriers}"
        )
    return source


def generate_frame(source: FrameSource, rng: np.random.Generator) -> FrequencyFrame:
    """Next frame from the stream (sequential for file sources)."""
    if isinstance(source, LatentFileSource):
        return FrequencyFrame(source.next_symbols())
    return FrequencyFrame(source.frame_symbols(0, rng))
