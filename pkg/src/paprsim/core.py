"""Complex baseband primitives: frame types, unitary IFFT/FFT, AWGN channel.

Transforms use the unitary convention (1/sqrt(N) in both directions), so
a frame carries the same energy in the frequency and time domains and a
unit-power symbol frame stays unit power after modulation.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError, UndefinedInputError


def _as_complex_vector(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise ShapeError(f"{what} must be a 1-D sequence, got shape {arr.shape}")
    return arr


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass
class FrequencyFrame:
    """One OFDM frame of N complex subcarrier symbols (frequency domain)."""

    symbols: np.ndarray
    n_subcarriers: int = 0

    def __post_init__(self):
        self.symbols = _as_complex_vector(self.symbols, "symbols")
        if self.n_subcarriers == 0:
            self.n_subcarriers = self.symbols.size
        elif self.n_subcarriers != self.symbols.size:
            raise ShapeError(
                f"n_subcarriers={self.n_subcarriers} but frame holds {self.symbols.size} symbols"
            )

    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.symbols) ** 2))


@dataclass
class TimeFrame:
    """One OFDM symbol of N complex time-domain samples."""

    samples: np.ndarray
    n_subcarriers: int = 0

    def __post_init__(self):
        self.samples = _as_complex_vector(self.samples, "samples")
        if self.n_subcarriers == 0:
            self.n_subcarriers = self.samples.size
        elif self.n_subcarriers != self.samples.size:
            raise ShapeError(
                f"n_subcarriers={self.n_subcarriers} but frame holds {self.samples.size} samples"
            )

    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))


@dataclass(frozen=True)
class NoiseSpec:
    """AWGN level: per-complex-sample noise variance and the matching SNR.

    sigma_squared is the total variance of one complex noise sample (real
    and imaginary parts carry sigma_squared/2 each). The SNR relation
    assumes unit signal power: sigma_squared = 10**(-snr_db/10).
    """

    snr_db: float
    sigma_squared: float

    def __post_init__(self):
        if self.sigma_squared < 0:
            raise ConfigError(f"sigma_squared must be >= 0, got {self.sigma_squared}")
        if self.sigma_squared > 0:
            implied = -10.0 * np.log10(self.sigma_squared)
            if abs(implied - self.snr_db) > 1e-9 * max(1.0, abs(self.snr_db)):
                raise ConfigError(
                    f"inconsistent NoiseSpec: snr_db={self.snr_db} implies "
                    f"sigma_squared={10.0 ** (-self.snr_db / 10.0)}, got {self.sigma_squared}"
                )

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "NoiseSpec":
        return cls(snr_db=float(snr_db), sigma_squared=10.0 ** (-float(snr_db) / 10.0))

    @classmethod
    def noiseless(cls) -> "NoiseSpec":
        return cls(snr_db=float("inf"), sigma_squared=0.0)


def _check_n(n: int):
    if not _is_power_of_two(n):
        raise ConfigError(f"number of subcarriers must be a power of two, got {n}")


def ifft_batch(symbols: np.ndarray) -> np.ndarray:
    """Unitary inverse FFT along the last axis (frequency -> time)."""
    _check_n(symbols.shape[-1])
    return np.fft.ifft(symbols, norm="ortho", axis=-1)


def fft_batch(samples: np.ndarray) -> np.ndarray:
    """Unitary forward FFT along the last axis (time -> frequency)."""
    _check_n(samples.shape[-1])
    return np.fft.fft(samples, norm="ortho", axis=-1)


def ifft(frame: FrequencyFrame) -> TimeFrame:
    """Modulate a frequency frame onto N subcarriers (unitary IFFT)."""
    return TimeFrame(ifft_batch(frame.symbols), frame.n_subcarriers)


def fft(frame: TimeFrame) -> FrequencyFrame:
    """Demodulate a time frame back to subcarrier symbols (unitary FFT)."""
    return FrequencyFrame(fft_batch(frame.samples), frame.n_subcarriers)


def awgn_batch(samples: np.ndarray, sigma_squared: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise of total variance sigma_squared per sample."""
    if sigma_squared < 0:
        raise ConfigError(f"sigma_squared must be >= 0, got {sigma_squared}")
    if sigma_squared == 0:
        return samples.copy()
    scale = np.sqrt(sigma_squared / 2.0)
    noise = rng.standard_normal(samples.shape) + 1j * rng.standard_normal(samples.shape)
    return samples + scale * noise


def awgn(frame: TimeFrame, noise: NoiseSpec, rng: np.random.Generator) -> TimeFrame:
    """Pass a time frame through the AWGN channel, deterministically per rng stream."""
    return TimeFrame(awgn_batch(frame.samples, noise.sigma_squared, rng), frame.n_subcarriers)


def require_nonzero(values: np.ndarray, what: str = "frame"):
    """Raise UndefinedInputError if every sample is exactly zero."""
    if not np.any(values):
        raise UndefinedInputError(f"operation undefined for an all-zero {what}")
