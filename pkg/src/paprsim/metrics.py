"""PAPR, empirical CCDF, and symbol-domain distortion measures."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import TimeFrame, require_nonzero
from .errors import ConfigError, ShapeError, UndefinedInputError


@dataclass(frozen=True)
class PaprSample:
    """Peak-to-average power ratio of one OFDM symbol, in dB."""

    value_db: float

    def __post_init__(self):
        if self.value_db < -1e-12:
            raise ValueError(f"PAPR cannot be below 0 dB, got {self.value_db}")


@dataclass
class CcdfCurve:
    """Empirical exceedance probabilities of PAPR over a threshold grid."""

    thresholds_db: np.ndarray
    exceedance: np.ndarray
    n_samples: int

    def __post_init__(self):
        self.thresholds_db = np.asarray(self.thresholds_db, dtype=float)
        self.exceedance = np.asarray(self.exceedance, dtype=float)
        if self.thresholds_db.shape != self.exceedance.shape:
            raise ShapeError("thresholds and exceedance must have equal length")
        if np.any(np.diff(self.thresholds_db) <= 0):
            raise ConfigError("threshold grid must be strictly ascending")
        if np.any((self.exceedance < 0) | (self.exceedance > 1)):
            raise ValueError("exceedance probabilities must lie in [0, 1]")
        if np.any(np.diff(self.exceedance) > 0):
            raise ValueError("exceedance must be non-increasing along the grid")

    def at(self, threshold_db: float) -> float:
        """Exceedance at one grid threshold (exact grid match required)."""
        idx = np.nonzero(np.isclose(self.thresholds_db, threshold_db, atol=1e-12))[0]
        if idx.size == 0:
            raise ConfigError(f"threshold {threshold_db} is not on the grid")
        return float(self.exceedance[idx[0]])

    def threshold_at_ccdf(self, level: float) -> float:
        """Smallest grid threshold whose exceedance is <= level.

        This is the usual "PAPR at CCDF=level" figure readout.
        """
        below = np.nonzero(self.exceedance <= level)[0]
        if below.size == 0:
            return float(self.thresholds_db[-1])
        return float(self.thresholds_db[below[0]])

    def to_csv_text(self) -> str:
        lines = ["papr_db,ccdf"]
        for t, p in zip(self.thresholds_db, self.exceedance):
            lines.append(f"{float(t)!r},{float(p)!r}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())


@dataclass(frozen=True)
class DistortionReport:
    """Symbol-domain distortion: MSE, EVM in dB, and PSNR in dB."""

    mse: float
    evm_db: float
    psnr_db: float

    def __post_init__(self):
        if self.mse < 0:
            raise ValueError(f"mse must be >= 0, got {self.mse}")
        if (self.mse == 0.0) != (self.psnr_db == float("inf")):
            raise ValueError("psnr_db must be +inf exactly when mse is 0")


def default_threshold_grid() -> np.ndarray:
    """0 to 14 dB in 0.1 dB steps, covering the usual CCDF figure span."""
    return np.array([i / 10 for i in range(141)])


def papr_db_batch(samples: np.ndarray) -> np.ndarray:
    """Per-row PAPR in dB for a (n_frames, N) batch of time-domain samples."""
    return 10.0 * np.log10(_kernels.papr_linear(samples))


def papr_db(frame: TimeFrame) -> PaprSample:
    """PAPR of one OFDM symbol: 10*log10(max |y_k|^2 / mean |y_k|^2)."""
    require_nonzero(frame.samples)
    return PaprSample(float(papr_db_batch(frame.samples[None, :])[0]))


def exceed_counts(samples_db: np.ndarray, thresholds_db: np.ndarray) -> np.ndarray:
    """Number of samples strictly greater than each threshold.

    Counts from disjoint sample partitions add, so parallel workers can
    each count their share and the merged curve is partition-independent.
    """
    ordered = np.sort(np.asarray(samples_db, dtype=float))
    return ordered.size - np.searchsorted(ordered, thresholds_db, side="right")


def ccdf_from_counts(counts: np.ndarray, n_samples: int, thresholds_db: np.ndarray) -> CcdfCurve:
    return CcdfCurve(thresholds_db, np.asarray(counts) / n_samples, n_samples)


def estimate_ccdf(samples, thresholds_db=None) -> CcdfCurve:
    """Empirical CCDF(t) = P{PAPR > t} over the threshold grid."""
    if thresholds_db is None:
        thresholds_db = default_threshold_grid()
    thresholds_db = np.asarray(thresholds_db, dtype=float)
    if np.any(np.diff(thresholds_db) <= 0):
        raise ConfigError("threshold grid must be strictly ascending")
    values = np.array([s.value_db if isinstance(s, PaprSample) else float(s) for s in samples])
    if values.size == 0:
        raise UndefinedInputError("cannot estimate a CCDF from zero samples")
    return ccdf_from_counts(exceed_counts(values, thresholds_db), values.size, thresholds_db)


def distortion(reference, received, peak: float = 1.0) -> DistortionReport:
    """Distortion of a received symbol vector against its reference.

    mse is the mean squared error |ref - rec|^2, evm_db the error-to-signal
    energy ratio in dB, and psnr_db uses the given peak amplitude
    (1.0 for unit-normalized symbol vectors).
    """
    ref = np.asarray(getattr(reference, "symbols", reference))
    rec = np.asarray(getattr(received, "symbols", received))
    if ref.shape != rec.shape:
        raise ShapeError(f"shape mismatch: reference {ref.shape} vs received {rec.shape}")
    err_energy = float(np.sum(np.abs(ref - rec) ** 2))
    ref_energy = float(np.sum(np.abs(ref) ** 2))
    if ref_energy == 0:
        raise UndefinedInputError("EVM undefined for an all-zero reference")
    mse = err_energy / ref.size
    evm_db = float("-inf") if err_energy == 0 else 10.0 * np.log10(err_energy / ref_energy)
    psnr_db = float("inf") if mse == 0 else 10.0 * np.log10(peak * peak / mse)
    return DistortionReport(mse=mse, evm_db=evm_db, psnr_db=psnr_db)
