"""Seeded Monte-Carlo experiment runner.

Wires source -> technique -> AWGN channel -> inverse -> metrics and
reduces the results to CSV. Every random draw comes from a stream keyed
by (master_seed, purpose, frame_index), and per-frame results land in
preallocated arrays at their frame index, so any partition of the frame
range across workers produces byte-identical output files.
"""

import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .companding import expand_batch, recover_v_prime_batch
from .core import NoiseSpec, awgn_batch, fft_batch, ifft_batch, _is_power_of_two
from .errors import ConfigError, FileError
from .metrics import (
    CcdfCurve,
    DistortionReport,
    default_threshold_grid,
    estimate_ccdf,
    papr_db_batch,
)
from .pts import PtsConfig, pts_receive_batch, pts_transmit_batch
from .rng import noise_rng
from .slm import SlmConfig, slm_receive_batch, slm_transmit_batch
from .sources import SourceSpec, make_source

TECHNIQUE_KINDS = ("none", "clip", "compand", "slm", "pts", "softclip")

# frames processed per work unit; small enough to parallelize 1e4-frame
# runs, large enough to amortize per-call overhead
_CHUNK_FRAMES = 2048


@dataclass(frozen=True)
class TechniqueConfig:
    """One transmitter-side technique with its parameters.

    Only the fields the kind uses are validated; the rest keep their
    defaults and are ignored. seed=None defers to the experiment's
    master seed (shared codebook assumption: both link ends derive the
    same phase sequences).
    """

    kind: str = "none"
    rho: float = 1.4
    mu: float = 4.0
    v: int = 4
    m_trials: int = 16
    gamma: float = 1e-12
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in TECHNIQUE_KINDS:
            raise ConfigError(
                f"unknown technique {self.kind!r}, expected one of {TECHNIQUE_KINDS}"
            )
        if self.kind in ("clip", "softclip") and self.rho <= 0:
            raise ConfigError(f"rho must be > 0, got {self.rho}")
        if self.kind == "compand" and self.mu <= 0:
            raise ConfigError(f"mu must be > 0, got {self.mu}")
        if self.kind in ("slm", "pts") and self.v < 1:
            raise ConfigError(f"v must be >= 1, got {self.v}")
        if self.kind == "pts" and self.m_trials < 1:
            raise ConfigError(f"m_trials must be >= 1, got {self.m_trials}")
        if self.kind == "softclip" and self.gamma <= 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")

    def resolved_seed(self, master_seed: int) -> int:
        return master_seed if self.seed is None else self.seed

    def slm_config(self, master_seed: int) -> SlmConfig:
        return SlmConfig(v_candidates=self.v, rng_seed=self.resolved_seed(master_seed))

    def pts_config(self, master_seed: int) -> PtsConfig:
        return PtsConfig(
            v_partitions=self.v,
            m_trials=self.m_trials,
            rng_seed=self.resolved_seed(master_seed),
        )

    def describe(self) -> str:
        """Short parameter tag, e.g. for file names and run logs."""
        if self.kind == "clip":
            return f"clip(rho={self.rho})"
        if self.kind == "compand":
            return f"compand(mu={self.mu})"
        if self.kind == "slm":
            return f"slm(v={self.v},seed={self.seed})"
        if self.kind == "pts":
            return f"pts(v={self.v},m={self.m_trials},seed={self.seed})"
        if self.kind == "softclip":
            return f"softclip(rho={self.rho},gamma={self.gamma})"
        return "none"


@dataclass(frozen=True)
class ExperimentSpec:
    source: SourceSpec
    technique: TechniqueConfig
    n_frames: int
    master_seed: int = 0
    snr_db: tuple = ()
    workers: int = 1
    out: Optional[str] = None
    papr_out: Optional[str] = None

    def __post_init__(self):
        if self.n_frames < 1:
            raise ConfigError(f"frames must be >= 1, got {self.n_frames}")
        if self.master_seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.master_seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))

    @property
    def n_subcarriers(self) -> int:
        return self.source.n_subcarriers

    def canonical_key(self) -> str:
        """Everything that determines the numbers, nothing that doesn't."""
        return "|".join(
            [
                f"source={self.source.kind}:{self.source.n_subcarriers}:{self.source.path}",
                f"technique={self.technique.describe()}",
                f"frames={self.n_frames}",
                f"seed={self.master_seed}",
                f"snr={','.join(repr(s) for s in self.snr_db)}",
            ]
        )

    def spec_hash(self) -> str:
        return hashlib.sha256(self.canonical_key().encode()).hexdigest()


@dataclass(frozen=True)
class RunRecord:
    """Results of one experiment, reproducible from (spec, master_seed)."""

    spec_hash: str
    papr_db: np.ndarray
    ccdf: CcdfCurve
    distortion: tuple
    wall_time_s: float


def transmit_batch(symbols: np.ndarray, technique: TechniqueConfig, master_seed: int = 0):
    """Modulate a (n_frames, N) symbol batch with the technique applied.

    Returns (time samples, side info array or None). Side info is the
    per-frame selected candidate/trial index for slm and pts.
    """
    kind = technique.kind
    if kind == "slm":
        return slm_transmit_batch(symbols, technique.slm_config(master_seed))
    if kind == "pts":
        return pts_transmit_batch(symbols, technique.pts_config(master_seed))
    samples = ifft_batch(symbols)
    if kind == "clip":
        return _kernels.clip(samples, technique.rho), None
    if kind == "compand":
        return _kernels.compand(samples, technique.mu), None
    if kind == "softclip":
        return _kernels.soft_clip(samples, technique.rho, technique.gamma), None
    return samples, None


def receive_batch(
    samples: np.ndarray,
    technique: TechniqueConfig,
    side_info: Optional[np.ndarray] = None,
    master_seed: int = 0,
) -> np.ndarray:
    """Demodulate received time samples and undo the technique where it
    has an inverse (compand, slm, pts); clip and softclip distortion is
    measured against the original symbols instead."""
    kind = technique.kind
    if kind == "compand":
        v_prime = recover_v_prime_batch(samples, technique.mu)
        return fft_batch(expand_batch(samples, technique.mu, v_prime))
    symbols = fft_batch(samples)
    if kind == "slm":
        return slm_receive_batch(symbols, side_info, technique.slm_config(master_seed))
    if kind == "pts":
        return pts_receive_batch(symbols, side_info, technique.pts_config(master_seed))
    return symbols


def _frame_chunks(n_frames: int):
    return [
        range(start, min(start + _CHUNK_FRAMES, n_frames))
        for start in range(0, n_frames, _CHUNK_FRAMES)
    ]


def _run_chunks(work, n_frames: int, workers: int):
    spans = _frame_chunks(n_frames)
    if workers <= 1 or len(spans) == 1:
        for span in spans:
            work(span)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for future in [pool.submit(work, span) for span in spans]:
            future.result()


def _write_text(path, text: str):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc}") from exc


def papr_csv_text(papr_db: np.ndarray) -> str:
    lines = ["frame,papr_db"]
    for i, value in enumerate(papr_db):
        lines.append(f"{i},{float(value)!r}")
    return "\n".join(lines) + "\n"


def sweep_csv_text(distortion) -> str:
    lines = ["snr_db,mse,evm_db"]
    for snr, report in distortion:
        lines.append(f"{float(snr)!r},{report.mse!r},{report.evm_db!r}")
    return "\n".join(lines) + "\n"


def run_ccdf_experiment(spec: ExperimentSpec) -> RunRecord:
    """Transmit n_frames frames and tabulate the PAPR exceedance curve.

    Writes the CCDF CSV to spec.out and the per-frame PAPR stream to
    spec.papr_out when those paths are set.
    """
    start = time.perf_counter()
    source = make_source(spec.source)
    papr = np.empty(spec.n_frames)

    def work(span):
        indices = np.arange(span.start, span.stop)
        symbols = source.batch_symbols(spec.master_seed, indices)
        samples, _ = transmit_batch(symbols, spec.technique, spec.master_seed)
        papr[span.start : span.stop] = papr_db_batch(samples)

    _run_chunks(work, spec.n_frames, spec.workers)
    curve = estimate_ccdf(papr, default_threshold_grid())
    record = RunRecord(
        spec_hash=spec.spec_hash(),
        papr_db=papr,
        ccdf=curve,
        distortion=(),
        wall_time_s=time.perf_counter() - start,
    )
    if spec.out is not None:
        _write_text(spec.out, curve.to_csv_text())
    if spec.papr_out is not None:
        _write_text(spec.papr_out, papr_csv_text(papr))
    return record


def run_distortion_sweep(spec: ExperimentSpec, snr_grid=None) -> RunRecord:
    """Full chain per SNR point; mean symbol-domain distortion over frames.

    The transmitted signal is computed once per frame and reused across
    SNR points; each (snr, frame) pair draws noise from its own stream.
    An infinite snr_db entry means a noiseless channel.
    """
    start = time.perf_counter()
    grid = tuple(float(s) for s in (spec.snr_db if snr_grid is None else snr_grid))
    if not grid:
        raise ConfigError("snr-db grid must not be empty for a distortion sweep")
    noises = [
        NoiseSpec.noiseless() if math.isinf(s) else NoiseSpec.from_snr_db(s) for s in grid
    ]
    source = make_source(spec.source)
    n = spec.n_subcarriers
    papr = np.empty(spec.n_frames)
    err_energy = np.zeros((len(grid), spec.n_frames))
    ref_energy = np.zeros(spec.n_frames)

    def work(span):
        indices = np.arange(span.start, span.stop)
        symbols = source.batch_symbols(spec.master_seed, indices)
        samples, side_info = transmit_batch(symbols, spec.technique, spec.master_seed)
        papr[span.start : span.stop] = papr_db_batch(samples)
        ref_energy[span.start : span.stop] = np.sum(np.abs(symbols) ** 2, axis=1)
        for j, noise in enumerate(noises):
            received = np.empty_like(samples)
            for row, i in enumerate(indices):
                rng = noise_rng(spec.master_seed, j, int(i))
                received[row] = awgn_batch(samples[row], noise.sigma_squared, rng)
            recovered = receive_batch(received, spec.technique, side_info, spec.master_seed)
            err = np.sum(np.abs(recovered - symbols) ** 2, axis=1)
            err_energy[j, span.start : span.stop] = err

    _run_chunks(work, spec.n_frames, spec.workers)

    total_ref = float(np.sum(ref_energy))
    reports = []
    for j, snr in enumerate(grid):
        total_err = float(np.sum(err_energy[j]))
        mse = total_err / (spec.n_frames * n)
        evm_db = float("-inf") if total_err == 0 else 10.0 * math.log10(total_err / total_ref)
        psnr_db = float("inf") if mse == 0 else 10.0 * math.log10(1.0 / mse)
        reports.append((snr, DistortionReport(mse=mse, evm_db=evm_db, psnr_db=psnr_db)))
    distortion = tuple(reports)

    record = RunRecord(
        spec_hash=spec.spec_hash(),
        papr_db=papr,
        ccdf=estimate_ccdf(papr, default_threshold_grid()),
        distortion=distortion,
        wall_time_s=time.perf_counter() - start,
    )
    if spec.out is not None:
        _write_text(spec.out, sweep_csv_text(distortion))
    if spec.papr_out is not None:
        _write_text(spec.papr_out, papr_csv_text(papr))
    return record


# -- config files ------------------------------------------------------

CONFIG_KEYS = (
    "source",
    "n",
    "frames",
    "technique",
    "rho",
    "mu",
    "v",
    "m-trials",
    "gamma",
    "snr-db",
    "seed",
    "workers",
    "out",
    "papr-out",
)

_DEFAULTS = {
    "source": "gaussian",
    "n": "64",
    "frames": "100000",
    "technique": "none",
    "seed": "0",
    "workers": "1",
}


def _parse_int(values: dict, key: str, minimum: int) -> int:
    raw = values[key]
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    return value


def _parse_positive_float(values: dict, key: str) -> float:
    raw = values[key]
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None
    if value <= 0 or math.isnan(value):
        raise ConfigError(f"{key} must be > 0, got {raw}")
    return value


def _parse_source(text: str, n: int) -> SourceSpec:
    if text == "qam16":
        return SourceSpec(kind="qam16", n_subcarriers=n)
    if text in ("gaussian", "gaussian_surrogate"):
        return SourceSpec(kind="gaussian_surrogate", n_subcarriers=n)
    if text.startswith("file:"):
        path = text[len("file:") :]
        if not path:
            raise ConfigError("source file: needs a path, e.g. file:latents.symf")
        return SourceSpec(kind="latent_file", n_subcarriers=n, path=path)
    raise ConfigError(
        f"source must be qam16, gaussian, or file:<path>, got {text!r}"
    )


def _parse_snr_grid(text: str) -> tuple:
    if not text.strip():
        return ()
    grid = []
    for token in text.split(","):
        token = token.strip()
        try:
            grid.append(float(token))
        except ValueError:
            raise ConfigError(f"snr-db entries must be numbers, got {token!r}") from None
    return tuple(grid)


def build_spec(values: dict) -> ExperimentSpec:
    """Validated ExperimentSpec from string key-value pairs.

    Keys are the CLI flag names without the leading dashes; unknown keys
    and out-of-range values raise ConfigError naming the key. Missing
    keys take the documented defaults.
    """
    for key in values:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    merged = dict(_DEFAULTS)
    merged.update(values)

    n = _parse_int(merged, "n", 1)
    if not _is_power_of_two(n):
        raise ConfigError(f"n must be a power of two, got {n}")
    source = _parse_source(merged["source"], n)

    technique_args = {"kind": merged["technique"]}
    if "rho" in merged:
        technique_args["rho"] = _parse_positive_float(merged, "rho")
    if "mu" in merged:
        technique_args["mu"] = _parse_positive_float(merged, "mu")
    if "v" in merged:
        technique_args["v"] = _parse_int(merged, "v", 1)
    if "m-trials" in merged:
        technique_args["m_trials"] = _parse_int(merged, "m-trials", 1)
    if "gamma" in merged:
        technique_args["gamma"] = _parse_positive_float(merged, "gamma")
    technique = TechniqueConfig(**technique_args)

    return ExperimentSpec(
        source=source,
        technique=technique,
        n_frames=_parse_int(merged, "frames", 1),
        master_seed=_parse_int(merged, "seed", 0),
        snr_db=_parse_snr_grid(merged.get("snr-db", "")),
        workers=_parse_int(merged, "workers", 1),
        out=merged.get("out"),
        papr_out=merged.get("papr-out"),
    )


def parse_config_text(text: str) -> dict:
    """key=value lines; blank lines and # comments ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def parse_config_file(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def parse_config(path) -> ExperimentSpec:
    """Load one experiment description from a key=value config file."""
    return build_spec(parse_config_file(path))
