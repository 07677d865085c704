"""Partial transmit sequences: phase-weight disjoint subcarrier blocks.

The N subcarriers are split into V adjacent blocks, each zero-padded to
length N and modulated separately. A trial assigns one quaternary weight
per block and sums the weighted block signals; after M trials the
lowest-PAPR combination wins. Trial 0 is the all-ones identity, so the
winner never does worse than the plain frame. The trial index is the side
information; the receiver conjugate-weights each frequency block to
invert exactly.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .core import FrequencyFrame, TimeFrame, ifft_batch
from .errors import ConfigError
from .phase_factors import SideInfo, check_side_info, quaternary_sequence


@dataclass(frozen=True)
class PtsConfig:
    """v_partitions adjacent blocks, m_trials random weight vectors."""

    v_partitions: int
    m_trials: int
    rng_seed: int = 0

    def __post_init__(self):
        if self.v_partitions < 1:
            raise ConfigError(f"v_partitions must be >= 1, got {self.v_partitions}")
        if self.m_trials < 1:
            raise ConfigError(f"m_trials must be >= 1, got {self.m_trials}")

    def check_divides(self, n: int):
        if n % self.v_partitions != 0:
            raise ConfigError(
                f"v_partitions={self.v_partitions} must divide the {n} subcarriers"
            )


@lru_cache(maxsize=32)
def _weights(seed: int, m_trials: int, v_partitions: int) -> np.ndarray:
    w = np.empty((m_trials, v_partitions), dtype=np.complex128)
    for trial in range(m_trials):
        w[trial] = quaternary_sequence(seed, trial, v_partitions)
    w.setflags(write=False)
    return w


def pts_weights(cfg: PtsConfig) -> np.ndarray:
    """The (M, V) per-trial block weights both link ends share."""
    return _weights(cfg.rng_seed, cfg.m_trials, cfg.v_partitions)


def _block_signals(symbols: np.ndarray, v_partitions: int) -> np.ndarray:
    """Zero-padded per-block time signals, shape (n_frames, V, N)."""
    n_frames, n = symbols.shape
    width = n // v_partitions
    blocks = np.zeros((n_frames, v_partitions, n), dtype=np.complex128)
    for v in range(v_partitions):
        sl = slice(v * width, (v + 1) * width)
        blocks[:, v, sl] = symbols[:, sl]
    return ifft_batch(blocks)


def pts_transmit_batch(symbols: np.ndarray, cfg: PtsConfig):
    """Select per row of a (n_frames, N) batch.

    Returns (time samples of the winning combinations, trial indices).
    Ties go to the lowest trial index.
    """
    cfg.check_divides(symbols.shape[1])
    n_frames, n = symbols.shape
    blocks = _block_signals(symbols, cfg.v_partitions)
    weights = pts_weights(cfg)
    combos = np.einsum("mv,fvn->fmn", weights, blocks)
    papr = _kernels.papr_linear(combos.reshape(-1, n)).reshape(n_frames, cfg.m_trials)
    selected = np.argmin(papr, axis=1)
    chosen = combos[np.arange(n_frames), selected]
    return chosen, selected


def pts_transmit(frame: FrequencyFrame, cfg: PtsConfig):
    """Returns the minimum-PAPR weighted combination and its trial index."""
    chosen, selected = pts_transmit_batch(frame.symbols[None, :], cfg)
    info = SideInfo(technique="pts", selected_index=int(selected[0]))
    return TimeFrame(chosen[0], frame.n_subcarriers), info


def pts_receive_batch(symbols: np.ndarray, selected: np.ndarray, cfg: PtsConfig) -> np.ndarray:
    cfg.check_divides(symbols.shape[1])
    width = symbols.shape[1] // cfg.v_partitions
    per_carrier = np.repeat(np.conj(pts_weights(cfg)[selected]), width, axis=-1)
    return symbols * per_carrier


def pts_receive(received: FrequencyFrame, info: SideInfo, cfg: PtsConfig) -> FrequencyFrame:
    """Conjugate-weight each frequency block of the demodulated frame."""
    check_side_info(info, "pts", cfg.m_trials)
    out = pts_receive_batch(received.symbols[None, :], np.array([info.selected_index]), cfg)
    return FrequencyFrame(out[0], received.n_subcarriers)
