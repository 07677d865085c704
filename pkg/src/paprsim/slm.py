"""Selected mapping: transmit the lowest-PAPR phase-rotated copy of a frame.

The transmitter multiplies the frequency frame elementwise by each of V
codebook phase sequences, modulates every candidate, and keeps the one
with the smallest PAPR; the codebook index travels as side information
and the receiver undoes the rotation exactly.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .core import FrequencyFrame, TimeFrame, ifft_batch
from .errors import ConfigError
from .phase_factors import SideInfo, check_side_info, quaternary_sequence


@dataclass(frozen=True)
class SlmConfig:
    """v_candidates alternative phase rotations; candidate 0 is the identity."""

    v_candidates: int
    rng_seed: int = 0

    def __post_init__(self):
        if self.v_candidates < 1:
            raise ConfigError(f"v_candidates must be >= 1, got {self.v_candidates}")


@lru_cache(maxsize=32)
def _codebook(seed: int, v_candidates: int, n: int) -> np.ndarray:
    book = np.empty((v_candidates, n), dtype=np.complex128)
    for v in range(v_candidates):
        book[v] = quaternary_sequence(seed, v, n)
    book.setflags(write=False)
    return book


def slm_codebook(cfg: SlmConfig, n: int) -> np.ndarray:
    """The (V, N) phase-sequence codebook both link ends share."""
    return _codebook(cfg.rng_seed, cfg.v_candidates, n)


def slm_transmit_batch(symbols: np.ndarray, cfg: SlmConfig):
    """Select per row of a (n_frames, N) batch.

    Returns (time samples of the winners, selected codebook indices).
    Ties go to the lowest index.
    """
    book = slm_codebook(cfg, symbols.shape[1])
    candidates = ifft_batch(symbols[:, None, :] * book[None, :, :])
    papr = _kernels.papr_linear(candidates.reshape(-1, symbols.shape[1]))
    papr = papr.reshape(symbols.shape[0], cfg.v_candidates)
    selected = np.argmin(papr, axis=1)
    chosen = candidates[np.arange(symbols.shape[0]), selected]
    return chosen, selected


def slm_transmit(frame: FrequencyFrame, cfg: SlmConfig):
    """Returns the minimum-PAPR candidate and the side info naming it."""
    chosen, selected = slm_transmit_batch(frame.symbols[None, :], cfg)
    info = SideInfo(technique="slm", selected_index=int(selected[0]))
    return TimeFrame(chosen[0], frame.n_subcarriers), info


def slm_receive_batch(symbols: np.ndarray, selected: np.ndarray, cfg: SlmConfig) -> np.ndarray:
    book = slm_codebook(cfg, symbols.shape[1])
    return symbols * np.conj(book[selected])


def slm_receive(received: FrequencyFrame, info: SideInfo, cfg: SlmConfig) -> FrequencyFrame:
    """Undo the selected phase rotation on the demodulated frame."""
    check_side_info(info, "slm", cfg.v_candidates)
    out = slm_receive_batch(
        received.symbols[None, :], np.array([info.selected_index]), cfg
    )
    return FrequencyFrame(out[0], received.n_subcarriers)
