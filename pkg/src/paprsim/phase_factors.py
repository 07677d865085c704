"""Shared phase-factor machinery for SLM and PTS.

Both techniques draw unit-magnitude phase factors from the quaternary
alphabet {+1, -1, +j, -j}. Sequence index 0 is always the all-ones
identity; sequence v >= 1 comes from its own stream under the shared
codebook seed, so the set of sequences for a given seed is nested as the
candidate/trial count grows and both link ends regenerate it identically.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SideInfoError

QUATERNARY_ALPHABET = np.array([1.0 + 0.0j, -1.0 + 0.0j, 0.0 + 1.0j, 0.0 - 1.0j])


@dataclass(frozen=True)
class PhaseFactorSequence:
    """A sequence of unit-magnitude phase factors."""

    factors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "factors", np.asarray(self.factors, dtype=np.complex128))
        if np.any(np.abs(np.abs(self.factors) - 1.0) > 1e-12):
            raise ValueError("phase factors must have unit magnitude")


@dataclass(frozen=True)
class SideInfo:
    """Which codebook entry the transmitter picked; the receiver needs it to invert."""

    technique: str
    selected_index: int


def quaternary_sequence(seed: int, sequence_index: int, length: int) -> np.ndarray:
    """Deterministic phase-factor sequence for one codebook slot."""
    if sequence_index == 0:
        return np.ones(length, dtype=np.complex128)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(sequence_index,))
    rng = np.random.default_rng(ss)
    return QUATERNARY_ALPHABET[rng.integers(0, 4, size=length)]


def check_side_info(info: SideInfo, technique: str, count: int):
    if info.technique != technique:
        raise SideInfoError(f"side info is for {info.technique!r}, receiver runs {technique!r}")
    if not 0 <= info.selected_index < count:
        raise SideInfoError(
            f"side info index {info.selected_index} outside configured range [0, {count})"
        )
