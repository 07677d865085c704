"""Deterministic random-stream derivation.

Every random draw in the package comes from a Generator derived from a
master seed plus an integer key path, via numpy's SeedSequence spawn-key
mechanism. Streams derived from distinct key paths are statistically
independent, and a stream's content depends only on (seed, key path),
never on how many other streams exist or which worker draws from it.
That is what makes Monte-Carlo runs reproducible independently of the
worker count.
"""

import numpy as np

# Key-path roots used by the experiment harness.
STREAM_SOURCE = 0
STREAM_NOISE = 1
STREAM_PROBE = 2


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Return the Generator for the stream at `key` under `master_seed`."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=key)
    return np.random.default_rng(ss)


def frame_rng(master_seed: int, frame_index: int) -> np.random.Generator:
    """Per-frame source stream: frame i's symbols depend only on (seed, i)."""
    return substream(master_seed, STREAM_SOURCE, frame_index)


def noise_rng(master_seed: int, snr_index: int, frame_index: int) -> np.random.Generator:
    """Per-frame, per-SNR-point channel noise stream."""
    return substream(master_seed, STREAM_NOISE, snr_index, frame_index)


def probe_rng(master_seed: int, probe_index: int) -> np.random.Generator:
    """Stream for gradient-check probe draws."""
    return substream(master_seed, STREAM_PROBE, probe_index)
