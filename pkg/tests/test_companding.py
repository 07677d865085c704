"""Tests for mu-law companding, expansion, and reference-amplitude recovery."""

import numpy as np
import pytest

from paprsim.companding import (
    CompandConfig,
    compand,
    compand_batch,
    expand,
    expand_batch,
    recover_v_prime,
    recover_v_prime_batch,
)
from paprsim.core import TimeFrame, ifft_batch
from paprsim.errors import ConfigError
from paprsim.metrics import papr_db_batch


def _signal(seed, n_frames=30, n=64):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_frames, n)) + 1j * rng.standard_normal((n_frames, n))
    return ifft_batch(z / np.sqrt(np.mean(np.abs(z) ** 2, axis=1, keepdims=True)))


class TestCompandConfig:
    def test_mu_must_be_positive(self):
        with pytest.raises(ConfigError, match="mu"):
            CompandConfig(mu=0.0)


class TestCompressorShape:
    def test_mean_amplitude_is_a_fixed_point(self):
        """A sample at exactly the frame mean amplitude maps to itself."""
        y = _signal(0, n_frames=1)
        # plant sample 5 so it sits exactly at the modified frame's mean:
        # v = (sum of the others + v)/n  =>  v = mean of the others
        others = np.abs(np.delete(y[0], 5))
        v = float(np.mean(others))
        y[0, 5] = v
        assert np.mean(np.abs(y)) == pytest.approx(v, rel=1e-12)
        out = compand_batch(y, 4.0)
        assert abs(out[0, 5]) == pytest.approx(v, rel=1e-9)

    def test_compresses_above_and_boosts_below(self):
        y = _signal(1, n_frames=1)
        v = np.mean(np.abs(y))
        out = compand_batch(y, 4.0)
        above = np.abs(y) > v
        below = (np.abs(y) < v) & (np.abs(y) > 0)
        assert np.all(np.abs(out[above]) < np.abs(y[above]))
        assert np.all(np.abs(out[below]) > np.abs(y[below]))

    def test_phase_preserved(self):
        y = _signal(2, n_frames=1)
        out = compand_batch(y, 8.0)
        np.testing.assert_allclose(np.angle(out), np.angle(y), atol=1e-12)

    def test_papr_never_increases(self):
        y = _signal(3, n_frames=100)
        before = papr_db_batch(y)
        for mu in (1.0, 2.0, 4.0, 8.0):
            after = papr_db_batch(compand_batch(y, mu))
            assert np.all(after <= before + 1e-9)


class TestRoundTrip:
    def test_exact_with_transmitter_reference(self):
        """Expansion with the compressor's own V undoes companding exactly."""
        y = _signal(4)
        v = np.mean(np.abs(y), axis=1)
        back = expand_batch(compand_batch(y, 4.0), 4.0, v)
        np.testing.assert_allclose(back, y, rtol=1e-12, atol=1e-14)

    def test_frame_wrappers(self):
        frame = TimeFrame(_signal(5, n_frames=1)[0])
        cfg = CompandConfig(mu=2.0)
        companded = compand(frame, cfg)
        v = float(np.mean(np.abs(frame.samples)))
        back = expand(companded, cfg, v)
        np.testing.assert_allclose(back.samples, frame.samples, rtol=1e-12)

    def test_expand_rejects_nonpositive_reference(self):
        y = _signal(6, n_frames=2)
        with pytest.raises(ConfigError):
            expand_batch(y, 4.0, np.array([1.0, 0.0]))


class TestRecoverVPrime:
    """The receiver re-derives the reference amplitude from the received
    frame alone, as the consistency fixed point of the expander."""

    def test_noiseless_recovery_matches_transmitter(self):
        y = _signal(7)
        for mu in (1.0, 2.0, 4.0, 8.0):
            v = np.mean(np.abs(y), axis=1)
            received = compand_batch(y, mu)
            recovered = recover_v_prime_batch(received, mu)
            np.testing.assert_allclose(recovered, v, rtol=1e-12)

    def test_full_receiver_chain_round_trip(self):
        y = _signal(8)
        for mu in (1.0, 2.0, 4.0, 8.0):
            received = compand_batch(y, mu)
            back = expand_batch(received, mu, recover_v_prime_batch(received, mu))
            np.testing.assert_allclose(back, y, rtol=1e-6, atol=1e-12)

    def test_zero_frame_maps_to_zero(self):
        assert recover_v_prime(np.zeros(8, dtype=complex), 4.0) == 0.0

    def test_recovery_is_stable_under_small_noise(self):
        y = _signal(9, n_frames=3)
        received = compand_batch(y, 4.0)
        rng = np.random.default_rng(0)
        noisy = received + 1e-6 * (
            rng.standard_normal(received.shape) + 1j * rng.standard_normal(received.shape)
        )
        v = np.mean(np.abs(y), axis=1)
        recovered = recover_v_prime_batch(noisy, 4.0)
        np.testing.assert_allclose(recovered, v, rtol=1e-4)
