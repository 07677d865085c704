"""Tests for the differentiable loss, soft clipping, and gradient checks."""

import numpy as np
import pytest

from paprsim.core import FrequencyFrame, TimeFrame, ifft
from paprsim.errors import ConfigError, UndefinedInputError
from paprsim.gradients import (
    GradCheckReport,
    LossWeights,
    SoftClipConfig,
    combined_loss,
    grad_check,
    papr_loss,
    soft_clip,
)
from paprsim.metrics import papr_db


def _frame(seed, n=32):
    rng = np.random.default_rng(seed)
    return FrequencyFrame(rng.standard_normal(n) + 1j * rng.standard_normal(n))


class TestConfigs:
    def test_loss_weight_must_be_nonnegative(self):
        LossWeights(lambda_=0.0)
        with pytest.raises(ConfigError):
            LossWeights(lambda_=-0.1)

    def test_soft_clip_config_ranges(self):
        with pytest.raises(ConfigError, match="rho"):
            SoftClipConfig(rho=0.0)
        with pytest.raises(ConfigError, match="gamma"):
            SoftClipConfig(rho=1.4, gamma=0.0)


class TestPaprLoss:
    def test_all_ones_frame_value_is_n(self):
        value, _ = papr_loss(FrequencyFrame(np.ones(64)))
        assert value == pytest.approx(64.0)

    def test_zero_frame_rejected(self):
        with pytest.raises(UndefinedInputError):
            papr_loss(FrequencyFrame(np.zeros(16)))

    def test_value_agrees_with_the_db_metric(self):
        frame = _frame(0)
        value, _ = papr_loss(frame)
        measured = papr_db(ifft(frame)).value_db
        assert value == pytest.approx(10 ** (measured / 10), rel=1e-9)

    def test_db_option_is_consistent(self):
        frame = _frame(1)
        linear, g_lin = papr_loss(frame)
        db, g_db = papr_loss(frame, db=True)
        assert db == pytest.approx(10 * np.log10(linear), rel=1e-12)
        scale = 10 / (np.log(10) * linear)
        np.testing.assert_allclose(g_db, scale * g_lin, rtol=1e-12)

    def test_scale_invariance(self):
        """Doubling the frame leaves the ratio alone and halves the gradient."""
        frame = _frame(2)
        value, grad = papr_loss(frame)
        value2, grad2 = papr_loss(FrequencyFrame(2.0 * frame.symbols))
        assert value2 == pytest.approx(value, rel=1e-12)
        np.testing.assert_allclose(grad2, 0.5 * grad, rtol=1e-9)

    def test_gradient_matches_finite_differences(self):
        report = grad_check("papr_loss", trials=25, step=1e-5, rng=np.random.default_rng(0))
        assert report.max_rel_error < 1e-4


class TestCombinedLoss:
    def test_zero_weight_returns_first_term(self):
        assert combined_loss(0.7, 64.0, LossWeights(lambda_=0.0)) == 0.7

    def test_arithmetic(self):
        assert combined_loss(1.0, 64.0, LossWeights(lambda_=0.01)) == pytest.approx(1.64)

    def test_linearity_in_the_weight(self):
        a = combined_loss(1.0, 10.0, LossWeights(lambda_=0.2)) - 1.0
        b = combined_loss(1.0, 10.0, LossWeights(lambda_=0.4)) - 1.0
        assert b == pytest.approx(2 * a)


class TestSoftClip:
    def test_inactive_samples_pass_through_exactly(self):
        y = np.full(16, 0.5 + 0.0j)
        y[0] = 2.0  # raises the mean so the rest sit below the threshold
        out, _ = soft_clip(TimeFrame(y), SoftClipConfig(rho=1.4))
        np.testing.assert_array_equal(out.samples[1:], y[1:])

    def test_never_increases_magnitude(self):
        rng = np.random.default_rng(3)
        y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        out, _ = soft_clip(TimeFrame(y), SoftClipConfig(rho=1.0))
        assert np.all(np.abs(out.samples) <= np.abs(y) + 1e-12)

    def test_huge_rho_is_the_identity_with_identity_jacobian(self):
        rng = np.random.default_rng(4)
        y = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        out, op = soft_clip(TimeFrame(y), SoftClipConfig(rho=1e6))
        np.testing.assert_array_equal(out.samples, y)
        d = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        np.testing.assert_array_equal(op.jvp(d), d)
        np.testing.assert_array_equal(op.vjp(d), d)

    def test_approaches_hard_clipping_for_large_inputs(self):
        """Far above threshold with tiny gamma, output magnitude -> rho*ybar."""
        y = np.full(64, 0.1 + 0.0j)
        y[0] = 0.0  # keep a spread so the mean is known
        ybar_target = float(np.mean(np.abs(y)))
        rho = 1.4
        # place one sample at 10x the clip level, recompute the implied mean
        y[0] = 10 * rho * ybar_target
        ybar = float(np.mean(np.abs(y)))
        out, _ = soft_clip(TimeFrame(y), SoftClipConfig(rho=rho, gamma=1e-12))
        assert abs(out.samples[0]) == pytest.approx(rho * ybar, abs=1e-9)

    def test_jacobian_matches_finite_differences(self):
        report = grad_check("soft_clip", trials=25, step=1e-5, rng=np.random.default_rng(1))
        assert report.max_rel_error < 1e-4

    def test_through_mean_variant_matches_finite_differences(self):
        report = grad_check(
            "soft_clip",
            trials=25,
            step=1e-5,
            rng=np.random.default_rng(2),
            through_mean=True,
        )
        assert report.max_rel_error < 1e-4

    def test_jvp_vjp_adjoint_identity(self):
        """<g, J d> must equal <J^T g, d> exactly (same algebra, no FD)."""
        rng = np.random.default_rng(5)
        y = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        _, op = soft_clip(TimeFrame(y), SoftClipConfig(rho=1.2), through_mean=True)
        d = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        g = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        lhs = np.sum(np.real(np.conj(g) * op.jvp(d)))
        rhs = np.sum(np.real(np.conj(op.vjp(g)) * d))
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestGradCheck:
    def test_report_reflects_inputs(self):
        report = grad_check("papr_loss", trials=3, step=1e-4, rng=np.random.default_rng(0))
        assert isinstance(report, GradCheckReport)
        assert report.probe_count == 3
        assert report.step == 1e-4

    def test_unknown_op_rejected(self):
        with pytest.raises(ConfigError):
            grad_check("relu", trials=1, step=1e-5, rng=np.random.default_rng(0))

    def test_bad_step_rejected(self):
        with pytest.raises(ConfigError):
            grad_check("papr_loss", trials=1, step=0.0, rng=np.random.default_rng(0))
