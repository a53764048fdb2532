import math

import numpy as np
import pytest

from ptkrotor.classical import acceleration_rate_prediction
from ptkrotor.core import SystemParams
from ptkrotor.oracle import (
    CaptureRangeError,
    GaussianPacket,
    equilibrium_widths,
    oracle_trajectory,
    propagate_packet,
    validity_check,
)

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


def strong_gain_params(k=TWO_PI, lam=1.0, hbar=0.1):
    return SystemParams(k, lam, hbar, basis_size=64)


class TestValidity:
    def test_strong_gain_valid(self):
        v = validity_check(SystemParams(5.0, 5.0, 0.1, basis_size=64))
        assert v.valid
        assert v.gain_ratio == pytest.approx(250.0)
        assert v.kick_ratio == pytest.approx(50.0)

    def test_weak_gain_invalid(self):
        v = validity_check(SystemParams(5.0, 0.09, 1.0, basis_size=64))
        assert not v.valid
        assert v.gain_ratio == pytest.approx(0.45)

    def test_fig4_point_valid(self):
        assert validity_check(strong_gain_params()).valid


class TestWidths:
    def test_equilibrium_values(self):
        p = strong_gain_params()
        dtheta, dp = equilibrium_widths(p)
        assert dtheta == pytest.approx(math.sqrt(0.1 / (2.0 * TWO_PI)))
        assert dp == pytest.approx(math.sqrt(0.1 * TWO_PI / 2.0))
        assert dtheta * dp == pytest.approx(0.05, abs=1e-12)

    def test_uncertainty_product_is_half_hbar(self):
        for k, lam, hbar in ((5.0, 5.0, 0.1), (TWO_PI, 1.0, 0.1), (20.0, 2.0, 0.05)):
            p = SystemParams(k, lam, hbar, basis_size=64)
            dtheta, dp = equilibrium_widths(p)
            assert abs(dtheta * dp - hbar / 2.0) <= 1e-12


class TestPropagate:
    def test_resonant_step(self):
        p = strong_gain_params()
        packet = GaussianPacket(HALF_PI, 0.0, *equilibrium_widths(p))
        out = propagate_packet(packet, p)
        assert out.theta_bar == pytest.approx(HALF_PI + TWO_PI)
        assert out.p_bar == pytest.approx(TWO_PI)

    def test_detuning_absorbed(self):
        p = SystemParams(TWO_PI + 0.5, 1.0, 0.1, basis_size=64)
        packet = GaussianPacket(HALF_PI, 0.0, *equilibrium_widths(p))
        out = propagate_packet(packet, p)
        assert out.theta_bar == pytest.approx(HALF_PI + TWO_PI)
        assert out.p_bar == pytest.approx(TWO_PI)

    def test_widths_reset(self):
        p = strong_gain_params()
        packet = GaussianPacket(HALF_PI, 0.0, 0.2, 0.3)
        out = propagate_packet(packet, p)
        dtheta, dp = equilibrium_widths(p)
        assert out.dtheta == pytest.approx(dtheta)
        assert out.dp == pytest.approx(dp)
        assert out.uncertainty_product == pytest.approx(0.05, abs=1e-12)

    def test_out_of_capture_range(self):
        p = SystemParams(3 * math.pi, 1.0, 0.1, basis_size=64)  # Delta = pi exactly
        packet = GaussianPacket(HALF_PI, 0.0, *equilibrium_widths(p))
        with pytest.raises(CaptureRangeError):
            propagate_packet(packet, p)

    def test_invalid_regime_rejected(self):
        p = SystemParams(5.0, 0.09, 1.0, basis_size=64)
        packet = GaussianPacket(HALF_PI, 0.0, 0.1, 0.5)
        with pytest.raises(ValueError, match="regime"):
            propagate_packet(packet, p)

    def test_bad_widths_rejected(self):
        with pytest.raises(ValueError):
            GaussianPacket(0.0, 0.0, -0.1, 0.5)


class TestTrajectory:
    def test_resonant_sequence(self):
        p = strong_gain_params()
        traj = oracle_trajectory(p, 5)
        assert np.allclose(traj.p_bar, TWO_PI * np.arange(6), atol=1e-9)
        assert traj.rate == pytest.approx(TWO_PI)

    def test_constant_increment(self):
        p = SystemParams(6 * math.pi - 1.0, 2.0, 0.1, basis_size=64)
        traj = oracle_trajectory(p, 10)
        inc = np.diff(traj.p_bar)
        assert np.allclose(inc, inc[0], atol=1e-9)
        assert traj.rate == pytest.approx(6 * math.pi)

    def test_agreement_with_classical_prediction(self):
        for k in (TWO_PI, 5.0, 11.0, 4 * math.pi + 0.8, 7 * math.pi + 0.5):
            p = SystemParams(k, 5.0, 0.1, basis_size=64)
            traj = oracle_trajectory(p, 8)
            assert traj.rate == pytest.approx(acceleration_rate_prediction(k), abs=1e-12)

    def test_center_follows_momentum(self):
        p = strong_gain_params()
        traj = oracle_trajectory(p, 6)
        # theta_bar = p_bar + pi/2 for the whole recursion
        assert np.allclose(traj.theta_bar, traj.p_bar + HALF_PI, atol=1e-9)
