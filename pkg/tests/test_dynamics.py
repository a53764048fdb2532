import math

import numpy as np
import pytest

from ptkrotor.core import (
    AngleGrid,
    MomentumState,
    SystemParams,
    angle_to_momentum,
    make_ground_state,
    wrap_angle,
)
from ptkrotor.dynamics import (
    CurrentSeries,
    DegenerateStateError,
    EvolveConfig,
    TruncationError,
    apply_free,
    apply_kick,
    evolve,
    mean_momentum,
    measure_acceleration_rate,
    participation_number,
    second_moment_rate,
    step,
)
from ptkrotor.spectrum import build_floquet_matrix, kick_coefficients


def random_state(params, seed=0):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(params.basis_size) + 1j * rng.standard_normal(params.basis_size)
    amps /= np.linalg.norm(amps)
    return MomentumState(amps, params.lattice)


def true_amplitudes(state):
    return state.amplitudes * math.exp(state.log_norm)


class TestApplyFree:
    def test_ground_state_invariant(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        s = make_ground_state(p)
        out = apply_free(s, p)
        assert np.array_equal(out.amplitudes, s.amplitudes)

    def test_pure_phase(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=128)
        s = random_state(p)
        out = apply_free(s, p)
        assert np.allclose(np.abs(out.amplitudes), np.abs(s.amplitudes), atol=1e-15)
        assert out.log_norm == s.log_norm

    def test_single_mode_phase(self):
        # n=1, hbar=1: multiplier exp(-i/2)
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        amps = np.zeros(64, complex)
        amps[p.lattice.index_of(1)] = 1.0
        out = apply_free(MomentumState(amps, p.lattice), p)
        assert out.amplitudes[p.lattice.index_of(1)] == pytest.approx(
            np.exp(-0.5j), abs=1e-15
        )


class TestApplyKick:
    def test_unitary_at_zero_gain(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=256)
        s = make_ground_state(p)
        out = apply_kick(s, p)
        assert abs(out.norm - 1.0) <= 1e-12
        assert out.log_norm == 0.0

    def test_unitary_for_random_state(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=256)
        out = apply_kick(random_state(p, 5), p)
        assert abs(out.norm - 1.0) <= 1e-12

    def test_gain_ratio_bounds(self):
        p = SystemParams(5.0, 0.4, 1.0, basis_size=256)
        s = random_state(p, 9)
        out = apply_kick(s, p)
        ratio = (out.norm * math.exp(out.log_norm)) / s.norm
        bound = math.exp(p.gain_exponent)
        assert 1.0 / bound <= ratio <= bound

    def test_ground_state_norm_matches_coefficient_row(self):
        # oracle: Fourier coefficients of the kick factor by direct quadrature
        p = SystemParams(5.0, 0.09, 1.0, basis_size=256)
        m = 8192
        thetas = -math.pi + 2.0 * math.pi * np.arange(m) / m
        uk = np.exp(
            (p.kick_strength / p.hbar_eff)
            * (-1j * np.cos(thetas) + p.gain_strength * np.sin(thetas))
        )
        ks = np.arange(-128, 128)
        ck = np.array([np.sum(uk * np.exp(-1j * k * thetas)) / m for k in ks])
        expected_norm = np.linalg.norm(ck)

        out = apply_kick(make_ground_state(p), p)
        assert out.norm * math.exp(out.log_norm) == pytest.approx(expected_norm, rel=1e-12)

        col = build_floquet_matrix(p).matrix[:, p.lattice.index_of(0)]
        assert np.linalg.norm(col) == pytest.approx(expected_norm, rel=1e-12)

    def test_overflow_guard_extreme_gain(self):
        # K*lambda/hbar = 1250 >> 700: no Inf/NaN may ever be stored
        p = SystemParams(5.0, 25.0, 0.1, basis_size=512)
        out = apply_kick(make_ground_state(p), p)
        assert np.all(np.isfinite(out.amplitudes))
        assert out.log_norm == pytest.approx(1250.0)
        assert 0.0 < out.norm < 1.0


class TestStep:
    def test_unitary_norm_after_many_steps(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=256)
        s = make_ground_state(p)
        for _ in range(100):
            s = step(s, p)
        assert abs(math.exp(s.log_norm) - 1.0) <= 1e-10

    def test_single_step_matches_matrix_column(self):
        p = SystemParams(5.0, 0.09, 1.0, basis_size=256)
        col = build_floquet_matrix(p).matrix[:, p.lattice.index_of(0)]
        out = step(make_ground_state(p), p, renormalize=False)
        assert np.max(np.abs(true_amplitudes(out) - col)) <= 1e-10

    def test_multi_step_matches_matrix_powers(self):
        p = SystemParams(5.0, 0.09, 1.0, basis_size=256)
        u = build_floquet_matrix(p).matrix
        for seed in range(3):
            s = random_state(p, seed)
            v = s.amplitudes.copy()
            t = 10
            out = s
            for _ in range(t):
                out = step(out, p, renormalize=False)
                v = u @ v
            assert np.max(np.abs(true_amplitudes(out) - v)) <= 1e-8 * t

    def test_parity_at_zero_gain(self):
        # N=512 keeps the unpaired -N/2 site's localization tail below round-off
        p = SystemParams(5.0, 0.0, 1.0, basis_size=512)
        s = make_ground_state(p)
        for _ in range(50):
            s = step(s, p)
        amps = s.amplitudes
        assert np.max(np.abs(amps[1:] - amps[1:][::-1])) <= 1e-12
        assert abs(mean_momentum(s)) <= 1e-12

    def test_reordered_same_spectrum_effect(self):
        # reordered split is a similarity-equivalent operator: norms growth agrees
        p = SystemParams(5.0, 0.2, 1.0, basis_size=256)
        s_std = make_ground_state(p)
        s_alt = make_ground_state(p)
        for _ in range(60):
            s_std = step(s_std, p)
            s_alt = step(s_alt, p, operator_order="reordered")
        rate_std = s_std.log_norm / 60
        rate_alt = s_alt.log_norm / 60
        assert rate_std == pytest.approx(rate_alt, rel=0.05)

    def test_gain_increases_norm_on_gain_side(self):
        p = SystemParams(5.0, 0.3, 1.0, basis_size=256)
        grid = AngleGrid(512)
        for center, should_grow in ((math.pi / 2, True), (-math.pi / 2, False)):
            prof = np.exp(-0.5 * (wrap_angle(grid.thetas - center) / 0.3) ** 2)
            amps = angle_to_momentum(prof.astype(complex), p.lattice)
            amps /= np.linalg.norm(amps)
            out = apply_kick(MomentumState(amps, p.lattice), p)
            ratio = out.norm * math.exp(out.log_norm)
            assert (ratio > 1.0) == should_grow

    def test_invalid_order(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        with pytest.raises(ValueError):
            step(make_ground_state(p), p, operator_order="sideways")


class TestMeanMomentum:
    def test_ground_state(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        assert mean_momentum(make_ground_state(p)) == 0.0

    def test_single_mode(self):
        p = SystemParams(5.0, 0.0, 1.5, basis_size=64)
        amps = np.zeros(64, complex)
        amps[p.lattice.index_of(3)] = 1.0
        assert mean_momentum(MomentumState(amps, p.lattice)) == pytest.approx(4.5)

    def test_symmetric_superposition(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        amps = np.zeros(64, complex)
        amps[p.lattice.index_of(2)] = 1.0 / math.sqrt(2)
        amps[p.lattice.index_of(-2)] = 1.0 / math.sqrt(2)
        assert mean_momentum(MomentumState(amps, p.lattice)) == pytest.approx(0.0, abs=1e-15)

    def test_zero_norm_rejected(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        s = MomentumState(np.zeros(64, complex), p.lattice)
        with pytest.raises(DegenerateStateError):
            mean_momentum(s)

    def test_independent_of_log_norm(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        amps = np.zeros(64, complex)
        amps[p.lattice.index_of(5)] = 0.1
        a = mean_momentum(MomentumState(amps, p.lattice, log_norm=0.0))
        b = mean_momentum(MomentumState(amps, p.lattice, log_norm=300.0))
        assert a == b == pytest.approx(5.0)


class TestEvolve:
    def test_series_shape_and_time_axis(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=128)
        series = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=20))
        assert np.array_equal(series.t, np.arange(21))
        assert len(series.mean_p) == 21
        assert series.log_norm[0] == 0.0

    def test_zero_gain_log_norm_zero(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=512)
        series = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=50))
        assert np.max(np.abs(series.log_norm)) <= 1e-10
        assert np.max(np.abs(series.mean_p)) <= 1e-10

    def test_log_norm_monotone_above_threshold(self):
        p = SystemParams(5.0, 0.6, 1.0, basis_size=4096)
        series = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=60))
        assert np.all(np.diff(series.log_norm[5:]) > 0)

    def test_renormalization_neutrality(self):
        p = SystemParams(5.0, 0.2, 1.0, basis_size=512)
        on = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=40, renormalize=True))
        off = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=40, renormalize=False))
        assert np.max(np.abs(on.mean_p - off.mean_p)) <= 1e-12
        assert np.max(np.abs(on.participation - off.participation)) <= 1e-10
        assert np.max(np.abs(on.log_norm - off.log_norm)) <= 1e-10

    def test_determinism(self):
        p = SystemParams(5.0, 0.09, 1.0, basis_size=256)
        a = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=30))
        b = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=30))
        assert np.array_equal(a.mean_p, b.mean_p)
        assert np.array_equal(a.log_norm, b.log_norm)
        assert np.array_equal(a.participation, b.participation)

    def test_record_every(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=128)
        series = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=20, record_every=5))
        assert series.t.tolist() == [0, 5, 10, 15, 20]

    def test_truncation_flag_when_state_reaches_edge(self):
        # strong ballistic run on a deliberately tiny lattice must raise the flag
        p = SystemParams(2.0 * math.pi, 5.0, 0.1, basis_size=512)
        series = evolve(make_ground_state(p), p, EvolveConfig(n_kicks=30))
        assert series.truncation_warning


class TestAccelerationRate:
    def _series(self, mean_p, mean_p2=None):
        n = len(mean_p)
        return CurrentSeries(
            t=np.arange(n),
            mean_p=np.asarray(mean_p, dtype=float),
            log_norm=np.zeros(n),
            participation=np.ones(n),
            mean_p2=np.zeros(n) if mean_p2 is None else np.asarray(mean_p2, dtype=float),
        )

    def test_exact_linear(self):
        series = self._series(3.0 * np.arange(200))
        assert measure_acceleration_rate(series, window=100) == pytest.approx(3.0, abs=1e-12)

    def test_constant(self):
        series = self._series(np.full(200, 7.5))
        assert measure_acceleration_rate(series, window=100) == pytest.approx(0.0, abs=1e-12)

    def test_default_window_is_half(self):
        ramp = np.concatenate([np.zeros(100), np.arange(100.0)])
        series = self._series(ramp)
        d = measure_acceleration_rate(series)
        assert d == pytest.approx(1.0, rel=0.05)

    def test_truncated_series_refused(self):
        series = CurrentSeries(
            t=np.arange(100),
            mean_p=np.zeros(100),
            log_norm=np.zeros(100),
            participation=np.ones(100),
            mean_p2=np.zeros(100),
            truncation_warning=True,
        )
        with pytest.raises(TruncationError):
            measure_acceleration_rate(series, window=50)

    def test_window_validation(self):
        series = self._series(np.zeros(100))
        with pytest.raises(ValueError):
            measure_acceleration_rate(series, window=10)
        with pytest.raises(ValueError):
            measure_acceleration_rate(series, window=1000)

    def test_second_moment_rate(self):
        series = self._series(np.zeros(100), mean_p2=2.0 * np.arange(100.0))
        assert second_moment_rate(series) == pytest.approx(2.0)


class TestKickCoefficientConsistency:
    def test_participation_number(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=64)
        assert participation_number(make_ground_state(p)) == pytest.approx(1.0)
        amps = np.zeros(64, complex)
        amps[:4] = 0.5
        assert participation_number(MomentumState(amps, p.lattice)) == pytest.approx(4.0)

    def test_coefficients_against_quadrature(self):
        p = SystemParams(5.0, 0.0, 1.0, basis_size=256)
        ck = kick_coefficients(p)
        m = 16384
        thetas = -math.pi + 2.0 * math.pi * np.arange(m) / m
        uk = np.exp(-1j * (p.kick_strength / p.hbar_eff) * np.cos(thetas))
        for k in (0, 1, 5, 10, -7):
            ref = np.sum(uk * np.exp(-1j * k * thetas)) / m
            assert ck[k + p.basis_size - 1] == pytest.approx(ref, abs=1e-12)
