"""Split-operator evolution of the non-Hermitian Floquet map and current measurement.

One kick period applies free rotation (diagonal in momentum) followed by the
complex kick ``exp(-i*K*(cos(theta) + i*lambda*sin(theta))/hbar_eff)``,
diagonal in angle.  The kick acts on the N-point angle grid (cyclic torus
convention): Fourier content beyond the lattice band folds back mod N rather
than being dropped, which keeps the one-period operator exactly unitary at
lambda = 0 and identical to the dense Floquet matrix.  States that spread far
enough for the fold to matter are caught by the lattice-edge detector in
:func:`evolve`.

The gain factor is always rescaled by its global maximum
``exp(K*lambda/hbar_eff)``, which moves into the state's log-norm accumulator,
so no intermediate ever overflows even at peak gains of hundreds of
e-foldings per kick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    MomentumState,
    SystemParams,
    angle_to_momentum,
    momentum_to_angle,
)

__all__ = [
    "EvolveConfig",
    "CurrentSeries",
    "DegenerateStateError",
    "TruncationError",
    "apply_free",
    "apply_kick",
    "step",
    "mean_momentum",
    "participation_number",
    "evolve",
    "measure_acceleration_rate",
    "second_moment_rate",
    "Plateau",
    "find_plateaus",
]

OPERATOR_ORDERS = ("standard", "reordered")


class DegenerateStateError(ValueError):
    """State has zero stored norm; expectation values are undefined."""


class TruncationError(RuntimeError):
    """Series carries a truncation warning; derived rates would be unreliable."""


@dataclass(frozen=True)
class EvolveConfig:
    """Evolution length and bookkeeping knobs.

    operator_order 'standard' is the plain Floquet product (free flight, then
    kick); 'reordered' applies the real kick, free flight, then the gain --
    physically equivalent, exposed so runs can be compared against the
    Gaussian-packet oracle which is derived in that ordering.
    """

    n_kicks: int
    record_every: int = 1
    renormalize: bool = True
    operator_order: str = "standard"

    def __post_init__(self) -> None:
        if self.n_kicks < 1:
            raise ValueError(f"n_kicks must be >= 1, got {self.n_kicks}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        if self.operator_order not in OPERATOR_ORDERS:
            raise ValueError(f"operator_order must be one of {OPERATOR_ORDERS}")


@dataclass(frozen=True)
class CurrentSeries:
    """Per-kick record of the normalized momentum current.

    t             -- kick counts, starting at 0
    mean_p        -- <p(t)>, first momentum moment of the normalized state
    log_norm      -- natural log of the true norm (0 at t=0)
    participation -- participation number 1/sum(w_n^2) of the weights
    mean_p2       -- <p^2(t)>, kept as a diagnostic alongside the first moment
    """

    t: np.ndarray
    mean_p: np.ndarray
    log_norm: np.ndarray
    participation: np.ndarray
    mean_p2: np.ndarray
    truncation_warning: bool = False

    def __len__(self) -> int:
        return len(self.t)


@lru_cache(maxsize=16)
def _free_phases(params: SystemParams) -> np.ndarray:
    # exp(-i p_n^2 / (2 hbar)) = exp(-i hbar n^2 / 2)
    ns = params.lattice.indices.astype(np.float64)
    ph = np.exp(-0.5j * params.hbar_eff * ns * ns)
    ph.setflags(write=False)
    return ph


@lru_cache(maxsize=16)
def _kick_tables(params: SystemParams) -> tuple[np.ndarray, np.ndarray | None]:
    """(phase factor exp(-i K cos/hbar), gain factor exp(g (sin-1)) or None)."""
    thetas = params.kick_grid.thetas
    phase = np.exp(-1j * (params.kick_strength / params.hbar_eff) * np.cos(thetas))
    phase.setflags(write=False)
    gain = None
    if params.gain_strength > 0.0:
        g = params.gain_exponent
        gain = np.exp(g * (np.sin(thetas) - 1.0))
        gain.setflags(write=False)
    return phase, gain


def apply_free(state: MomentumState, params: SystemParams) -> MomentumState:
    """Free rotation over one period: psi_n *= exp(-i p_n^2/(2 hbar))."""
    if state.lattice != params.lattice:
        raise ValueError("state lattice does not match params")
    amps = state.amplitudes * _free_phases(params)
    return MomentumState(amps, state.lattice, state.log_norm)


def apply_kick(state: MomentumState, params: SystemParams) -> MomentumState:
    """One complex kick, applied in angle representation on the N-point grid.

    The gain is computed relative to its maximum exp(K*lambda/hbar_eff); that
    maximum is credited to log_norm, so the stored gain factor is always <= 1.
    """
    if state.lattice != params.lattice:
        raise ValueError("state lattice does not match params")
    phase, gain = _kick_tables(params)
    samples = momentum_to_angle(state, params.kick_grid)
    samples *= phase
    log_shift = 0.0
    if gain is not None:
        samples *= gain
        log_shift = params.gain_exponent
    amps = angle_to_momentum(samples, state.lattice)
    return MomentumState(amps, state.lattice, state.log_norm + log_shift)


def _renormalized(state: MomentumState) -> MomentumState:
    nrm = state.norm
    if nrm == 0.0 or not math.isfinite(nrm):
        raise DegenerateStateError(f"state norm is {nrm} after kick")
    return MomentumState(state.amplitudes / nrm, state.lattice, state.log_norm + math.log(nrm))


def step(
    state: MomentumState,
    params: SystemParams,
    renormalize: bool = True,
    operator_order: str = "standard",
) -> MomentumState:
    """Advance one kick period.

    'standard' order is free flight then the full complex kick; 'reordered'
    is real kick, free flight, then gain (same spectrum, different splitting).
    """
    if operator_order == "standard":
        out = apply_kick(apply_free(state, params), params)
    elif operator_order == "reordered":
        phase, gain = _kick_tables(params)
        samples = momentum_to_angle(state, params.kick_grid)
        samples = samples * phase
        amps = angle_to_momentum(samples, state.lattice) * _free_phases(params)
        log_shift = 0.0
        if gain is not None:
            samples = momentum_to_angle(
                MomentumState(amps, state.lattice, 0.0), params.kick_grid
            )
            samples *= gain
            amps = angle_to_momentum(samples, state.lattice)
            log_shift = params.gain_exponent
        out = MomentumState(amps, state.lattice, state.log_norm + log_shift)
    else:
        raise ValueError(f"operator_order must be one of {OPERATOR_ORDERS}")
    if not np.all(np.isfinite(out.amplitudes)):
        raise FloatingPointError("non-finite amplitudes after kick")
    if renormalize:
        out = _renormalized(out)
    return out


def mean_momentum(state: MomentumState) -> float:
    """Norm-normalized first moment sum_n p_n |psi_n|^2 / sum_n |psi_n|^2."""
    w = np.abs(state.amplitudes) ** 2
    total = w.sum()
    if total == 0.0:
        raise DegenerateStateError("zero-norm state has no mean momentum")
    return float((state.lattice.momenta @ w) / total)


def participation_number(state: MomentumState) -> float:
    """1 / sum_n w_n^2 for normalized weights; counts occupied momentum states."""
    w = state.probabilities()
    return float(1.0 / (w @ w))


def _edge_mass(state: MomentumState, edge_fraction: float = 0.02) -> float:
    """Probability mass in the outermost edge_fraction of lattice sites (each side)."""
    w = state.probabilities()
    width = max(1, int(round(edge_fraction * state.lattice.size)))
    return float(w[:width].sum() + w[-width:].sum())


def evolve(initial: MomentumState, params: SystemParams, config: EvolveConfig) -> CurrentSeries:
    """Iterate the kick map, recording the current at the configured cadence."""
    state = initial
    ts = [0]
    mean_ps = [mean_momentum(state)]
    log_norms = [state.total_log_norm]
    participations = [participation_number(state)]
    mean_p2s = [_second_moment(state)]
    truncated = _edge_mass(state) >= 1e-8

    for t in range(1, config.n_kicks + 1):
        state = step(state, params, config.renormalize, config.operator_order)
        if t % config.record_every == 0 or t == config.n_kicks:
            ts.append(t)
            mean_ps.append(mean_momentum(state))
            log_norms.append(state.total_log_norm)
            participations.append(participation_number(state))
            mean_p2s.append(_second_moment(state))
            if not truncated and _edge_mass(state) >= 1e-8:
                truncated = True

    return CurrentSeries(
        t=np.asarray(ts, dtype=np.int64),
        mean_p=np.asarray(mean_ps),
        log_norm=np.asarray(log_norms),
        participation=np.asarray(participations),
        mean_p2=np.asarray(mean_p2s),
        truncation_warning=truncated,
    )


def _second_moment(state: MomentumState) -> float:
    w = state.probabilities()
    return float((state.lattice.momenta**2) @ w)


def measure_acceleration_rate(series: CurrentSeries, window: int | None = None) -> float:
    """Least-squares slope of mean_p versus t over the final `window` samples.

    For lambda well above threshold <p(t)> = D*t, so the slope is the
    acceleration rate D.  Refuses series flagged as lattice-truncated.
    """
    if series.truncation_warning:
        raise TruncationError(
            "series carries a truncation warning (probability mass reached the "
            "lattice edge); acceleration rate would be unreliable"
        )
    if window is None:
        window = len(series) // 2
    if window < 50:
        raise ValueError(f"fit window must cover >= 50 samples, got {window}")
    if window > len(series):
        raise ValueError(f"fit window {window} exceeds series length {len(series)}")
    t = series.t[-window:].astype(np.float64)
    p = series.mean_p[-window:]
    return float(np.polyfit(t, p, 1)[0])


def second_moment_rate(series: CurrentSeries) -> float:
    """Diagnostic <p^2(t_f)>/t_f ratio; reported alongside the first-moment slope."""
    if series.t[-1] == 0:
        raise ValueError("series has no kicks")
    return float(series.mean_p2[-1] / series.t[-1])


@dataclass(frozen=True)
class Plateau:
    """Flat segment of a current series: [t_start, t_end] at `level`."""

    t_start: int
    t_end: int
    level: float

    @property
    def length(self) -> int:
        return self.t_end - self.t_start


def find_plateaus(
    series: CurrentSeries,
    slope_tol: float = 0.02,
    min_length: int = 30,
    merge_tol: float | None = None,
) -> list[Plateau]:
    """Maximal flat segments: least-squares slope under slope_tol per kick.

    Greedy left-to-right scan; each plateau is extended while the fitted
    slope of the whole segment stays below tolerance.  Consecutive plateaus
    closer than merge_tol in level are reported as one (a stair revisited
    through noise is a single platform).
    """
    t = series.t.astype(np.float64)
    p = series.mean_p
    n = len(p)
    found: list[Plateau] = []
    i = 0
    while i + min_length < n:
        j = i + min_length
        if abs(_lsq_slope(t[i : j + 1], p[i : j + 1])) < slope_tol:
            while j + 1 < n and abs(_lsq_slope(t[i : j + 2], p[i : j + 2])) < slope_tol:
                j += 1
            found.append(Plateau(int(series.t[i]), int(series.t[j]), float(np.mean(p[i : j + 1]))))
            i = j + 1
        else:
            i += 1
    if merge_tol is None or not found:
        return found
    merged = [found[0]]
    for seg in found[1:]:
        if abs(seg.level - merged[-1].level) < merge_tol:
            total = merged[-1].length + seg.length
            level = (
                merged[-1].level * merged[-1].length + seg.level * seg.length
            ) / total
            merged[-1] = Plateau(merged[-1].t_start, seg.t_end, level)
        else:
            merged.append(seg)
    return merged


def _lsq_slope(t: np.ndarray, p: np.ndarray) -> float:
    tc = t - t.mean()
    denom = float(tc @ tc)
    return float((tc @ (p - p.mean())) / denom) if denom else 0.0
