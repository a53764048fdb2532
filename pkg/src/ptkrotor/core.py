"""Dimensionless parameterization, momentum/angle grids, and the transform pair.

Everything downstream (split-step dynamics, Floquet matrix construction,
eigenstate momenta) depends on the conventions fixed here:

* momentum lattice ``n = -N/2 .. N/2-1`` with ``p_n = n * hbar_eff``,
* angle grid ``theta_j = -pi + 2*pi*j/M`` on the canonical interval
  ``[-pi, pi)``, so the gain half ``(0, pi)`` and the loss half ``(-pi, 0)``
  map onto grid halves,
* basis ``<theta|n> = exp(i*n*theta)/sqrt(2*pi)`` with both transform
  directions spelled out explicitly below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi
SQRT_TWO_PI = math.sqrt(TWO_PI)

__all__ = [
    "SystemParams",
    "MomentumLattice",
    "AngleGrid",
    "MomentumState",
    "make_ground_state",
    "momentum_to_angle",
    "angle_to_momentum",
    "wrap_angle",
]


def _reject_resonant_hbar(hbar_eff: float, max_denominator: int = 64) -> None:
    """Reject hbar_eff that is an exact rational multiple of 4*pi.

    Rational hbar_eff/(4*pi) with a small denominator is the quantum-resonance
    regime, which is out of scope.  "Exact" is judged via the best rational
    approximant with denominator <= max_denominator.
    """
    ratio = hbar_eff / (4.0 * math.pi)
    approx = Fraction(ratio).limit_denominator(max_denominator)
    if abs(ratio - float(approx)) <= 1e-12 * max(1.0, abs(ratio)):
        raise ValueError(
            f"hbar_eff={hbar_eff!r} is resonant: hbar_eff/(4*pi) ~ {approx} "
            f"(denominator <= {max_denominator}); pick a non-resonant value"
        )


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless parameter triple plus discretization sizes.

    kick_strength  -- K, real part amplitude of the kick potential, > 0
    gain_strength  -- lambda, imaginary part amplitude, >= 0
    hbar_eff       -- effective Planck constant, > 0 and non-resonant
    basis_size     -- N, even momentum-lattice size, >= 64
    oversample     -- angle-grid oversampling factor M/N, >= 2
    """

    kick_strength: float
    gain_strength: float
    hbar_eff: float
    basis_size: int = 2048
    oversample: int = 2

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kick_strength) and self.kick_strength > 0):
            raise ValueError(f"kick_strength must be positive, got {self.kick_strength!r}")
        if not (math.isfinite(self.gain_strength) and self.gain_strength >= 0):
            raise ValueError(f"gain_strength must be >= 0, got {self.gain_strength!r}")
        if not (math.isfinite(self.hbar_eff) and self.hbar_eff > 0):
            raise ValueError(f"hbar_eff must be positive, got {self.hbar_eff!r}")
        if self.basis_size < 64 or self.basis_size % 2:
            raise ValueError(f"basis_size must be even and >= 64, got {self.basis_size}")
        if self.oversample < 2:
            raise ValueError(f"oversample must be >= 2, got {self.oversample}")
        _reject_resonant_hbar(self.hbar_eff)

    @cached_property
    def lattice(self) -> "MomentumLattice":
        return MomentumLattice(self.basis_size, self.hbar_eff)

    @cached_property
    def grid(self) -> "AngleGrid":
        """Oversampled grid for general angle-representation analysis."""
        return AngleGrid(self.basis_size * self.oversample)

    @cached_property
    def kick_grid(self) -> "AngleGrid":
        """N-point grid on which the one-period kick acts (cyclic torus convention).

        Evaluating the kick factor on exactly N angle samples folds its Fourier
        content mod N instead of dropping it, which keeps the one-period
        operator exactly unitary at lambda = 0 and bit-consistent between the
        split-step path and the dense matrix.
        """
        return AngleGrid(self.basis_size)

    @property
    def gain_exponent(self) -> float:
        """K * lambda / hbar_eff, the peak per-kick log-gain."""
        return self.kick_strength * self.gain_strength / self.hbar_eff


@dataclass(frozen=True)
class MomentumLattice:
    """Integer index lattice n = -N/2 .. N/2-1 with momenta p_n = n*hbar_eff."""

    size: int
    hbar_eff: float

    def __post_init__(self) -> None:
        if self.size % 2 or self.size <= 0:
            raise ValueError(f"lattice size must be even and positive, got {self.size}")

    @cached_property
    def indices(self) -> np.ndarray:
        n = np.arange(-self.size // 2, self.size // 2)
        n.setflags(write=False)
        return n

    @cached_property
    def momenta(self) -> np.ndarray:
        p = self.indices * self.hbar_eff
        p.setflags(write=False)
        return p

    def index_of(self, n: int) -> int:
        """Array position of lattice index n."""
        if not -self.size // 2 <= n < self.size // 2:
            raise ValueError(f"lattice index {n} outside [-{self.size // 2}, {self.size // 2})")
        return n + self.size // 2


@dataclass(frozen=True)
class AngleGrid:
    """Uniform angle samples theta_j = -pi + 2*pi*j/M on [-pi, pi)."""

    size: int

    def __post_init__(self) -> None:
        if self.size <= 0:
            raise ValueError(f"grid size must be positive, got {self.size}")

    @cached_property
    def thetas(self) -> np.ndarray:
        th = -math.pi + TWO_PI * np.arange(self.size) / self.size
        th.setflags(write=False)
        return th

    @property
    def spacing(self) -> float:
        return TWO_PI / self.size


@dataclass(frozen=True)
class MomentumState:
    """Complex amplitudes over a momentum lattice plus a log-norm accumulator.

    The physically meaningful norm is ``exp(log_norm) * ||amplitudes||``; the
    split keeps the stored vector representable even when the non-Hermitian
    gain grows the true norm by hundreds of e-foldings.
    """

    amplitudes: np.ndarray
    lattice: MomentumLattice
    log_norm: float = 0.0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.lattice.size,):
            raise ValueError(
                f"amplitude shape {amps.shape} does not match lattice size {self.lattice.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        """2-norm of the stored amplitude vector (excludes log_norm)."""
        return float(np.linalg.norm(self.amplitudes))

    @property
    def total_log_norm(self) -> float:
        """Natural log of the true norm, log_norm + log(stored norm)."""
        return self.log_norm + math.log(self.norm)

    def probabilities(self) -> np.ndarray:
        """Normalized probability weights |psi_n|^2 / sum."""
        w = np.abs(self.amplitudes) ** 2
        total = w.sum()
        if total == 0.0:
            raise ValueError("cannot normalize a zero-norm state")
        return w / total


def make_ground_state(params: SystemParams) -> MomentumState:
    """Ground state of the angular momentum operator: psi_n = delta_{n,0}."""
    lat = params.lattice
    amps = np.zeros(lat.size, dtype=np.complex128)
    amps[lat.index_of(0)] = 1.0
    return MomentumState(amps, lat, log_norm=0.0)


def _alternating_signs(indices: np.ndarray) -> np.ndarray:
    """(-1)**n for integer lattice indices, computed exactly."""
    return 1.0 - 2.0 * (indices & 1)


def momentum_to_angle(state: MomentumState, grid: AngleGrid) -> np.ndarray:
    """Evaluate psi(theta_j) = sum_n psi_n exp(i*n*theta_j)/sqrt(2*pi).

    Requires grid.size >= lattice.size so the expansion is alias-free;
    angle_to_momentum then inverts it exactly on band-limited input.
    """
    lat = state.lattice
    if grid.size < lat.size:
        raise ValueError(f"angle grid size {grid.size} smaller than lattice size {lat.size}")
    ns = lat.indices
    padded = np.zeros(grid.size, dtype=np.complex128)
    # theta_j = -pi + 2*pi*j/M turns exp(i*n*theta_j) into (-1)^n exp(2*pi*i*n*j/M)
    padded[ns % grid.size] = state.amplitudes * _alternating_signs(ns)
    return np.fft.ifft(padded) * (grid.size / SQRT_TWO_PI)


def angle_to_momentum(samples: np.ndarray, lattice: MomentumLattice) -> np.ndarray:
    """Project angle samples back: psi_n = (2*pi/M) sum_j psi(theta_j) exp(-i*n*theta_j)/sqrt(2*pi).

    Exact inverse of momentum_to_angle for band-limited input with M >= N.
    Returns the amplitude vector over the lattice.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    m = samples.shape[0]
    if samples.ndim != 1 or m < lattice.size:
        raise ValueError(f"sample count {samples.shape} smaller than lattice size {lattice.size}")
    ns = lattice.indices
    spectrum = np.fft.fft(samples)
    return spectrum[ns % m] * _alternating_signs(ns) * (SQRT_TWO_PI / m)


def wrap_angle(theta):
    """Reduce an angle to the canonical interval [-pi, pi)."""
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise ValueError("wrap_angle requires finite input")
    wrapped = np.mod(theta + math.pi, TWO_PI) - math.pi
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped
