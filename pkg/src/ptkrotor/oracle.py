"""Analytic Gaussian-wavepacket propagator for the strong-gain regime.

For K/hbar >> 1 and lambda*K/hbar >> 1 the state after every kick period is a
minimum-uncertainty Gaussian re-centered by the gain at theta = pi/2 (mod
2*pi) with momentum snapped to the nearest multiple of 2*pi.  This module
iterates that closed-form recursion, giving an independent cross-check of the
full split-operator dynamics: the per-kick momentum increment is the
quantized rate 2*pi*round(K/(2*pi)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import DEFAULT_CAPTURE_WIDTH
from .core import SystemParams

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

__all__ = [
    "GaussianPacket",
    "OracleValidity",
    "CaptureRangeError",
    "equilibrium_widths",
    "validity_check",
    "propagate_packet",
    "oracle_trajectory",
    "OracleTrajectory",
]


class CaptureRangeError(RuntimeError):
    """Packet drifted outside the gain's capture range; the recursion's premise fails."""


@dataclass(frozen=True)
class GaussianPacket:
    """Gaussian state summary: center (theta_bar, p_bar) and widths (dtheta, dp)."""

    theta_bar: float
    p_bar: float
    dtheta: float
    dp: float

    def __post_init__(self) -> None:
        if self.dtheta <= 0 or self.dp <= 0:
            raise ValueError(f"widths must be positive, got ({self.dtheta}, {self.dp})")

    @property
    def uncertainty_product(self) -> float:
        return self.dtheta * self.dp


@dataclass(frozen=True)
class OracleValidity:
    """Regime check: both ratios must clear the validity threshold (10)."""

    valid: bool
    gain_ratio: float  # lambda*K/hbar
    kick_ratio: float  # K/hbar


VALIDITY_THRESHOLD = 10.0


def validity_check(params: SystemParams) -> OracleValidity:
    """Whether the Gaussian recursion applies: lambda*K/hbar and K/hbar both >= 10."""
    gain_ratio = params.gain_exponent
    kick_ratio = params.kick_strength / params.hbar_eff
    return OracleValidity(
        valid=(gain_ratio >= VALIDITY_THRESHOLD and kick_ratio >= VALIDITY_THRESHOLD),
        gain_ratio=gain_ratio,
        kick_ratio=kick_ratio,
    )


def equilibrium_widths(params: SystemParams) -> tuple[float, float]:
    """Post-kick widths: dtheta = sqrt(hbar/(2*lambda*K)), dp = sqrt(hbar*lambda*K/2)."""
    lk = params.gain_strength * params.kick_strength
    if lk <= 0:
        raise ValueError("equilibrium widths require lambda > 0 and K > 0")
    return math.sqrt(params.hbar_eff / (2.0 * lk)), math.sqrt(params.hbar_eff * lk / 2.0)


def propagate_packet(
    packet: GaussianPacket,
    params: SystemParams,
    capture_width: float = DEFAULT_CAPTURE_WIDTH,
) -> GaussianPacket:
    """Advance the packet through one full kick period.

    The kicked momentum p_bar + K decomposes as 2*n0*pi + Delta; the free
    flight carries the center to distance Delta from pi/2 (mod 2*pi), and the
    gain re-centers it exactly when |Delta| < capture_width, leaving

        theta_bar = pi/2 + 2*n0*pi,   p_bar = 2*n0*pi,

    with widths reset to their equilibrium values.
    """
    validity = validity_check(params)
    if not validity.valid:
        raise ValueError(
            f"oracle regime invalid: lambda*K/hbar={validity.gain_ratio:.3g}, "
            f"K/hbar={validity.kick_ratio:.3g} (both must be >= {VALIDITY_THRESHOLD})"
        )
    p_kicked = packet.p_bar + params.kick_strength
    n0 = float(np.rint(p_kicked / TWO_PI))
    delta = p_kicked - TWO_PI * n0
    if abs(delta) >= capture_width:
        raise CaptureRangeError(
            f"offset |Delta|={abs(delta):.4f} >= capture width {capture_width:.4f}; "
            "the gain no longer re-centers the packet"
        )
    dtheta, dp = equilibrium_widths(params)
    return GaussianPacket(HALF_PI + TWO_PI * n0, TWO_PI * n0, dtheta, dp)


@dataclass(frozen=True)
class OracleTrajectory:
    """Centers per kick plus the constant per-kick momentum increment D."""

    theta_bar: np.ndarray
    p_bar: np.ndarray
    rate: float


def oracle_trajectory(
    params: SystemParams,
    n_kicks: int,
    capture_width: float = DEFAULT_CAPTURE_WIDTH,
) -> OracleTrajectory:
    """Iterate the packet recursion from (pi/2, 0) and report the rate D.

    Each period adds exactly 2*n*pi with n = round(K/(2*pi)) to the momentum
    center; the constant increment is returned as the acceleration rate.
    """
    dtheta, dp = equilibrium_widths(params)
    packet = GaussianPacket(HALF_PI, 0.0, dtheta, dp)
    thetas = np.empty(n_kicks + 1)
    ps = np.empty(n_kicks + 1)
    thetas[0], ps[0] = packet.theta_bar, packet.p_bar
    for j in range(n_kicks):
        packet = propagate_packet(packet, params, capture_width)
        thetas[j + 1], ps[j + 1] = packet.theta_bar, packet.p_bar
    increments = np.diff(ps)
    if n_kicks and not np.allclose(increments, increments[0], rtol=0, atol=1e-9):
        raise AssertionError("oracle increment is not constant")  # recursion violated
    rate = float(increments[0]) if n_kicks else 0.0
    return OracleTrajectory(thetas, ps, rate)
