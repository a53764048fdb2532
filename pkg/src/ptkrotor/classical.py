"""Chirikov standard map and its gain-loss-modified accelerator mode.

The unmodified map is

    p' = p + K sin(theta),   theta' = theta + p'   (unwrapped).

The gain-loss variant models the re-centering action of the complex kick:
whenever the post-map angle lands within a capture half-width of pi/2 (mod
2*pi), the trajectory snaps to the nearest accelerator point, theta to
pi/2 + 2*k*pi and p to the nearest multiple of 2*pi.  With the default
capture width the snapped orbit accelerates at exactly 2*pi*round(K/(2*pi))
per kick, the quantized staircase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import wrap_angle

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
DEFAULT_CAPTURE_WIDTH = math.pi

__all__ = [
    "ClassicalState",
    "Trajectory",
    "standard_map_step",
    "gain_loss_step",
    "iterate_gain_loss",
    "acceleration_rate_prediction",
    "classical_D",
]


@dataclass(frozen=True)
class ClassicalState:
    """Unwrapped angle and angular momentum of a single trajectory."""

    theta: float
    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.p)):
            raise ValueError(f"non-finite classical state ({self.theta}, {self.p})")


@dataclass(frozen=True)
class Trajectory:
    """Per-kick states (length n_kicks+1) plus momentum increments and snap flags."""

    theta: np.ndarray
    p: np.ndarray
    snapped: np.ndarray

    def __len__(self) -> int:
        return len(self.p)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.p)


def standard_map_step(state: ClassicalState, kick_strength: float) -> ClassicalState:
    """One unmodified kick: p' = p + K sin(theta), theta' = theta + p'."""
    p_next = state.p + kick_strength * math.sin(state.theta)
    return ClassicalState(state.theta + p_next, p_next)


def gain_loss_step(
    state: ClassicalState,
    kick_strength: float,
    capture_width: float = DEFAULT_CAPTURE_WIDTH,
) -> tuple[ClassicalState, bool]:
    """Standard-map kick followed by the gain-loss snap.

    If the post-kick angle is within capture_width of pi/2 (mod 2*pi), the
    state snaps to the nearest theta = pi/2 + 2*k*pi and the nearest multiple
    of 2*pi in momentum.  Returns the new state and whether a snap occurred.
    """
    moved = standard_map_step(state, kick_strength)
    if abs(wrap_angle(moved.theta - HALF_PI)) < capture_width:
        k = np.rint((moved.theta - HALF_PI) / TWO_PI)
        snapped = ClassicalState(HALF_PI + TWO_PI * k, TWO_PI * np.rint(moved.p / TWO_PI))
        return snapped, True
    return moved, False


def iterate_gain_loss(
    initial: ClassicalState,
    kick_strength: float,
    n_kicks: int,
    capture_width: float = DEFAULT_CAPTURE_WIDTH,
) -> Trajectory:
    """Iterate gain_loss_step, recording every state."""
    thetas = np.empty(n_kicks + 1)
    ps = np.empty(n_kicks + 1)
    snaps = np.zeros(n_kicks, dtype=bool)
    state = initial
    thetas[0], ps[0] = state.theta, state.p
    for j in range(n_kicks):
        state, snaps[j] = gain_loss_step(state, kick_strength, capture_width)
        thetas[j + 1], ps[j + 1] = state.theta, state.p
    return Trajectory(thetas, ps, snaps)


def acceleration_rate_prediction(kick_strength: float) -> float:
    """Quantized rate 2*pi*round(K/(2*pi)); zero below K = pi."""
    if kick_strength <= 0:
        raise ValueError(f"kick strength must be positive, got {kick_strength}")
    return TWO_PI * float(np.rint(kick_strength / TWO_PI))


def classical_D(
    kick_strength: float,
    n_kicks: int = 200,
    capture_width: float = DEFAULT_CAPTURE_WIDTH,
) -> float:
    """Measured acceleration rate of the snapped trajectory from (pi/2, 0).

    Least-squares slope of p versus kick count; the snap makes the dynamics
    exactly periodic after the first kick, so this matches
    acceleration_rate_prediction to round-off for K >= pi.
    """
    if n_kicks < 100:
        raise ValueError(f"need >= 100 kicks for a stable fit, got {n_kicks}")
    traj = iterate_gain_loss(ClassicalState(HALF_PI, 0.0), kick_strength, n_kicks, capture_width)
    t = np.arange(n_kicks + 1, dtype=np.float64)
    return float(np.polyfit(t, traj.p, 1)[0])
