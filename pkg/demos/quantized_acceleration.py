"""Quantized acceleration rate: D = 2*n*pi plateaus in the strong-gain regime.

For small hbar_eff and strong gain the wavepacket re-forms each period as a
narrow Gaussian at theta = pi/2 with momentum snapped to the nearest
multiple of 2*pi.  Three independent routes give the same staircase D(K):

  * the gain-modified classical standard map (exact after snapping),
  * the closed-form Gaussian-packet recursion,
  * the full split-operator quantum evolution.

Run:  python3 demos/quantized_acceleration.py   (about a minute)
"""

import math

import numpy as np

from ptkrotor import (
    EvolveConfig,
    SystemParams,
    acceleration_rate_prediction,
    classical_D,
    evolve,
    make_ground_state,
    measure_acceleration_rate,
    oracle_trajectory,
)
from ptkrotor.experiments import auto_basis_size

print(__doc__)
print(f"{'K':>10} {'prediction':>11} {'classical':>11} {'oracle':>11} {'quantum':>11}")
for k in (2 * math.pi, 5.0, 9.0, 4 * math.pi, 15.0, 6 * math.pi, 22.0):
    pred = acceleration_rate_prediction(k)
    d_cl = classical_D(k, n_kicks=300)
    params = SystemParams(k, 5.0, 0.1, basis_size=auto_basis_size(k, 0.1, 300, 5.0))
    d_or = oracle_trajectory(params, 50).rate
    series = evolve(make_ground_state(params), params, EvolveConfig(n_kicks=300))
    d_q = measure_acceleration_rate(series, window=150)
    print(f"{k:10.4f} {pred:11.4f} {d_cl:11.4f} {d_or:11.4f} {d_q:11.4f}")

print(
    "\nclassical and oracle reproduce the prediction exactly; the quantum rate\n"
    "agrees on the plateaus and interpolates smoothly near the transition\n"
    "points K = (2n+1)*pi, where the packet is only marginally captured."
)
