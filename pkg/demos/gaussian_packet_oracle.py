"""Gaussian-packet recursion as an analytic oracle for the strong-gain dynamics.

When K/hbar >> 1 and lambda*K/hbar >> 1, one full kick period maps a
minimum-uncertainty Gaussian to another: the gain re-centers the angle at
pi/2 (mod 2*pi), the momentum snaps to the nearest multiple of 2*pi, and the
widths relax to

    dtheta = sqrt(hbar/(2*lambda*K)),   dp = sqrt(hbar*lambda*K/2),

whose product is exactly hbar/2.  Iterating the recursion predicts a
constant per-kick momentum increment of 2*pi*round(K/(2*pi)) -- the same
quantized rate the full quantum evolution measures.

Run:  python3 demos/gaussian_packet_oracle.py   (seconds)
"""

import numpy as np

from ptkrotor import SystemParams, validity_check
from ptkrotor.experiments import ExperimentConfig, run_oracle_compare

params = SystemParams(kick_strength=5.0, gain_strength=5.0, hbar_eff=0.1, basis_size=64)

print(__doc__)
v = validity_check(params)
print(
    f"validity at K=5, lambda=5, hbar=0.1: lambda*K/hbar = {v.gain_ratio:.0f}, "
    f"K/hbar = {v.kick_ratio:.0f} -> {'valid' if v.valid else 'invalid'}"
)

table = run_oracle_compare(ExperimentConfig(kind="oracle-compare", params=params, n_kicks=60))
q = table.column("quantum_increment")
o = table.column("oracle_increment")
t = table.column("t")
print(f"\n{'t':>4} {'quantum dp':>12} {'oracle dp':>12}")
for i in range(1, 16):
    print(f"{t[i]:4d} {q[i]:12.4f} {o[i]:12.4f}")
rel = np.abs(q[6:] - o[6:]) / np.abs(o[6:])
print(f"\nmax relative deviation after the 5-kick transient: {rel.max()*100:.2f}%")
print(f"oracle rate D = {float(table.metadata['oracle_rate']):.6f} (2*pi = {2*np.pi:.6f})")
