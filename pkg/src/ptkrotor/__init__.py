"""PT-symmetric quantum kicked rotor toolkit.

Simulates the kicked rotor with the complex potential
K*(cos(theta) + i*lambda*sin(theta)), computes its non-Hermitian Floquet
spectrum, and reproduces the directed-current phenomenology: the
PT-breaking transition, the staircase momentum current near threshold, and
the quantized acceleration rate D = 2*n*pi far above it.
"""

from .classical import (
    ClassicalState,
    Trajectory,
    acceleration_rate_prediction,
    classical_D,
    gain_loss_step,
    iterate_gain_loss,
    standard_map_step,
)
from .core import (
    AngleGrid,
    MomentumLattice,
    MomentumState,
    SystemParams,
    angle_to_momentum,
    make_ground_state,
    momentum_to_angle,
    wrap_angle,
)
from .dynamics import (
    CurrentSeries,
    EvolveConfig,
    Plateau,
    apply_free,
    apply_kick,
    evolve,
    find_plateaus,
    mean_momentum,
    measure_acceleration_rate,
    participation_number,
    step,
)
from .oracle import (
    GaussianPacket,
    OracleTrajectory,
    equilibrium_widths,
    oracle_trajectory,
    propagate_packet,
    validity_check,
)
from .spectrum import (
    FloquetMatrix,
    PlatformSet,
    QuasiSpectrum,
    build_floquet_matrix,
    dominant_platforms,
    eigendecompose,
    eigenstate_mean_momentum,
    kick_coefficients,
    lambda_sweep,
    mean_abs_imag,
    pt_threshold,
)

__version__ = "0.1.0"
