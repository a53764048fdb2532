"""Truncated Floquet matrix, its complex eigendecomposition, and PT-breaking observables.

The one-period operator in the momentum basis is

    U_{mn} = c_{m-n} * exp(-i*hbar_eff*n^2/2),

where ``c_k`` are Fourier coefficients of the complex kick factor
``exp(-i*K*(cos(theta) + i*lambda*sin(theta))/hbar_eff)`` analyzed on the
N-point grid, so the coefficients are N-periodic and the finite matrix is
exactly the operator the split-step dynamics applies (unitary at lambda = 0).
The matrix is dense but banded in practice (|c_k| decays super-exponentially
past |k| ~ K/hbar_eff).  The eigenproblem is that of a general non-normal
complex matrix; every eigenpair is residual-validated.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .core import MomentumLattice, SystemParams

__all__ = [
    "FloquetMatrix",
    "QuasiSpectrum",
    "PlatformCluster",
    "PlatformSet",
    "EigensolverError",
    "kick_coefficients",
    "build_floquet_matrix",
    "eigendecompose",
    "mean_abs_imag",
    "eigenstate_mean_momentum",
    "lambda_sweep",
    "pt_threshold",
    "dominant_platforms",
]

MAX_DENSE_SIZE = 8192
RESIDUAL_TOL = 1e-8


class EigensolverError(RuntimeError):
    """Eigendecomposition failed to converge or to validate."""


@dataclass(frozen=True)
class FloquetMatrix:
    """Dense N x N one-period operator plus the parameters that built it."""

    matrix: np.ndarray
    params: SystemParams

    def __post_init__(self) -> None:
        n = self.params.basis_size
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match N={n}")


@dataclass(frozen=True)
class QuasiSpectrum:
    """Full eigenpair table, sorted by descending imaginary part.

    eps_r     -- real quasi-energy, branch (-pi, pi]
    eps_i     -- imaginary quasi-energy, log|mu| (growth rate per kick)
    eigvecs   -- unit-norm eigenvectors, one per column
    mean_p    -- first momentum moment of each eigenvector
    ipr       -- inverse participation ratio sum |v_n|^4
    residual  -- ||U v - mu v||_2, validated <= 1e-8
    """

    eps_r: np.ndarray
    eps_i: np.ndarray
    eigvecs: np.ndarray
    mean_p: np.ndarray
    ipr: np.ndarray
    residual: np.ndarray
    params: SystemParams

    def __len__(self) -> int:
        return len(self.eps_i)


def kick_coefficients(params: SystemParams) -> np.ndarray:
    """Fourier coefficients c_k of the kick factor for k = -(N-1) .. N-1.

    c_k = (1/2*pi) integral exp(-i*V_K(theta)/hbar) exp(-i*k*theta) dtheta,
    evaluated by discrete Fourier analysis on the N-point grid the kick acts
    on (cyclic torus convention, so c_{k-N} = c_k and the finite matrix stays
    exactly unitary at lambda = 0).  Returned array is indexed by k + (N-1).
    """
    n = params.basis_size
    if params.gain_exponent > 700.0:
        raise OverflowError(
            f"peak gain K*lambda/hbar = {params.gain_exponent:.1f} exceeds the "
            "representable range for a dense Floquet matrix"
        )
    thetas = params.kick_grid.thetas
    # exp(-i V_K/hbar) with V_K = K (cos + i*lambda*sin): phase from cos, gain from sin
    scale = params.kick_strength / params.hbar_eff
    kick = np.exp(scale * (-1j * np.cos(thetas) + params.gain_strength * np.sin(thetas)))
    spectrum_full = np.fft.fft(kick)
    ks = np.arange(-(n - 1), n)
    signs = 1.0 - 2.0 * (ks & 1)
    return spectrum_full[ks % n] * signs / n


def build_floquet_matrix(params: SystemParams) -> FloquetMatrix:
    """Assemble U_{mn} = c_{m-n} exp(-i*hbar*n^2/2) for the truncated lattice."""
    n = params.basis_size
    if n > MAX_DENSE_SIZE:
        raise ValueError(f"basis_size {n} exceeds dense storage budget {MAX_DENSE_SIZE}")
    ck = kick_coefficients(params)
    # Toeplitz layout: entry (m, n) needs c_{m-n}; column = k >= 0, row = k <= 0.
    col = ck[n - 1 :]
    row = ck[n - 1 :: -1]
    kick_part = scipy.linalg.toeplitz(col, row)
    ns = params.lattice.indices.astype(np.float64)
    free = np.exp(-0.5j * params.hbar_eff * ns * ns)
    return FloquetMatrix(kick_part * free[np.newaxis, :], params)


def eigendecompose(fm: FloquetMatrix) -> QuasiSpectrum:
    """Full complex eigendecomposition with mandatory residual validation.

    Eigenvalues mu map to quasi-energies via mu = exp(-i*eps):
    eps_r = -arg(mu) on (-pi, pi], eps_i = log|mu|.
    """
    u = fm.matrix
    if not np.all(np.isfinite(u)):
        raise ValueError("Floquet matrix contains non-finite entries")
    try:
        mu, vecs = scipy.linalg.eig(u)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc
    bad = np.flatnonzero(~np.isfinite(mu))
    if bad.size:
        raise EigensolverError(f"non-finite eigenvalue at index {bad[0]}")

    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    residual = np.linalg.norm(u @ vecs - mu[np.newaxis, :] * vecs, axis=0)
    worst = int(np.argmax(residual))
    if residual[worst] > RESIDUAL_TOL:
        raise EigensolverError(
            f"eigenpair {worst} residual {residual[worst]:.3e} exceeds {RESIDUAL_TOL:.0e}"
        )

    eps_r = -np.angle(mu)
    eps_r = np.where(eps_r <= -math.pi, eps_r + 2.0 * math.pi, eps_r)
    eps_i = np.log(np.abs(mu))
    weights = np.abs(vecs) ** 2
    mean_p = fm.params.lattice.momenta @ weights
    ipr = np.sum(weights**2, axis=0)

    order = np.argsort(-eps_i, kind="stable")
    return QuasiSpectrum(
        eps_r=eps_r[order],
        eps_i=eps_i[order],
        eigvecs=vecs[:, order],
        mean_p=mean_p[order],
        ipr=ipr[order],
        residual=residual[order],
        params=fm.params,
    )


def mean_abs_imag(spec: QuasiSpectrum) -> float:
    """PT-breaking order parameter: arithmetic mean of |eps_i| over the spectrum."""
    if len(spec) == 0:
        raise ValueError("empty spectrum")
    return float(np.mean(np.abs(spec.eps_i)))


def eigenstate_mean_momentum(vec: np.ndarray, lattice: MomentumLattice) -> float:
    """First momentum moment sum_n p_n |v_n|^2 of a unit-norm eigenvector."""
    return float(lattice.momenta @ (np.abs(vec) ** 2))


def _sweep_point(params: SystemParams, lam: float) -> tuple[float, float, float]:
    spec = eigendecompose(build_floquet_matrix(replace(params, gain_strength=lam)))
    return lam, mean_abs_imag(spec), float(np.max(spec.eps_i))


def lambda_sweep(
    params: SystemParams,
    lambda_grid,
    workers: int = 1,
) -> list[tuple[float, float, float]]:
    """One spectrum per lambda; rows (lambda, mean |eps_i|, max eps_i) in grid order."""
    lams = [float(l) for l in lambda_grid]
    if not lams:
        raise ValueError("lambda grid is empty")
    if any(b < a for a, b in zip(lams, lams[1:])):
        raise ValueError("lambda grid must be sorted ascending")
    if workers <= 1:
        return [_sweep_point(params, lam) for lam in lams]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda lam: _sweep_point(params, lam), lams))


def pt_threshold(
    params: SystemParams,
    lo: float = 0.06,
    hi: float = 0.09,
    tol: float = 1e-3,
    criterion: float = 1e-6,
) -> float:
    """Bisect the PT-breaking threshold lambda_c to absolute tolerance `tol`.

    A spectrum counts as broken when mean |eps_i| exceeds `criterion`.  The
    initial bracket must straddle the transition.
    """
    if not lo < hi:
        raise ValueError(f"invalid bracket ({lo}, {hi})")

    def broken(lam: float) -> bool:
        _, mai, _ = _sweep_point(params, lam)
        return mai > criterion

    if broken(lo):
        raise ValueError(f"lower bracket lambda={lo} is already PT-broken")
    if not broken(hi):
        raise ValueError(f"upper bracket lambda={hi} is not PT-broken")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if broken(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PlatformCluster:
    """One group of dominant-eigenstate momenta.

    center        -- arithmetic mean of the member mean momenta
    max_eps_i     -- largest growth rate in the cluster
    anchor_mean_p -- mean momentum of that fastest-growing member
    members       -- member mean momenta, ascending
    """

    center: float
    max_eps_i: float
    anchor_mean_p: float
    members: tuple[float, ...]


@dataclass(frozen=True)
class PlatformSet:
    """Clusters sorted by descending max eps_i; empty when PT is unbroken."""

    clusters: tuple[PlatformCluster, ...]
    pt_broken: bool

    @property
    def centers(self) -> tuple[float, ...]:
        return tuple(c.center for c in self.clusters)


def dominant_platforms(
    spec: QuasiSpectrum,
    top_fraction: float = 0.5,
    gap: float | None = None,
) -> PlatformSet:
    """Cluster the mean momenta of the fastest-growing eigenstates.

    Eigenpairs with eps_i >= top_fraction * max(eps_i) are kept and their
    mean momenta single-linkage clustered with gap threshold `gap` (default
    2*hbar_eff).  Each cluster center predicts one staircase platform of the
    momentum current.
    """
    if gap is None:
        gap = 2.0 * spec.params.hbar_eff
    max_ei = float(np.max(spec.eps_i))
    if max_ei <= 0.0:
        return PlatformSet(clusters=(), pt_broken=False)
    keep = spec.eps_i >= top_fraction * max_ei
    momenta = spec.mean_p[keep]
    rates = spec.eps_i[keep]
    order = np.argsort(momenta, kind="stable")
    momenta = momenta[order]
    rates = rates[order]

    clusters: list[PlatformCluster] = []
    start = 0
    for i in range(1, len(momenta) + 1):
        if i == len(momenta) or momenta[i] - momenta[i - 1] > gap:
            mem_p = momenta[start:i]
            mem_r = rates[start:i]
            anchor = int(np.argmax(mem_r))
            clusters.append(
                PlatformCluster(
                    center=float(np.mean(mem_p)),
                    max_eps_i=float(mem_r[anchor]),
                    anchor_mean_p=float(mem_p[anchor]),
                    members=tuple(float(x) for x in mem_p),
                )
            )
            start = i
    clusters.sort(key=lambda c: -c.max_eps_i)
    return PlatformSet(clusters=tuple(clusters), pt_broken=True)
