"""Experiment orchestration: figure datasets, sweeps, CSV persistence.

Each run_* function reproduces one figure's dataset as a ResultTable and, when
the config names an output path, writes it as CSV with a '#'-prefixed
metadata header.  Numeric text uses 17 significant digits so doubles
round-trip exactly; volatile metadata (wall-clock) is kept in memory but
never serialized, keeping repeated runs byte-identical.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__ as _VERSION
from .classical import acceleration_rate_prediction, classical_D
from .core import SystemParams, make_ground_state
from .dynamics import (
    EvolveConfig,
    TruncationError,
    evolve,
    measure_acceleration_rate,
)
from .oracle import oracle_trajectory, validity_check
from .spectrum import (
    build_floquet_matrix,
    dominant_platforms,
    eigendecompose,
    lambda_sweep,
)

__all__ = [
    "ExperimentConfig",
    "ResultTable",
    "ConfigError",
    "run_fig1",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "run_oracle_compare",
    "auto_basis_size",
]

FIG1_LAMBDAS = tuple(round(0.0125 * i, 4) for i in range(25))  # 0 .. 0.3
FIG2_LAMBDAS = (0.06, 0.09, 0.2, 0.6, 0.9)
# execution details, not physics config: results must not depend on them, so
# they never reach the serialized file (repeat runs stay byte-identical)
VOLATILE_METADATA = frozenset({"wall_clock_s", "workers"})


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: kind, physics parameters, grids, and output location."""

    kind: str
    params: SystemParams
    lambda_grid: tuple[float, ...] = ()
    hbar_grid: tuple[float, ...] = ()
    k_start: float = math.pi + 0.2
    k_stop: float = 8.0 * math.pi
    k_step: float = 0.2
    n_kicks: int = 500
    fit_window: int | None = None
    output: str | None = None
    workers: int = 1
    quick: bool = False

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError(f"worker count must be >= 1, got {self.workers}")
        if self.n_kicks < 1:
            raise ConfigError(f"n_kicks must be >= 1, got {self.n_kicks}")
        if self.lambda_grid and any(
            b < a for a, b in zip(self.lambda_grid, self.lambda_grid[1:])
        ):
            raise ConfigError("lambda grid must be sorted ascending")
        if self.k_step <= 0 or self.k_stop < self.k_start:
            raise ConfigError("invalid K range")
        if self.output is not None:
            parent = Path(self.output).resolve().parent
            if not parent.is_dir():
                raise ConfigError(f"output directory does not exist: {parent}")

    def k_grid(self) -> np.ndarray:
        count = int(math.floor((self.k_stop - self.k_start) / self.k_step + 1e-9)) + 1
        return self.k_start + self.k_step * np.arange(count)


@dataclass
class ResultTable:
    """Rectangular numeric table plus a flat metadata block."""

    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row!r} does not match columns {self.columns}")

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.asarray([row[idx] for row in self.rows])

    def stable_metadata(self) -> dict[str, str]:
        return {k: v for k, v in self.metadata.items() if k not in VOLATILE_METADATA}

    def to_csv(self, path: str | os.PathLike) -> None:
        """Write '#'-metadata block, header row, then 17-significant-digit rows."""
        lines = []
        for key in sorted(self.stable_metadata()):
            lines.append(f"# {key} = {self.metadata[key]}")
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_format_cell(x) for x in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "ResultTable":
        metadata: dict[str, str] = {}
        columns: tuple[str, ...] | None = None
        rows: list[tuple] = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                metadata[key.strip()] = value.strip()
            elif columns is None:
                columns = tuple(line.split(","))
            else:
                rows.append(tuple(_parse_cell(c) for c in line.split(",")))
        if columns is None:
            raise ValueError(f"no header row in {path}")
        return cls(columns=columns, rows=rows, metadata=metadata)

    def equals(self, other: "ResultTable") -> bool:
        """Equality on columns, rows, and non-volatile metadata."""
        return (
            self.columns == other.columns
            and self.rows == other.rows
            and self.stable_metadata() == other.stable_metadata()
        )


def _format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _parse_cell(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _worker_count(config: ExperimentConfig) -> int:
    env = os.environ.get("PTKR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"PTKR_THREADS={env!r} is not an integer") from exc
    return config.workers


def _map_ordered(fn, items, workers: int) -> list:
    """Apply fn over items, preserving order regardless of completion order."""
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _base_metadata(config: ExperimentConfig, started: float) -> dict[str, str]:
    p = config.params
    return {
        "kind": config.kind,
        "artifact_version": _VERSION,
        "kick_strength": _format_cell(p.kick_strength),
        "gain_strength": _format_cell(p.gain_strength),
        "hbar_eff": _format_cell(p.hbar_eff),
        "basis_size": str(p.basis_size),
        "oversample": str(p.oversample),
        "n_kicks": str(config.n_kicks),
        "workers": str(config.workers),
        "quick": "1" if config.quick else "0",
        "wall_clock_s": f"{time.time() - started:.3f}",
    }


def _finish(table: ResultTable, config: ExperimentConfig) -> ResultTable:
    if config.output is not None:
        table.to_csv(config.output)
    return table


def run_fig1(config: ExperimentConfig) -> ResultTable:
    """PT-breaking order parameter versus lambda for each hbar_eff.

    Columns (hbar, lambda, mean_abs_imag, max_eps_i), grid order, one full
    spectrum per point.
    """
    started = time.time()
    hbars = config.hbar_grid or (1.0, 1.5)
    lambdas = config.lambda_grid or FIG1_LAMBDAS
    workers = _worker_count(config)
    rows: list[tuple] = []
    for hbar in hbars:
        params = replace(config.params, hbar_eff=hbar, gain_strength=0.0)
        for lam, mai, mx in lambda_sweep(params, lambdas, workers=workers):
            rows.append((hbar, lam, mai, mx))
    table = ResultTable(
        columns=("hbar", "lambda", "mean_abs_imag", "max_eps_i"),
        rows=rows,
        metadata=_base_metadata(config, started)
        | {"lambda_grid": ",".join(_format_cell(l) for l in lambdas)},
    )
    return _finish(table, config)


def run_fig2(config: ExperimentConfig) -> ResultTable:
    """Momentum-current time series for each lambda, long format.

    Columns (lambda, t, mean_p, log_norm); per-lambda truncation warnings go
    into the metadata.  The lattice is auto-sized so ballistic runs stay
    inside the inner 80% of momentum space.
    """
    started = time.time()
    lambdas = config.lambda_grid or FIG2_LAMBDAS
    workers = _worker_count(config)
    base = config.params

    def one(lam: float):
        n = max(
            base.basis_size,
            auto_basis_size(base.kick_strength, base.hbar_eff, config.n_kicks),
        )
        params = replace(base, gain_strength=lam, basis_size=n)
        series = evolve(
            make_ground_state(params), params, EvolveConfig(n_kicks=config.n_kicks)
        )
        return lam, params.basis_size, series

    results = _map_ordered(one, lambdas, workers)
    rows: list[tuple] = []
    metadata = _base_metadata(config, started)
    for lam, n, series in results:
        metadata[f"truncation_warning_lambda_{_format_cell(lam)}"] = (
            "1" if series.truncation_warning else "0"
        )
        metadata[f"basis_size_lambda_{_format_cell(lam)}"] = str(n)
        for i in range(len(series)):
            rows.append((lam, int(series.t[i]), float(series.mean_p[i]), float(series.log_norm[i])))
    table = ResultTable(
        columns=("lambda", "t", "mean_p", "log_norm"), rows=rows, metadata=metadata
    )
    return _finish(table, config)


def run_fig3(config: ExperimentConfig) -> ResultTable:
    """Eigenpair table (eps_r, eps_i, mean_p, ipr) at a single lambda.

    Also extracts the dominant-platform clusters; their centers land in the
    metadata and, when an output path is set, in a sibling
    '<output>.platforms.csv' table.
    """
    started = time.time()
    lam = config.lambda_grid[0] if config.lambda_grid else 0.09
    params = replace(config.params, gain_strength=lam)
    spec = eigendecompose(build_floquet_matrix(params))
    platforms = dominant_platforms(spec)
    rows = [
        (
            float(spec.eps_r[i]),
            float(spec.eps_i[i]),
            float(spec.mean_p[i]),
            float(spec.ipr[i]),
        )
        for i in range(len(spec))
    ]
    metadata = _base_metadata(config, started) | {
        "lambda": _format_cell(lam),
        "pt_broken": "1" if platforms.pt_broken else "0",
        "platform_centers": ",".join(_format_cell(c) for c in platforms.centers),
    }
    table = ResultTable(columns=("eps_r", "eps_i", "mean_p", "ipr"), rows=rows, metadata=metadata)
    if config.output is not None:
        sub = ResultTable(
            columns=("center", "max_eps_i", "anchor_mean_p", "n_members"),
            rows=[
                (c.center, c.max_eps_i, c.anchor_mean_p, len(c.members))
                for c in platforms.clusters
            ],
            metadata=dict(metadata),
        )
        sub.to_csv(str(config.output) + ".platforms.csv")
    return _finish(table, config)


def auto_basis_size(
    kick_strength: float,
    hbar_eff: float,
    n_kicks: int,
    gain_strength: float = 0.0,
    minimum: int = 64,
) -> int:
    """Smallest power-of-two lattice keeping a ballistic run in the inner 80%.

    Budget: the larger of the quantized rate and K itself per kick, for the
    whole run, plus six packet widths.
    """
    rate = max(2.0 * math.pi * round(kick_strength / (2.0 * math.pi)), kick_strength)
    p_max = rate * (n_kicks + 2)
    if gain_strength > 0:
        p_max += 6.0 * math.sqrt(hbar_eff * gain_strength * kick_strength / 2.0)
    needed = 2.0 * p_max / (0.8 * hbar_eff)
    n = minimum
    while n < needed:
        n *= 2
    return n


def run_fig4(config: ExperimentConfig) -> ResultTable:
    """Acceleration-rate staircase D(K): quantum, snapped-classical, predicted.

    Columns (K, D_quantum, D_classical, D_predicted).  Per-K quantum failures
    become metadata entries instead of aborting the sweep.
    """
    started = time.time()
    ks = config.k_grid()
    workers = _worker_count(config)
    base = config.params
    window = config.fit_window or config.n_kicks // 2

    def one(k: float):
        try:
            n = auto_basis_size(k, base.hbar_eff, config.n_kicks, base.gain_strength)
            params = replace(base, kick_strength=float(k), basis_size=n)
            series = evolve(
                make_ground_state(params), params, EvolveConfig(n_kicks=config.n_kicks)
            )
            dq = measure_acceleration_rate(series, window=window)
            return float(k), dq, None
        except (TruncationError, ValueError, RuntimeError) as exc:
            return float(k), None, f"{type(exc).__name__}: {exc}"

    results = _map_ordered(one, ks, workers)
    rows: list[tuple] = []
    metadata = _base_metadata(config, started) | {
        "k_start": _format_cell(config.k_start),
        "k_stop": _format_cell(config.k_stop),
        "k_step": _format_cell(config.k_step),
        "fit_window": str(window),
    }
    for k, dq, err in results:
        if err is not None:
            metadata[f"failed_K_{_format_cell(k)}"] = err
            continue
        rows.append(
            (
                k,
                dq,
                classical_D(k, n_kicks=max(200, config.n_kicks)),
                acceleration_rate_prediction(k),
            )
        )
    table = ResultTable(
        columns=("K", "D_quantum", "D_classical", "D_predicted"),
        rows=rows,
        metadata=metadata,
    )
    return _finish(table, config)


def run_oracle_compare(config: ExperimentConfig) -> ResultTable:
    """Per-kick quantum <p> increments against the Gaussian-packet recursion.

    Columns (t, quantum_mean_p, oracle_p_bar, quantum_increment,
    oracle_increment).  The quantum run uses the reordered operator split so
    both sides compute the same product.
    """
    started = time.time()
    params = replace(
        config.params,
        basis_size=max(
            config.params.basis_size,
            auto_basis_size(
                config.params.kick_strength,
                config.params.hbar_eff,
                config.n_kicks,
                config.params.gain_strength,
            ),
        ),
    )
    validity = validity_check(params)
    if not validity.valid:
        raise ConfigError(
            f"oracle regime invalid: lambda*K/hbar={validity.gain_ratio:.3g}, "
            f"K/hbar={validity.kick_ratio:.3g}"
        )
    series = evolve(
        make_ground_state(params),
        params,
        EvolveConfig(n_kicks=config.n_kicks, operator_order="reordered"),
    )
    oracle = oracle_trajectory(params, config.n_kicks)
    rows: list[tuple] = []
    for i in range(len(series)):
        t = int(series.t[i])
        q_inc = float(series.mean_p[i] - series.mean_p[i - 1]) if i else 0.0
        o_inc = float(oracle.p_bar[t] - oracle.p_bar[t - 1]) if t else 0.0
        rows.append((t, float(series.mean_p[i]), float(oracle.p_bar[t]), q_inc, o_inc))
    metadata = _base_metadata(config, started) | {
        "oracle_rate": _format_cell(oracle.rate),
        "gain_ratio": _format_cell(validity.gain_ratio),
        "kick_ratio": _format_cell(validity.kick_ratio),
        "basis_size_used": str(params.basis_size),
    }
    table = ResultTable(
        columns=("t", "quantum_mean_p", "oracle_p_bar", "quantum_increment", "oracle_increment"),
        rows=rows,
        metadata=metadata,
    )
    return _finish(table, config)
