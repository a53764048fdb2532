"""Render static figure analogs from ptkrotor experiment CSV tables.

Consumes the CSV format the experiment harness writes ('#'-prefixed
``key = value`` metadata block, header row, numeric rows) and produces one
image per figure kind:

  fig1  PT-breaking order parameter vs gain, one curve per hbar value
  fig2  momentum-current time series, one curve per gain value
  fig3  growth rate vs eigenstate momentum, log-scale main panel plus a
        linear inset of the same data; optional platform-center markers
  fig4  acceleration-rate staircase with quantum points, snapped-classical
        line, predicted staircase, and transition markers at odd pi

This package never re-computes physics; it only draws the numbers it is
given.  Input tables are opened read-only and never modified.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "Table", "SchemaError", "load_table", "build_figure", "render", "main"]

REQUIRED_COLUMNS = {
    "fig1": ("hbar", "lambda", "mean_abs_imag", "max_eps_i"),
    "fig2": ("lambda", "t", "mean_p", "log_norm"),
    "fig3": ("eps_r", "eps_i", "mean_p", "ipr"),
    "fig4": ("K", "D_quantum", "D_classical", "D_predicted"),
}

# gain-value colors copied from the reference figure styling
FIG2_COLORS = {0.06: "black", 0.09: "red", 0.2: "green", 0.6: "blue", 0.9: "cyan"}


class SchemaError(ValueError):
    """Input table columns do not match the figure kind."""


@dataclass(frozen=True)
class Table:
    """Parsed CSV: column name -> float array, plus the metadata block."""

    path: str
    columns: tuple[str, ...]
    data: dict
    metadata: dict

    def __len__(self) -> int:
        return len(next(iter(self.data.values()))) if self.data else 0


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input table(s), figure kind, output image path."""

    inputs: tuple[str, ...]
    kind: str
    output: str
    dpi: int = 150

    def __post_init__(self) -> None:
        if self.kind not in REQUIRED_COLUMNS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input table is required")


def load_table(path: str | Path) -> Table:
    metadata: dict = {}
    columns: tuple[str, ...] | None = None
    rows: list[list[float]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            metadata[key.strip()] = value.strip()
        elif columns is None:
            columns = tuple(line.split(","))
        else:
            rows.append([float(cell) for cell in line.split(",")])
    if columns is None:
        raise ValueError(f"{path}: no header row")
    arr = np.asarray(rows, dtype=float) if rows else np.empty((0, len(columns)))
    data = {name: arr[:, i] for i, name in enumerate(columns)}
    return Table(str(path), columns, data, metadata)


def _check_schema(table: Table, kind: str) -> None:
    required = REQUIRED_COLUMNS[kind]
    if tuple(table.columns) != required:
        raise SchemaError(
            f"{table.path}: expected columns {required} for {kind}, found {table.columns}"
        )
    if len(table) == 0:
        raise ValueError(f"{table.path}: table has no data rows")


def _draw_fig1(fig, table: Table) -> None:
    ax = fig.subplots()
    for hbar in np.unique(table.data["hbar"]):
        mask = table.data["hbar"] == hbar
        ax.semilogy(
            table.data["lambda"][mask],
            np.maximum(table.data["mean_abs_imag"][mask], 1e-16),
            marker="o",
            label=f"hbar_eff = {hbar:g}",
        )
    ax.set_xlabel(r"gain strength $\lambda$")
    ax.set_ylabel(r"mean $|\mathrm{Im}\,\varepsilon|$")
    ax.set_title("PT-breaking transition")
    ax.legend()


def _draw_fig2(fig, table: Table) -> None:
    ax = fig.subplots()
    for lam in np.unique(table.data["lambda"]):
        mask = table.data["lambda"] == lam
        color = FIG2_COLORS.get(round(float(lam), 4))
        ax.plot(
            table.data["t"][mask],
            table.data["mean_p"][mask],
            color=color,
            label=rf"$\lambda = {lam:g}$",
        )
    ax.set_xlabel("kick count $t$")
    ax.set_ylabel(r"$\langle p(t) \rangle$")
    ax.set_title("momentum current")
    ax.legend()


def _draw_fig3(fig, tables: list[Table]) -> None:
    table = tables[0]
    ax = fig.subplots()
    ax.plot(table.data["mean_p"], table.data["eps_i"], ".", markersize=3)
    ax.set_yscale("symlog", linthresh=1e-10)
    ax.set_xlabel(r"eigenstate $\langle p \rangle$")
    ax.set_ylabel(r"$\mathrm{Im}\,\varepsilon$ (symlog)")
    ax.set_title("growth rate vs eigenstate momentum")
    for sub in tables[1:]:
        if "center" in sub.columns:
            for center in sub.data["center"]:
                ax.axvline(center, linestyle="--", linewidth=0.8, color="blue")
    # linear-scale inset of the same data, registered as a figure axes
    inset = fig.add_axes([0.18, 0.6, 0.26, 0.26])
    inset.plot(table.data["mean_p"], table.data["eps_i"], ".", markersize=2)
    inset.set_yscale("linear")
    inset.set_title("linear scale", fontsize=8)
    inset.tick_params(labelsize=7)


def _draw_fig4(fig, table: Table) -> None:
    ax = fig.subplots()
    k = table.data["K"]
    ax.plot(k, table.data["D_quantum"], "o", markersize=3.5, label="quantum")
    ax.plot(k, table.data["D_classical"], "-", linewidth=1.0, label="classical (snapped)")
    ax.plot(k, table.data["D_predicted"], drawstyle="steps-mid", linewidth=1.8,
            label=r"$2\pi\,\mathrm{round}(K/2\pi)$")
    n = 1
    while (2 * n + 1) * math.pi <= k.max() + 1e-9:
        marker = (2 * n + 1) * math.pi
        if marker >= k.min() - 1e-9:
            ax.axvline(marker, linestyle="--", linewidth=0.8, color="blue")
        n += 1
    ax.set_xlabel("kick strength $K$")
    ax.set_ylabel("acceleration rate $D$")
    ax.set_title("quantized acceleration staircase")
    ax.legend()


def build_figure(spec: FigureSpec) -> plt.Figure:
    """Parse inputs, validate the schema, and draw (no file output)."""
    tables = [load_table(p) for p in spec.inputs]
    _check_schema(tables[0], spec.kind)
    fig = plt.figure(figsize=(7.0, 4.8))
    if spec.kind == "fig1":
        _draw_fig1(fig, tables[0])
        fig.tight_layout()
    elif spec.kind == "fig2":
        _draw_fig2(fig, tables[0])
        fig.tight_layout()
    elif spec.kind == "fig3":
        _draw_fig3(fig, tables)  # manual inset placement; no tight_layout
    else:
        _draw_fig4(fig, tables[0])
        fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    """Write the figure image; nothing is written if validation fails."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.output, dpi=spec.dpi, metadata=_stable_metadata(spec.output))
    finally:
        plt.close(fig)
    return spec.output


def _stable_metadata(output: str) -> dict | None:
    # strip volatile metadata so identical inputs give identical bytes
    suffix = Path(output).suffix.lower()
    if suffix == ".png":
        return {"Software": "ptkrotor-plots"}
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".pdf":
        return {"CreationDate": None}
    return None


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ptkrotor-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    rend = sub.add_parser("render", help="render one figure from CSV table(s)")
    rend.add_argument("--kind", required=True, choices=sorted(REQUIRED_COLUMNS))
    rend.add_argument("--in", dest="inputs", action="append", required=True,
                      help="input CSV (repeatable; first is the main table)")
    rend.add_argument("--out", required=True, help="output image path")
    rend.add_argument("--dpi", type=int, default=150)
    try:
        args = parser.parse_args(argv)
        spec = FigureSpec(tuple(args.inputs), args.kind, args.out, args.dpi)
        out = render(spec)
    except (SchemaError, ValueError, FileNotFoundError) as exc:
        print(f"ptkrotor-plots: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
