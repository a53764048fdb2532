"""Command-line interface reproducing each figure dataset and generic runs.

Subcommands: fig1 fig2 fig3 fig4 spectrum evolve classical oracle-compare.
Every flag has a config-file equivalent (flat ``key = value`` lines, keys
matching the long flag names); explicit flags override the file.  Exit codes:
0 success, 1 configuration error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .classical import acceleration_rate_prediction, classical_D
from .core import SystemParams, make_ground_state
from .dynamics import EvolveConfig, TruncationError, evolve
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ResultTable,
    run_fig1,
    run_fig2,
    run_fig3,
    run_fig4,
    run_oracle_compare,
)
from .oracle import CaptureRangeError
from .spectrum import EigensolverError

NUMERIC_FAILURES = (
    EigensolverError,
    TruncationError,
    CaptureRangeError,
    FloatingPointError,
    OverflowError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage errors via exception, not SystemExit."""

    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ptkrotor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("fig1", "PT-breaking order parameter vs lambda"),
        ("fig2", "momentum-current time series per lambda"),
        ("fig3", "eigenpair table and platform clusters at one lambda"),
        ("fig4", "quantized acceleration-rate staircase D(K)"),
        ("spectrum", "single Floquet spectrum at given parameters"),
        ("evolve", "single split-step evolution at given parameters"),
        ("classical", "snapped classical D(K) sweep"),
        ("oracle-compare", "quantum vs Gaussian-packet oracle increments"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="key = value config file")
        p.add_argument("--out", type=str, default=None, help="output CSV path")
        p.add_argument("--quick", action="store_true", default=None, help="reduced-size preset")
        p.add_argument("--K", type=float, default=None, help="kick strength")
        p.add_argument("--lambda", dest="lam", type=float, default=None, help="gain strength")
        p.add_argument("--hbar", type=float, default=None, help="effective Planck constant")
        p.add_argument("--N", type=int, default=None, help="momentum lattice size")
        p.add_argument("--oversample", type=int, default=None, help="angle-grid oversampling")
        p.add_argument("--kicks", type=int, default=None, help="number of kick periods")
        p.add_argument("--window", type=int, default=None, help="acceleration-rate fit window")
        p.add_argument("--workers", type=int, default=None, help="parallel worker count")
        p.add_argument("--lambdas", type=str, default=None, help="comma-separated lambda grid")
        p.add_argument("--hbars", type=str, default=None, help="comma-separated hbar values")
        p.add_argument("--k-start", dest="k_start", type=float, default=None)
        p.add_argument("--k-stop", dest="k_stop", type=float, default=None)
        p.add_argument("--k-step", dest="k_step", type=float, default=None)
    return parser


_CONFIG_KEYS = {
    "out": str,
    "quick": bool,
    "K": float,
    "lambda": float,
    "hbar": float,
    "N": int,
    "oversample": int,
    "kicks": int,
    "window": int,
    "workers": int,
    "lambdas": str,
    "hbars": str,
    "k-start": float,
    "k-stop": float,
    "k-step": float,
}
_KEY_TO_DEST = {
    "lambda": "lam",
    "k-start": "k_start",
    "k-stop": "k_stop",
    "k-step": "k_step",
}


def _load_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment; keys match flag names."""
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{i}: bad config line {raw!r}")
        caster = _CONFIG_KEYS[key]
        if caster is bool:
            out[_KEY_TO_DEST.get(key, key)] = value.lower() in ("1", "true", "yes", "on")
        else:
            try:
                out[_KEY_TO_DEST.get(key, key)] = caster(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{i}: {exc}") from exc
    return out


def _merged_options(args: argparse.Namespace) -> dict:
    merged: dict = {}
    if args.config is not None:
        merged.update(_load_config_file(args.config))
    for dest in (
        "out",
        "quick",
        "K",
        "lam",
        "hbar",
        "N",
        "oversample",
        "kicks",
        "window",
        "workers",
        "lambdas",
        "hbars",
        "k_start",
        "k_stop",
        "k_step",
    ):
        value = getattr(args, dest, None)
        if value is not None:
            merged[dest] = value
    merged.setdefault("quick", False)
    return merged


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _check_output_dir(opts: dict) -> None:
    out = opts.get("out")
    if out is not None:
        parent = Path(out).resolve().parent
        if not parent.is_dir():
            raise ConfigError(f"output directory does not exist: {parent}")


def _params(opts: dict, k: float, lam: float, hbar: float, n: int) -> SystemParams:
    return SystemParams(
        kick_strength=opts.get("K", k),
        gain_strength=opts.get("lam", lam),
        hbar_eff=opts.get("hbar", hbar),
        basis_size=opts.get("N", n),
        oversample=opts.get("oversample", 2),
    )


def _experiment_config(kind: str, opts: dict, params: SystemParams, **overrides) -> ExperimentConfig:
    kwargs = dict(
        kind=kind,
        params=params,
        output=opts.get("out"),
        workers=opts.get("workers", 1),
        quick=opts["quick"],
    )
    if "lambdas" in opts:
        kwargs["lambda_grid"] = _float_list(opts["lambdas"])
    if "hbars" in opts:
        kwargs["hbar_grid"] = _float_list(opts["hbars"])
    for key in ("k_start", "k_stop", "k_step"):
        if key in opts:
            kwargs[key] = opts[key]
    if "kicks" in opts:
        kwargs["n_kicks"] = opts["kicks"]
    if "window" in opts:
        kwargs["fit_window"] = opts["window"]
    for key, value in overrides.items():
        kwargs.setdefault(key, value)
    return ExperimentConfig(**kwargs)


def _cmd_fig1(opts: dict) -> ResultTable:
    quick = opts["quick"]
    params = _params(opts, k=5.0, lam=0.0, hbar=1.0, n=512 if quick else 2048)
    defaults: dict = {}
    if quick:
        defaults["lambda_grid"] = tuple(round(0.025 * i, 4) for i in range(13))
    cfg = _experiment_config("spectrum-sweep", opts, params, **defaults)
    return run_fig1(cfg)


def _cmd_fig2(opts: dict) -> ResultTable:
    quick = opts["quick"]
    params = _params(opts, k=5.0, lam=0.0, hbar=1.0, n=512 if quick else 2048)
    cfg = _experiment_config("evolve", opts, params, n_kicks=150 if quick else 1000)
    return run_fig2(cfg)


def _cmd_fig3(opts: dict) -> ResultTable:
    quick = opts["quick"]
    params = _params(opts, k=5.0, lam=0.09, hbar=1.0, n=512 if quick else 2048)
    cfg = _experiment_config(
        "spectrum-sweep", opts, params, lambda_grid=(params.gain_strength,)
    )
    return run_fig3(cfg)


def _cmd_fig4(opts: dict) -> ResultTable:
    quick = opts["quick"]
    params = _params(opts, k=5.0, lam=5.0, hbar=0.1, n=64)
    cfg = _experiment_config(
        "k-sweep",
        opts,
        params,
        n_kicks=120 if quick else 300,
        fit_window=60 if quick else 150,
        k_step=1.0 if quick else 0.2,
    )
    return run_fig4(cfg)


def _cmd_spectrum(opts: dict) -> ResultTable:
    quick = opts["quick"]
    params = _params(opts, k=5.0, lam=0.09, hbar=1.0, n=512 if quick else 2048)
    cfg = _experiment_config(
        "spectrum-sweep", opts, params, lambda_grid=(params.gain_strength,)
    )
    return run_fig3(cfg)


def _cmd_evolve(opts: dict) -> ResultTable:
    quick = opts["quick"]
    _check_output_dir(opts)
    params = _params(opts, k=5.0, lam=0.0, hbar=1.0, n=512 if quick else 2048)
    n_kicks = opts.get("kicks", 150 if quick else 1000)
    series = evolve(make_ground_state(params), params, EvolveConfig(n_kicks=n_kicks))
    rows = [
        (
            int(series.t[i]),
            float(series.mean_p[i]),
            float(series.log_norm[i]),
            float(series.participation[i]),
        )
        for i in range(len(series))
    ]
    table = ResultTable(
        columns=("t", "mean_p", "log_norm", "participation"),
        rows=rows,
        metadata={
            "kind": "evolve",
            "kick_strength": format(params.kick_strength, ".17g"),
            "gain_strength": format(params.gain_strength, ".17g"),
            "hbar_eff": format(params.hbar_eff, ".17g"),
            "basis_size": str(params.basis_size),
            "n_kicks": str(n_kicks),
            "truncation_warning": "1" if series.truncation_warning else "0",
        },
    )
    if opts.get("out"):
        table.to_csv(opts["out"])
    print(
        f"evolve: K={params.kick_strength} lambda={params.gain_strength} "
        f"hbar={params.hbar_eff} N={params.basis_size} kicks={n_kicks} "
        f"final mean_p={series.mean_p[-1]:.6g} final log_norm={series.log_norm[-1]:.6g}"
    )
    return table


def _cmd_classical(opts: dict) -> ResultTable:
    quick = opts["quick"]
    _check_output_dir(opts)
    k_start = opts.get("k_start", math.pi + 0.05)
    k_stop = opts.get("k_stop", 8.0 * math.pi)
    k_step = opts.get("k_step", 0.5 if quick else 0.1)
    n_kicks = opts.get("kicks", 200)
    count = int(math.floor((k_stop - k_start) / k_step + 1e-9)) + 1
    rows = []
    for k in (k_start + k_step * np.arange(count)):
        rows.append(
            (float(k), classical_D(float(k), n_kicks=n_kicks), acceleration_rate_prediction(float(k)))
        )
    table = ResultTable(
        columns=("K", "D_classical", "D_predicted"),
        rows=rows,
        metadata={"kind": "classical-sweep", "n_kicks": str(n_kicks)},
    )
    if opts.get("out"):
        table.to_csv(opts["out"])
    return table


def _cmd_oracle_compare(opts: dict) -> ResultTable:
    quick = opts["quick"]
    params = _params(opts, k=5.0, lam=5.0, hbar=0.1, n=64)
    cfg = _experiment_config(
        "oracle-compare", opts, params, n_kicks=60 if quick else 200
    )
    return run_oracle_compare(cfg)


_COMMANDS = {
    "fig1": _cmd_fig1,
    "fig2": _cmd_fig2,
    "fig3": _cmd_fig3,
    "fig4": _cmd_fig4,
    "spectrum": _cmd_spectrum,
    "evolve": _cmd_evolve,
    "classical": _cmd_classical,
    "oracle-compare": _cmd_oracle_compare,
}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        opts = _merged_options(args)
        table = _COMMANDS[args.command](opts)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"ptkrotor: configuration error: {exc}", file=sys.stderr)
        return 1
    except NUMERIC_FAILURES as exc:
        print(f"ptkrotor: numeric failure: {exc}", file=sys.stderr)
        return 2
    if opts.get("out"):
        print(f"wrote {len(table.rows)} rows to {opts['out']}")
    return 0


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
