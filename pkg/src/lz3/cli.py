"""Command-line front end.

Commands: ``propagate`` (single-shot trajectory starting from level 1),
``gap`` (minimum-gap query), ``ica`` (crossing-composition estimate),
``sweep`` (config-defined parameter sweep) and ``figure`` (named presets).

Configuration files are flat ``key=value`` text with ``#`` comments; unknown
keys are rejected, missing keys take the documented defaults.  All CSV output
is comma-separated, LF-terminated UTF-8 with ``#``-prefixed ``key=value``
metadata lines before the header, written to a temporary file and renamed so
a failed run never leaves a partial file behind.

Exit codes: 0 success, 1 configuration or usage error, 2 solver failure.
"""

from __future__ import annotations

import os
import sys
import tempfile

from .ica import ica_predict
from .model import SystemParams
from .propagate import IntegrationError, StateVector, propagate_nonhermitian
from .spectrum import min_gap, min_gap_reverse
from .sweep import (
    PRESET_NAMES,
    SweepAxis,
    SweepSpec,
    figure_preset,
    run_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2

PARAM_KEYS = (
    "kappa",
    "delta",
    "omega12",
    "omega23",
    "omega13",
    "phi12",
    "phi23",
    "phi13",
    "gamma1",
    "gamma2",
    "gamma3",
    "horizon",
)

CONFIG_DEFAULTS = {
    "kappa": 0.1,
    "delta": 0.0,
    "omega12": 1.0,
    "omega23": 1.0,
    "omega13": 0.0,
    "phi12": 0.0,
    "phi23": 0.0,
    "phi13": 0.0,
    "gamma1": 0.0,
    "gamma2": 0.0,
    "gamma3": 0.0,
    "horizon": 1000.0,
    "tol": 1e-10,
    "scan_points": 4001,
    "out": "",
}

SWEEP_KEYS = (
    "axis1",
    "axis1_min",
    "axis1_max",
    "axis1_count",
    "axis1_scale",
    "axis2",
    "axis2_min",
    "axis2_max",
    "axis2_count",
    "axis2_scale",
    "observables",
)


class ConfigError(ValueError):
    pass


class UsageError(ValueError):
    pass


def parse_config(path: str, allow_sweep_keys: bool = False) -> dict:
    """Parse a key=value config file; unknown keys raise ConfigError."""
    values = dict(CONFIG_DEFAULTS)
    sweep_values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in CONFIG_DEFAULTS:
            if key == "out":
                values[key] = value
            elif key == "scan_points":
                values[key] = int(value)
            else:
                values[key] = float(value)
        elif allow_sweep_keys and key in SWEEP_KEYS:
            sweep_values[key] = value
        else:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
    if allow_sweep_keys:
        values["_sweep"] = sweep_values
    return values


def params_from_config(config: dict) -> SystemParams:
    try:
        return SystemParams(**{k: config[k] for k in PARAM_KEYS})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _sweep_axis(sweep_values: dict, prefix: str) -> SweepAxis:
    try:
        return SweepAxis(
            name=sweep_values[prefix],
            minimum=float(sweep_values.get(f"{prefix}_min", 0.0)),
            maximum=float(sweep_values.get(f"{prefix}_max", 1.0)),
            count=int(sweep_values.get(f"{prefix}_count", 2)),
            scale=sweep_values.get(f"{prefix}_scale", "linear"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid sweep axis {prefix}: {exc}") from exc


def sweep_spec_from_config(config: dict) -> SweepSpec:
    sweep_values = config.get("_sweep", {})
    if "axis1" not in sweep_values:
        raise ConfigError("sweep config requires at least axis1=<parameter>")
    axes = [_sweep_axis(sweep_values, "axis1")]
    if "axis2" in sweep_values:
        axes.append(_sweep_axis(sweep_values, "axis2"))
    observables = tuple(
        s.strip() for s in sweep_values.get("observables", "p3_final").split(",") if s.strip()
    )
    try:
        return SweepSpec(
            axes=axes,
            base=params_from_config(config),
            observables=observables,
            tol=config["tol"],
            scan_points=config["scan_points"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _threads(args: dict) -> int:
    if args.get("threads") is not None:
        return max(1, int(args["threads"]))
    env = os.environ.get("LZ3_THREADS", "")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"LZ3_THREADS must be an integer, got {env!r}") from exc
    return 1


def cmd_propagate(config: dict, out_path: str) -> int:
    params = params_from_config(config)
    result = propagate_nonhermitian(params, StateVector.basis(1), config["tol"])
    lines = ["t,p1,p2,p3,norm"]
    for i, t in enumerate(result.times):
        p = result.populations[i]
        lines.append(
            f"{repr(float(t))},{repr(float(p[0]))},{repr(float(p[1]))},"
            f"{repr(float(p[2]))},{repr(float(result.norm[i]))}"
        )
    _write_atomic(out_path, "\n".join(lines) + "\n")
    p3 = abs(result.final_state.c3) ** 2
    print(f"{p3:.9f}")
    return EXIT_OK


def cmd_gap(config: dict, reverse: bool) -> int:
    params = params_from_config(config)
    solver = min_gap_reverse if reverse else min_gap
    result = solver(params, config["scan_points"])
    print(f"G={result.gap:.12g} t_min={result.t_min:.12g} margin={result.margin:.12g}")
    return EXIT_OK


def cmd_ica(config: dict) -> int:
    params = params_from_config(config)
    prediction = ica_predict(params)
    print(
        f"P3={prediction.p3:.9f} xi={prediction.perturbation_scale:.6g} "
        f"regime={prediction.regime}"
    )
    return EXIT_OK


def cmd_sweep(config: dict, out_path: str, workers: int) -> int:
    spec = sweep_spec_from_config(config)
    table = run_sweep(spec, workers=workers)
    _write_atomic(out_path, table.to_csv())
    print(f"wrote {out_path} ({table.rows.shape[0]} rows)")
    return EXIT_OK


def cmd_figure(name: str, out_dir: str, workers: int, tol: float, axis_points) -> int:
    if name not in PRESET_NAMES:
        raise UsageError(f"unknown figure preset {name!r}; choose from {PRESET_NAMES}")
    spec = figure_preset(name, axis_points=axis_points)
    if tol is not None:
        spec.tol = tol
    table = run_sweep(spec, workers=workers)
    out_path = os.path.join(out_dir, f"{name}.csv")
    _write_atomic(out_path, table.to_csv())
    print(f"wrote {out_path} ({table.rows.shape[0]} rows)")
    return EXIT_OK


_USAGE = """\
usage: lz3 <command> [options]

commands:
  propagate --config PATH [--out PATH] [--tol F]
      integrate from -T to +T starting in level 1; write the trajectory CSV
      and print the final population of level 3
  gap --config PATH [--reverse]
      print the minimum gap, its time, and the adiabaticity margin
  ica --config PATH
      print the crossing-composition estimate and its regime tag
  sweep --config PATH [--out PATH] [--threads N] [--tol F]
      run a sweep described by axis1*/axis2*/observables config keys
  figure NAME [--out DIR] [--threads N] [--tol F] [--points N]
      run a named figure preset (fig2a..fig5c) and write NAME.csv

options:
  --config PATH   key=value parameter file (defaults documented in README)
  --out PATH      output file (propagate/sweep) or directory (figure)
  --tol FLOAT     integrator tolerance override
  --reverse       gap between the two lowest levels instead of the two highest
  --threads N     worker processes for sweeps (or LZ3_THREADS)
  --points N      override per-axis resolution of a figure preset
"""


def _parse_argv(argv: list) -> dict:
    if not argv:
        raise UsageError(_USAGE)
    args = {
        "command": argv[0],
        "config": None,
        "out": None,
        "tol": None,
        "reverse": False,
        "threads": None,
        "points": None,
        "name": None,
    }
    rest = argv[1:]
    positional = []
    i = 0
    while i < len(rest):
        token = rest[i]
        if token == "--reverse":
            args["reverse"] = True
        elif token in ("--config", "--out", "--tol", "--threads", "--points"):
            if i + 1 >= len(rest):
                raise UsageError(f"flag {token} expects a value")
            value = rest[i + 1]
            key = token[2:]
            if key == "tol":
                try:
                    args["tol"] = float(value)
                except ValueError as exc:
                    raise UsageError(f"--tol expects a float, got {value!r}") from exc
            elif key in ("threads", "points"):
                try:
                    args[key] = int(value)
                except ValueError as exc:
                    raise UsageError(f"--{key} expects an integer, got {value!r}") from exc
            else:
                args[key] = value
            i += 1
        elif token.startswith("-"):
            raise UsageError(f"unknown flag {token!r}")
        else:
            positional.append(token)
        i += 1
    if args["command"] == "figure":
        if len(positional) != 1:
            raise UsageError("figure expects exactly one preset name")
        args["name"] = positional[0]
    elif positional:
        raise UsageError(f"unexpected arguments: {positional}")
    return args


def _load_config(args: dict) -> dict:
    if args["config"] is None:
        config = dict(CONFIG_DEFAULTS)
        config["_sweep"] = {}
    else:
        config = parse_config(args["config"], allow_sweep_keys=args["command"] == "sweep")
    if args["tol"] is not None:
        config["tol"] = args["tol"]
    return config


def main(argv: list = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parse_argv(argv)
        command = args["command"]
        if command == "propagate":
            config = _load_config(args)
            out = args["out"] or config["out"] or "trajectory.csv"
            return cmd_propagate(config, out)
        if command == "gap":
            return cmd_gap(_load_config(args), args["reverse"])
        if command == "ica":
            return cmd_ica(_load_config(args))
        if command == "sweep":
            config = _load_config(args)
            out = args["out"] or config["out"] or "sweep.csv"
            return cmd_sweep(config, out, _threads(args))
        if command == "figure":
            config = _load_config(args)
            return cmd_figure(
                args["name"], args["out"] or ".", _threads(args), args["tol"], args["points"]
            )
        raise UsageError(f"unknown command {command!r}\n\n{_USAGE}")
    except (UsageError, ConfigError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
