"""Command-line experiment runner.

Each experiment writes an RFC-4180-style CSV plus a sibling JSON manifest
holding the fully resolved configuration; re-running a manifest reproduces
the CSV byte for byte.  Configuration precedence: flags > config file
(flat key=value) > built-in defaults.  All SIR thresholds cross this
boundary in dB and are converted to linear scale exactly here.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    ModelParams,
    cdf_r1_2d,
    cdf_ro_2d,
    coverage_type1_1d,
    coverage_type1_2d,
    coverage_type2,
    pcf_app2_overlay,
)
from .montecarlo import (
    ExperimentConfig,
    SimulationError,
    collect_distance_samples,
    collect_power_samples,
    estimate_pcf,
    run_sir_experiment,
    run_surrogate_experiment,
)
from .quadrature import QuadratureError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_POWER_GRID_POINTS = 201


class UsageError(ValueError):
    """Bad flag combination or malformed value."""


def _fmt(x) -> str:
    """Shortest round-trip decimal form; locale-free by construction."""
    return repr(float(x))


def parse_range(text: str) -> np.ndarray:
    """Parse an inclusive "start:stop:step" grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as err:
        raise UsageError(f"non-numeric range {text!r}") from err
    if start > stop:
        raise UsageError(f"range start {start} exceeds stop {stop}")
    if start == stop:
        return np.array([start])
    if step <= 0.0:
        raise UsageError(f"range step must be positive, got {step}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def manifest_path(out: Path) -> Path:
    out = Path(out)
    if out.suffix == ".csv":
        return out.with_suffix(".manifest.json")
    return Path(str(out) + ".manifest.json")


def _write_csv(path: Path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _write_manifest(out: Path, command: str, config: dict, started: float,
                    discarded: int, stats: dict | None = None) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "master_seed": config.get("seed"),
        "duration_seconds": round(time.perf_counter() - started, 3),
        "discarded": discarded,
        "stats": stats or {},
    }
    manifest_path(Path(out)).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="ascii")


# --------------------------------------------------------------------------
# option tables: (type, default); None default means required

_COMMON = {"seed": (int, 0), "out": (str, None)}

_OPTIONS: dict[str, dict] = {
    "coverage": {
        "dim": (int, 2), "alpha": (float, 4.0), "lambda": (float, 1.0),
        "process": (str, "type2"), "method": (str, "analytic"),
        "tau-db": (str, "-10:20:1"), "realizations": (int, 100_000),
        **_COMMON,
    },
    "linkdist": {
        "lambda": (float, 1.0), "realizations": (int, 100_000),
        "grid": (str, "0:2.5:0.025"), **_COMMON,
    },
    "pcf": {
        "lambda": (float, 1.0), "ro": (list, [0.3, 0.6]),
        "ro-halfwidth": (float, None), "bins": (str, "0:4.5:0.05"),
        "realizations": (int, 100_000), **_COMMON,
    },
    "powercdf": {
        "lambda": (float, 1e-5), "alpha": (float, 4.0), "tx-dbm": (float, 30.0),
        "realizations": (int, 100_000), **_COMMON,
    },
}


def _read_config_file(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"config line is not key=value: {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _resolve(command: str, provided: dict, config_file: str | None) -> dict:
    """Materialize the full option set: flags > config file > defaults."""
    table = _OPTIONS[command]
    file_values = _read_config_file(config_file) if config_file else {}
    unknown = set(file_values) - set(table)
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    resolved = {}
    for key, (typ, default) in table.items():
        if key in provided and provided[key] is not None:
            resolved[key] = provided[key]
        elif key in file_values:
            if typ is list:
                resolved[key] = [float(v) for v in file_values[key].split(",")]
            else:
                resolved[key] = typ(file_values[key])
        else:
            resolved[key] = default
    missing = [k for k, v in resolved.items() if v is None and table[k][1] is None
               and k not in ("ro-halfwidth",)]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(sorted(missing))}")
    return resolved


# --------------------------------------------------------------------------
# commands


def cmd_coverage(opts: dict) -> int:
    started = time.perf_counter()
    dim = opts["dim"]
    process = opts["process"]
    method = opts["method"]
    if dim not in (1, 2):
        raise UsageError("--dim must be 1 or 2")
    if process not in ("type1", "type2"):
        raise UsageError("--process must be type1 or type2")
    if method not in ("analytic", "mc", "app1", "app2"):
        raise UsageError("--method must be analytic, mc, app1 or app2")
    if method in ("app1", "app2") and (dim != 2 or process != "type1"):
        raise UsageError(f"--method {method} requires --dim 2 and --process type1")
    tau_db = parse_range(opts["tau-db"])
    try:
        params = ModelParams(alpha=opts["alpha"], density=opts["lambda"])
    except ValueError as err:
        raise UsageError(str(err)) from err

    discarded = 0
    if method == "analytic":
        taus = [10.0 ** (db / 10.0) for db in tau_db]
        if process == "type2":
            values = [coverage_type2(t, params, dim) for t in taus]
        elif dim == 1:
            values = [coverage_type1_1d(t, params) for t in taus]
        else:
            values = [coverage_type1_2d(t, params) for t in taus]
        rows = [(_fmt(db), _fmt(v), "", "", "", "analytic",
                 process, str(dim), _fmt(opts["alpha"]))
                for db, v in zip(tau_db, values)]
    else:
        cfg = ExperimentConfig(
            dimension=dim, density=opts["lambda"], alpha=opts["alpha"],
            user_process=process, method="full" if method == "mc" else method,
            realizations=opts["realizations"], master_seed=opts["seed"])
        if method == "mc":
            curve = run_sir_experiment(cfg, tau_db)
        else:
            curve = run_surrogate_experiment(cfg, tau_db)
        discarded = opts["realizations"] - curve.n
        rows = [(_fmt(db), _fmt(est), _fmt(lo), _fmt(hi), str(curve.n),
                 curve.method, process, str(dim), _fmt(opts["alpha"]))
                for db, est, lo, hi in zip(curve.tau_db, curve.estimate,
                                           curve.ci_low, curve.ci_high)]

    header = ["tau_db", "estimate", "ci_low", "ci_high", "n",
              "method", "process", "dim", "alpha"]
    _write_csv(Path(opts["out"]), header, rows)
    _write_manifest(Path(opts["out"]), "coverage", opts, started, discarded)
    return EXIT_OK


def cmd_linkdist(opts: dict) -> int:
    started = time.perf_counter()
    lam = opts["lambda"]
    grid = parse_range(opts["grid"])
    cfg = ExperimentConfig(
        dimension=2, density=lam, alpha=4.0, user_process="type1",
        realizations=opts["realizations"], master_seed=opts["seed"])
    params = ModelParams(alpha=4.0, density=lam)
    r0, r1 = collect_distance_samples(cfg)
    rows = [(_fmt(r), _fmt(r0.cdf(r)), _fmt(cdf_ro_2d(r, params)),
             _fmt(r1.cdf(r)), _fmt(cdf_r1_2d(r, params))) for r in grid]
    header = ["r", "cdf_ro_empirical", "cdf_ro_eq10",
              "cdf_r1_empirical", "cdf_r1_eq12"]
    _write_csv(Path(opts["out"]), header, rows)
    stats = {
        "ks_ro": r0.ks_statistic(lambda x: cdf_ro_2d(x, params)),
        "ks_r1": r1.ks_statistic(lambda x: cdf_r1_2d(x, params)),
        "samples": r0.count,
    }
    _write_manifest(Path(opts["out"]), "linkdist", opts, started,
                    opts["realizations"] - r0.count, stats)
    return EXIT_OK


def _pcf_out_path(base: Path, ro: float, multiple: bool) -> Path:
    if not multiple:
        return base
    stem = base.stem if base.suffix else base.name
    suffix = base.suffix or ".csv"
    return base.with_name(f"{stem}_ro{ro:g}{suffix}")


def cmd_pcf(opts: dict) -> int:
    started = time.perf_counter()
    lam = opts["lambda"]
    ro_values = [float(v) for v in np.atleast_1d(opts["ro"])]
    edges = parse_range(opts["bins"])
    if edges.size < 2:
        raise UsageError("--bins must define at least one bin")
    cfg = ExperimentConfig(
        dimension=2, density=lam, alpha=4.0, user_process="type1",
        realizations=opts["realizations"], master_seed=opts["seed"])
    params = ModelParams(alpha=4.0, density=lam)
    header = ["r_center", "g_empirical", "g_app2_overlay", "pair_count"]
    multiple = len(ro_values) > 1
    for ro in ro_values:
        est = estimate_pcf(cfg, ro, opts["ro-halfwidth"], edges)
        overlay = pcf_app2_overlay(est.r_centers, ro, params)
        rows = [(_fmt(rc), _fmt(g), _fmt(ov), str(int(pc)))
                for rc, g, ov, pc in zip(est.r_centers, est.g, overlay,
                                         est.pair_counts)]
        out = _pcf_out_path(Path(opts["out"]), ro, multiple)
        _write_csv(out, header, rows)
        per_ro = dict(opts)
        per_ro["ro"] = [ro]
        _write_manifest(out, "pcf", per_ro, started, 0,
                        {"conditioning_count": est.conditioning_count})
    return EXIT_OK


def cmd_powercdf(opts: dict) -> int:
    started = time.perf_counter()
    base = ExperimentConfig(
        dimension=2, density=opts["lambda"], alpha=opts["alpha"],
        user_process="type1", realizations=opts["realizations"],
        master_seed=opts["seed"], tx_power_dbm=opts["tx-dbm"])
    s1, i1 = collect_power_samples(base)
    s2, i2 = collect_power_samples(replace(base, user_process="type2"))
    pooled = np.concatenate([s1.samples, s2.samples, i1.samples, i2.samples])
    lo, hi = np.quantile(pooled, [0.001, 0.999])
    grid = np.linspace(lo, hi, _POWER_GRID_POINTS)
    rows = [(_fmt(x), _fmt(s1.cdf(x)), _fmt(s2.cdf(x)),
             _fmt(i1.cdf(x)), _fmt(i2.cdf(x))) for x in grid]
    header = ["power_dbm", "cdf_signal_type1", "cdf_signal_type2",
              "cdf_interf_type1", "cdf_interf_type2"]
    _write_csv(Path(opts["out"]), header, rows)
    stats = {"median_signal_gap_db": s1.quantile(0.5) - s2.quantile(0.5)}
    _write_manifest(Path(opts["out"]), "powercdf", opts, started,
                    2 * opts["realizations"] - s1.count - s2.count, stats)
    return EXIT_OK


def cmd_validate(quick: bool, seed: int | None = None) -> int:
    from .acceptance import FULL_PROFILE, QUICK_PROFILE, run_acceptance

    profile = QUICK_PROFILE if quick else FULL_PROFILE
    results = run_acceptance(profile, stream=sys.stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


_COMMANDS = {
    "coverage": cmd_coverage,
    "linkdist": cmd_linkdist,
    "pcf": cmd_pcf,
    "powercdf": cmd_powercdf,
}


def run_from_manifest(path, out=None) -> int:
    """Re-run the command recorded in a manifest; reproduces its CSV
    byte-exactly (optionally redirected to ``out``)."""
    manifest = json.loads(Path(path).read_text())
    opts = dict(manifest["config"])
    if out is not None:
        opts["out"] = str(out)
    return _COMMANDS[manifest["command"]](opts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typcell",
        description="Coverage and distance statistics for Poisson cellular "
                    "networks: cell-centric (type1) vs user-centric (type2).")
    sub = parser.add_subparsers(dest="command", required=True)

    cov = sub.add_parser("coverage", help="coverage probability vs SIR threshold "
                         "for both user models (analytic, full Monte Carlo, or "
                         "surrogate interferer fields)")
    cov.add_argument("--dim", type=int)
    cov.add_argument("--alpha", type=float)
    cov.add_argument("--lambda", type=float, dest="lambda_")
    cov.add_argument("--process", choices=["type1", "type2"])
    cov.add_argument("--method", choices=["analytic", "mc", "app1", "app2"])
    cov.add_argument("--tau-db", type=str, help="inclusive dB grid start:stop:step")
    cov.add_argument("--realizations", type=int)

    link = sub.add_parser("linkdist", help="empirical vs approximate CDFs of the "
                          "serving and dominant-interferer distances (2-D "
                          "in-cell user)")
    link.add_argument("--lambda", type=float, dest="lambda_")
    link.add_argument("--realizations", type=int)
    link.add_argument("--grid", type=str, help="inclusive r grid start:stop:step")

    pcf = sub.add_parser("pcf", help="conditional pair correlation of interferers "
                         "around the user, with the dominant-interferer overlay")
    pcf.add_argument("--lambda", type=float, dest="lambda_")
    pcf.add_argument("--ro", type=float, action="append",
                     help="conditioning link distance (repeatable)")
    pcf.add_argument("--ro-halfwidth", type=float)
    pcf.add_argument("--bins", type=str, help="bin edges start:stop:step")
    pcf.add_argument("--realizations", type=int)

    power = sub.add_parser("powercdf", help="desired-signal and interference "
                           "power CDFs for both user models on a shared dBm grid")
    power.add_argument("--lambda", type=float, dest="lambda_")
    power.add_argument("--alpha", type=float)
    power.add_argument("--tx-dbm", type=float)
    power.add_argument("--realizations", type=int)

    for p in (cov, link, pcf, power):
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=str)
        p.add_argument("--config", type=str, help="flat key=value config file")

    val = sub.add_parser("validate", help="run the acceptance suite "
                         "(every numeric contract, pass/fail per criterion)")
    group = val.add_mutually_exclusive_group()
    group.add_argument("--quick", action="store_true",
                       help="reduced sample counts with noise-scaled tolerances")
    group.add_argument("--full", action="store_true",
                       help="full sample counts and tolerances (default)")

    replay = sub.add_parser("replay", help="re-run a recorded manifest")
    replay.add_argument("manifest", type=str)
    replay.add_argument("--out", type=str)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "validate":
            return cmd_validate(quick=args.quick)
        if args.command == "replay":
            return run_from_manifest(args.manifest, out=args.out)
        provided = {k.replace("_", "-").rstrip("-"): v
                    for k, v in vars(args).items()
                    if k not in ("command", "config")}
        opts = _resolve(args.command, provided, getattr(args, "config", None))
        return _COMMANDS[args.command](opts)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (SimulationError, QuadratureError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
