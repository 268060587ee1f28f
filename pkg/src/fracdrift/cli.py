"""Command-line entry point: ``fracdrift <subcommand> [flags]``.

Exit codes: 0 success, 1 run-time failure, 2 invalid input.

Settings resolve as flag > ``--config`` file (TOML or JSON, keys named like
the flags) > built-in default; the seed falls back to ``$FRACDRIFT_SEED``
before its default.  Every run that writes files also writes ``run.json``
with the resolved settings; passing that file back through ``--config``
reproduces the run.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import FracDriftError, ReplicateFailure, ValidationError
from .estimator import estimate
from .fbm import HurstModel, sample_path
from .model import read_series_csv, simulate, write_series_csv
from .montecarlo import (ExperimentConfig, SUMMARY_HEADER, default_workers,
                         replicate_rng, run_convergence_trace, run_rate_check,
                         run_table, summary_row, write_report)
from .oracles import check_densities, identity_sweep, sweep_rng
from .sampling import make_grid

# Settings that shape results; anything else (out, threads, format, config)
# is execution detail and stays out of run.json's "resolved" block.
DEFAULTS = {
    "simulate": {"scheme": "jittered", "n": 300, "hurst": 0.75, "sigma": 1.0,
                 "a": 2.0, "seed": 0},
    "experiment": {"scheme": "jittered", "n": 300, "m": 1000, "hurst": 0.75,
                   "sigma": 1.0, "a": 2.0, "seed": 0},
    "convergence": {"scheme": "deterministic", "n_max": 300, "m": 1000,
                    "hurst": 0.75, "sigma": 1.0, "a": 1.0, "seed": 0},
    "rate-check": {"scheme": "jittered", "ns": [100, 200, 400, 800], "m": 5000,
                   "hurst": 0.75, "sigma": 1.0, "a": 2.0, "seed": 0},
    "densities-check": {"max_index": 5, "n": 5, "sweep_points": 50, "seed": 0},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ns_list(text):
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    p = _Parser(prog="fracdrift", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, out=True):
        sp.add_argument("--config", default=None, help="TOML or JSON settings file")
        sp.add_argument("--seed", type=int, default=S)
        sp.add_argument("--format", choices=["csv", "json"], default="csv",
                        help="rendering of the summary printed on stdout")
        if out:
            sp.add_argument("--out", "--output-dir", dest="out", default="out",
                            help="directory for every file written (default: out)")

    def model_flags(sp):
        sp.add_argument("--scheme", choices=["deterministic", "jittered", "renewal"], default=S)
        sp.add_argument("--hurst", type=float, default=S)
        sp.add_argument("--sigma", type=float, default=S)
        sp.add_argument("--a", type=float, default=S, help="true drift")

    sp = sub.add_parser("simulate", help="simulate one series -> series.csv")
    common(sp)
    model_flags(sp)
    sp.add_argument("--n", type=int, default=S)

    sp = sub.add_parser("estimate", help="estimate the drift from a (tau, y) CSV")
    sp.add_argument("input")
    sp.add_argument("--true-a", type=float, default=None)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")

    for name, help_ in (("experiment", "Monte Carlo table at fixed N"),
                        ("convergence", "mean/SD trace for N = 1..n-max"),
                        ("rate-check", "log-log slope of E[A_N^2] over N")):
        sp = sub.add_parser(name, help=help_)
        common(sp)
        model_flags(sp)
        sp.add_argument("--m", type=int, default=S, help="replicates")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: available CPUs)")
        if name == "experiment":
            sp.add_argument("--n", type=int, default=S)
        elif name == "convergence":
            sp.add_argument("--n-max", type=int, default=S)
        else:
            sp.add_argument("--ns", type=_ns_list, default=S, help="e.g. 100,200,400,800")

    sp = sub.add_parser("densities-check",
                        help="quadrature vs closed form for the renewal densities")
    common(sp)
    sp.add_argument("--max-index", type=int, default=S)
    sp.add_argument("--n", type=int, default=S, help="largest N checked")
    sp.add_argument("--sweep-points", type=int, default=S)
    return p


def load_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except ValueError as exc:
        raise ValidationError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"config {path} must hold a table/object")
    if "resolved" in data:  # a run.json from an earlier run
        data = data["resolved"]
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(command, args) -> tuple[dict, dict, dict]:
    """Merge defaults, config file and flags; returns (resolved, file, flags)."""
    defaults = DEFAULTS[command]
    from_file = load_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(from_file) - set(defaults)
    if unknown:
        raise ValidationError(f"unknown config keys for {command}: {sorted(unknown)}")
    flags = {k: v for k, v in vars(args).items() if k in defaults}
    resolved = dict(defaults)
    if "seed" in defaults and os.environ.get("FRACDRIFT_SEED"):
        try:
            resolved["seed"] = int(os.environ["FRACDRIFT_SEED"])
        except ValueError:
            raise ValidationError("FRACDRIFT_SEED must be an integer") from None
    resolved.update(from_file)
    resolved.update(flags)
    return resolved, from_file, flags


def _write_run_json(out, command, resolved, from_file, flags):
    doc = {"subcommand": command, "resolved": resolved,
           "provenance": {"config_file": from_file, "flags": flags}}
    (out / "run.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _emit(fmt, header, row, stream):
    if fmt == "json":
        stream.write(json.dumps(dict(zip(header, row))) + "\n")
    else:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(header)
        w.writerow(row)


def _experiment_config(command, r) -> ExperimentConfig:
    common = dict(scheme=r["scheme"], a_true=float(r["a"]), hurst=float(r["hurst"]),
                  sigma=float(r["sigma"]), m=r["m"], seed=r["seed"])
    if command == "experiment":
        return ExperimentConfig(n=r["n"], **common)
    if command == "convergence":
        return ExperimentConfig(n=r["n_max"], **common)
    ns = r["ns"]
    if not isinstance(ns, list) or len(set(ns)) < 3:
        raise ValidationError(f"ns must list at least 3 distinct sizes, got {ns}")
    if r["m"] < 2000:
        raise ValidationError(f"rate-check needs m >= 2000, got {r['m']}")
    return ExperimentConfig(n=max(ns), rate_check_ns=tuple(ns), **common)


def cmd_simulate(args, stdout):
    r, from_file, flags = resolve("simulate", args)
    # same checks as a Monte Carlo config, before anything is computed
    ExperimentConfig(scheme=r["scheme"], n=r["n"], seed=r["seed"], m=1,
                     hurst=float(r["hurst"]), sigma=float(r["sigma"]), a_true=float(r["a"]))
    model = HurstModel(float(r["hurst"]), float(r["sigma"]))
    out = Path(args.out)
    rng = replicate_rng(r["seed"])
    grid = make_grid(r["scheme"], r["n"], rng)
    obs = simulate(float(r["a"]), grid, sample_path(model, grid.taus, rng))
    out.mkdir(parents=True, exist_ok=True)
    write_series_csv(obs, out / "series.csv")
    _write_run_json(out, "simulate", r, from_file, flags)
    _emit(args.format, ["series", "n"], [str(out / "series.csv"), obs.n], stdout)


def cmd_estimate(args, stdout):
    obs = read_series_csv(args.input, drift_true=args.true_a)
    d = estimate(obs)
    header, row = ["a_hat", "d_n", "n"], [repr(d.a_hat), repr(d.d_n), d.n]
    if d.a_n is not None:
        header.append("a_n")
        row.append(repr(d.a_n))
    if args.format == "json":
        stdout.write(json.dumps({"a_hat": d.a_hat, "d_n": d.d_n, "n": d.n,
                                 **({"a_n": d.a_n} if d.a_n is not None else {})}) + "\n")
    else:
        _emit("csv", header, row, stdout)


def cmd_montecarlo(args, stdout):
    command = args.command
    r, from_file, flags = resolve(command, args)
    config = _experiment_config(command, r)
    workers = default_workers() if args.threads is None else args.threads
    if workers < 1:
        raise ValidationError(f"--threads must be >= 1, got {workers}")
    runner = {"experiment": run_table, "convergence": run_convergence_trace,
              "rate-check": run_rate_check}[command]
    report = runner(config, workers=workers)
    out = Path(args.out)
    write_report(report, out)
    _write_run_json(out, command, r, from_file, flags)
    header, row = list(SUMMARY_HEADER), summary_row(report)
    if report.rate_fit is not None:
        header += ["slope", "intercept"]
        row += [repr(v) for v in report.rate_fit]
    _emit(args.format, header, row, stdout)


def cmd_densities(args, stdout):
    r, from_file, flags = resolve("densities-check", args)
    for key in ("max_index", "n", "sweep_points"):
        if int(r[key]) < 1:
            raise ValidationError(f"{key.replace('_', '-')} must be >= 1, got {r[key]}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dens = check_densities(int(r["max_index"]), int(r["n"]))
    ids = identity_sweep(int(r["sweep_points"]), sweep_rng(int(r["seed"])))
    with open(out / "densities.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "n", "i", "j", "integral", "abs_err", "pass"])
        for c in dens:
            w.writerow([c.kind.value, c.n, c.i, "" if c.j is None else c.j,
                        repr(c.mass), repr(c.abs_err), int(c.passed)])
    with open(out / "identities.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["identity", "params", "closed_form", "quadrature", "rel_err", "pass"])
        for c in ids:
            w.writerow([c.identity, " ".join(repr(p) for p in c.params), repr(c.closed_form),
                        repr(c.quadrature), repr(c.rel_err), int(c.passed)])
    _write_run_json(out, "densities-check", r, from_file, flags)
    n_fail = sum(not c.passed for c in dens) + sum(not c.passed for c in ids)
    _emit(args.format, ["densities", "identities", "failures"],
          [len(dens), len(ids), n_fail], stdout)
    return 1 if n_fail else 0


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"simulate": cmd_simulate, "estimate": cmd_estimate,
                   "experiment": cmd_montecarlo, "convergence": cmd_montecarlo,
                   "rate-check": cmd_montecarlo, "densities-check": cmd_densities}
        return handler[args.command](args, stdout) or 0
    except (UsageError, ValidationError, ValueError, TypeError) as exc:
        stderr.write(f"fracdrift: error: {exc}\n")
        return 2
    except ReplicateFailure as exc:
        stderr.write(f"fracdrift: replicate {exc.index} failed: {exc.cause}\n")
        return 1
    except (FracDriftError, OSError, ArithmeticError) as exc:
        stderr.write(f"fracdrift: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
