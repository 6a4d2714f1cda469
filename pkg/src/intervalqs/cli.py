"""Command line front end: one YAML config per run, files out.

    intervalqs COMMAND CONFIG [budget flags]

COMMAND is one of entropy, mme, conjugacy, scan, classify.  Every command
writes report.json (with the config embedded) to the output directory;
mme, conjugacy, scan and classify also write cdf.csv, F.csv, doubling.csv
and criticality.csv as applicable.  The environment variable
INTERVALQS_OUTPUT_DIR overrides the configured output directory.

Exit codes: 0 success (classify: consistent), 1 error, 2 classify
inconsistent, 3 screen failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from .classify import Budgets, classify, measures
from .conjugacy import build_conjugacy
from .errors import ConfigError, ConvergenceError, DomainError, GuardExceeded, ScreenFailure
from .maps import MultimodalMap
from .mme import default_r_grid, default_x_grid, doubling_constant, dumps_json, f17, jsonable
from .pullback import semi_hyperbolicity_scan
from .symbolic import topological_entropy

COMMANDS = ("entropy", "mme", "conjugacy", "scan", "classify")
FAMILIES = ("tent", "logistic", "polynomial", "piecewise_affine")
EMIT_KEYS = ("cdf", "F", "doubling", "criticality")
TOP_KEYS = ("family", "params", "critical_orders", "budgets", "output_dir", "emit")
OUTPUT_ENV = "INTERVALQS_OUTPUT_DIR"
CRITICALITY_SETS = ("turning", "all")

EXIT_OK, EXIT_ERROR, EXIT_INCONSISTENT, EXIT_SCREEN = 0, 1, 2, 3


@dataclass
class RunConfig:
    family: str
    params: tuple
    critical_orders: tuple | None = None
    budgets: Budgets = field(default_factory=Budgets)
    output_dir: str = "out"
    emit: dict = field(default_factory=lambda: {k: True for k in EMIT_KEYS})

    def make_map(self):
        return MultimodalMap.from_descriptor(self.family, self.params, self.critical_orders)

    def to_dict(self):
        d = {"family": self.family, "params": list(self.params)}
        if self.critical_orders is not None:
            d["critical_orders"] = list(self.critical_orders)
        d["budgets"] = self.budgets.to_dict()
        d["output_dir"] = self.output_dir
        d["emit"] = dict(self.emit)
        return d


def serialize(config):
    return yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=None)


def _number(value, kind):
    """value as ``kind`` (int or float) or None.  Accepts '1e-6' strings,
    which YAML 1.1 does not read as floats."""
    if isinstance(value, bool):
        return None
    if kind is int:
        return value if isinstance(value, int) else None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def _budgets(raw, problems):
    if raw is None:
        return Budgets()
    if not isinstance(raw, dict):
        problems.append("budgets: expected a mapping")
        return Budgets()
    types = Budgets.field_types()
    vals = {}
    for key, value in raw.items():
        if key not in types:
            problems.append(f"budgets.{key}: unknown key")
            continue
        kind = types[key]
        if kind is bool:
            if not isinstance(value, bool):
                problems.append(f"budgets.{key}: expected true or false")
                continue
            vals[key] = value
        elif kind is str:
            if key == "criticality_set" and value not in CRITICALITY_SETS:
                problems.append(f"budgets.{key}: expected one of {', '.join(CRITICALITY_SETS)}")
                continue
            vals[key] = value
        else:
            num = _number(value, kind)
            if num is None:
                problems.append(f"budgets.{key}: expected {'an integer' if kind is int else 'a number'}")
            elif not num > 0:
                problems.append(f"budgets.{key}: must be positive")
            else:
                vals[key] = num
    return Budgets(**vals)


def parse_config(text):
    """Validated RunConfig from YAML text; ConfigError lists every problem."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        raise ConfigError([f"parse error{where}: {getattr(exc, 'problem', None) or exc}"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a mapping"])
    problems = [f"{key}: unknown key" for key in raw if key not in TOP_KEYS]
    family = raw.get("family")
    if family is None:
        problems.append("family required")
    elif family not in FAMILIES:
        problems.append(f"family: unknown family {family!r} (expected one of {', '.join(FAMILIES)})")
    params = raw.get("params")
    if params is None:
        problems.append("params required")
        params = []
    elif not isinstance(params, list) or any(_number(p, float) is None for p in params):
        problems.append("params: expected a list of numbers")
        params = []
    else:
        params = [_number(p, float) for p in params]
    orders = raw.get("critical_orders")
    if orders is not None:
        if not isinstance(orders, list) or any(_number(o, float) is None for o in orders):
            problems.append("critical_orders: expected a list of numbers")
            orders = None
        else:
            orders = tuple(_number(o, float) for o in orders)
    budgets = _budgets(raw.get("budgets"), problems)
    out = raw.get("output_dir", "out")
    if not isinstance(out, str) or not out:
        problems.append("output_dir: expected a non-empty path")
    emit = {k: True for k in EMIT_KEYS}
    raw_emit = raw.get("emit") or {}
    if not isinstance(raw_emit, dict):
        problems.append("emit: expected a mapping")
        raw_emit = {}
    for key, value in raw_emit.items():
        if key not in EMIT_KEYS:
            problems.append(f"emit.{key}: unknown key")
        elif not isinstance(value, bool):
            problems.append(f"emit.{key}: expected true or false")
        else:
            emit[key] = value
    config = RunConfig(family, tuple(params), orders, budgets, out, emit)
    if not problems:
        try:
            config.make_map()
        except (DomainError, TypeError, ValueError) as exc:
            problems.append(f"params: {exc}")
    if problems:
        raise ConfigError(problems)
    return config


# emission -----------------------------------------------------------------------
def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def criticality_csv(scan):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "criticality", "plateau", "unresolved", "resolved"])
    for n, raw, cur, unres, ok in scan.rows():
        w.writerow([n, raw, cur, unres, int(ok)])
    return buf.getvalue()


def _scan_record(scan):
    return {"D": scan.D, "r": scan.r, "plateau": scan.plateau, "semi_hyperbolic": scan.semi_hyperbolic,
            "curve": scan.curve[1:].tolist(), "effective_n_max": scan.effective_n_max, "D_max": scan.D_max,
            "argmax_x": scan.argmax_x}


def output_dir(config):
    return Path(os.environ.get(OUTPUT_ENV) or config.output_dir)


def run(config, command, out=sys.stdout):
    """Dispatch ``command``; returns (exit code, {file name: text})."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    fmap = config.make_map()
    b = config.budgets
    files = {}
    report = {"command": command, "config": config.to_dict(), "version": __version__}
    code = EXIT_OK
    r_grid = default_r_grid(b.grid_n, b.r_count, b.r_max)
    x_grid = default_x_grid(b.x_grid)
    if command == "entropy":
        ent = topological_entropy(fmap, b.entropy_depth, guard=b.entropy_lap_guard, cap=True)
        report["entropy"] = dataclasses.asdict(ent)
        lines = [f"h_top = {ent.h_top:.12g}  exp(h_top) = {ent.s:.12g}  (lap depth {len(ent.lap_counts)})"]
    elif command in ("mme", "conjugacy"):
        res, mu, nu = measures(fmap, b)
        report["mme"] = {"s_hat": res.s_hat, "iterations": res.iterations, "residual": res.residual,
                         "converged": res.converged, "grid_cells": mu.n_cells}
        if command == "mme":
            dbl = doubling_constant(mu, r_grid, x_grid)
            report["doubling"] = dbl.to_dict()
            if config.emit["cdf"]:
                files["cdf.csv"] = mu.to_csv()
            if config.emit["doubling"]:
                files["doubling.csv"] = dbl.to_csv()
            lines = [f"s_hat = {res.s_hat:.12g} after {res.iterations} steps (residual {res.residual:.2e})",
                     f"C_* = {dbl.C_star:.6g} at r = {dbl.worst_r:.3g}"]
        else:
            prof = build_conjugacy(fmap, nu, res.s_hat, eps_grid=r_grid, x_grid=x_grid)
            report["conjugacy"] = prof.summary()
            report["conjugacy"]["qs_table"] = [{"eps": e, "K": k, "x": x} for e, k, x in prof.qs_table]
            if config.emit["cdf"]:
                files["cdf.csv"] = prof.h_csv()
            if config.emit["F"]:
                files["F.csv"] = prof.F_csv()
            lines = [f"K = {prof.K:.6g} at eps = {prof.K_eps:.3g}",
                     f"slope residual = {prof.slope_residual:.3e}, conjugacy residual = {prof.conj_residual:.3e}"]
    elif command == "scan":
        scan = semi_hyperbolicity_scan(fmap, r=b.crit_radius, n_max=b.scan_depth, grid_size=b.scan_grid,
                                       criticality_set=b.criticality_set, window=b.plateau_window, D_max=b.D_max)
        report["scan"] = _scan_record(scan)
        if config.emit["criticality"]:
            files["criticality.csv"] = criticality_csv(scan)
        lines = [f"D = {scan.D} (plateau {scan.plateau}, resolved to depth {scan.effective_n_max})",
                 f"semi-hyperbolic at r = {scan.r}: {scan.semi_hyperbolic}"]
    else:
        try:
            rep = classify(fmap, b)
        except ScreenFailure as exc:
            report["screen_failure"] = str(exc)
            files["report.json"] = dumps_json(jsonable(report))
            print(f"screen failure: {exc}", file=out)
            return EXIT_SCREEN, files
        report.update(rep.to_dict())
        art = rep.artifacts
        if config.emit["cdf"]:
            files["cdf.csv"] = art["mu"].to_csv()
        if config.emit["F"]:
            files["F.csv"] = art["profile"].F_csv()
        if config.emit["doubling"]:
            files["doubling.csv"] = art["doubling"].to_csv()
        if config.emit["criticality"]:
            files["criticality.csv"] = criticality_csv(art["scan"])
        code = EXIT_OK if rep.consistent else EXIT_INCONSISTENT
        names = ("semi-hyperbolic", "non-recurrent", "doubling", "QS conjugate")
        lines = [f"{name:>16}: {v}" for name, v in zip(names, rep.verdicts)]
        lines.append(f"{'consistent':>16}: {rep.consistent}")
        lines += report["diagnostics"]
    files["report.json"] = dumps_json(jsonable(report))
    print(f"{command} {fmap!r}", file=out)
    for line in lines:
        print("  " + line, file=out)
    return code, files


FLAGS = {
    "entropy_depth": int, "exactness_depth": int, "period_max": int, "crit_radius": float,
    "scan_depth": int, "scan_grid": int, "criticality_set": str,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="intervalqs", description="Equivalent conditions for multimodal interval maps.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("config", help="YAML run config")
    for name, kind in FLAGS.items():
        kw = {"choices": CRITICALITY_SETS} if name == "criticality_set" else {}
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=kind, default=None, **kw)
    p.add_argument("--version", action="version", version=__version__)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        config = parse_config(text)
        overrides = {k: getattr(args, k) for k in FLAGS if getattr(args, k) is not None}
        bad = [f"--{k.replace('_', '-')}: must be positive" for k, v in overrides.items()
               if not isinstance(v, str) and not v > 0]
        if bad:
            raise ConfigError(bad)
        config.budgets = dataclasses.replace(config.budgets, **overrides)
        code, files = run(config, args.command)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ConvergenceError, GuardExceeded, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = output_dir(config)
    for name, text in files.items():
        _write(out / name, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
