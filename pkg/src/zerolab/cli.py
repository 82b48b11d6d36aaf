"""Command-line driver binding config files to module pipelines.

One self-describing JSON config per run; flags only override the path-like
things (output directory, seed, thread cap, verbosity).  Every subcommand
writes all of its outputs under --out together with a manifest recording
the config hash, effective seed, and tool version.  Exit codes: 0 success,
1 configuration problems, 2 numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, NumericalError
from .ensembles import RngStream, assemble_polynomial, sample_coefficients
from .experiments import (
    ExperimentConfig,
    _MeasureRuntime,
    _resolve_runtime,
    load_config,
    load_records,
    persist,
    run_equidistribution,
    run_necessity,
    run_pointwise_tail,
    run_probability_convergence,
    summarize,
)
from .extremal import radial_equilibrium_cdf
from .onb import bergman_convergence_report, save_onb_csv
from .report import write_report
from .stahltotik import onp_root_asymptotic_check, roots_of_combination
from .zeros import roots_of


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out: Path, args, cfg_seed, extra=None) -> None:
    manifest = {
        "schema": 1,
        "subcommand": args.subcommand,
        "config": str(args.config),
        "config_sha256": _sha256(args.config),
        "seed": cfg_seed,
        "version": __version__,
    }
    if extra:
        manifest.update(extra)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _effective_config(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = ExperimentConfig(
            cfg.ensemble,
            cfg.coefficients,
            cfg.degrees,
            cfg.trials,
            cfg.regions,
            cfg.probes,
            cfg.epsilons,
            cfg.experiment_kind,
            int(args.seed),
            cfg.caps,
        )
    if args.threads is not None:
        caps = dict(cfg.caps)
        caps["threads"] = int(args.threads)
        cfg = ExperimentConfig(
            cfg.ensemble,
            cfg.coefficients,
            cfg.degrees,
            cfg.trials,
            cfg.regions,
            cfg.probes,
            cfg.epsilons,
            cfg.experiment_kind,
            cfg.seed,
            caps,
        )
    return cfg


def _write_csv(path, header, rows, comment=None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(comment + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _fmt(x) -> str:
    return repr(float(x))


def _cmd_extremal(cfg: ExperimentConfig, out: Path, args) -> dict:
    runtime = _resolve_runtime(cfg)
    if isinstance(runtime, _MeasureRuntime):
        raise ConfigError("the extremal subcommand needs a weight ensemble")
    lo, hi, count = cfg.caps.get("extremal_grid", (-2.0, 2.0, 2000))
    log_r = np.linspace(float(lo), float(hi), int(count))
    ev = runtime.evaluator
    if runtime.m == 1:
        values = ev.profile_values(log_r[:, None])
        cdf = [radial_equilibrium_cdf(ev, float(np.exp(s))) for s in log_r]
        rows = [( _fmt(s), _fmt(v), _fmt(c)) for s, v, c in zip(log_r, values, cdf)]
        _write_csv(out / "extremal.csv", ["log_r", "V", "mu_cdf"], rows)
    else:
        diag = np.tile(log_r[:, None], (1, runtime.m))
        values = ev.profile_values(diag)
        rows = [(_fmt(s), _fmt(v)) for s, v in zip(log_r, values)]
        _write_csv(out / "extremal.csv", ["log_r_diagonal", "V"], rows)
    return {"points": int(count)}


def _cmd_onb(cfg: ExperimentConfig, out: Path, args) -> dict:
    runtime = _resolve_runtime(cfg)
    if isinstance(runtime, _MeasureRuntime):
        raise ConfigError("the onb subcommand needs a weight ensemble")
    files = []
    for n in cfg.degrees:
        basis = runtime.basis(n)
        path = out / f"onb_n{n}.csv"
        save_onb_csv(basis, path)
        files.append(path.name)
    return {"files": files}


def _cmd_sample(cfg: ExperimentConfig, out: Path, args) -> dict:
    runtime = _resolve_runtime(cfg)
    files = []
    for n in cfg.degrees:
        basis = runtime.basis(n)
        rows = []
        for t in range(cfg.trials):
            stream = RngStream(cfg.seed, (2, n, t))
            coeffs = sample_coefficients(cfg.coefficients, basis.size, stream)
            for j in range(len(coeffs)):
                rows.append((t, j, _fmt(coeffs.log_mag[j]), _fmt(coeffs.phase[j])))
        path = out / f"samples_n{n}.csv"
        _write_csv(path, ["trial", "index", "log_mag", "phase"], rows)
        files.append(path.name)
    return {"files": files}


def _cmd_roots(cfg: ExperimentConfig, out: Path, args) -> dict:
    runtime = _resolve_runtime(cfg)
    if runtime.m != 1:
        raise ConfigError("the roots subcommand is univariate")
    files = []
    for n in cfg.degrees:
        basis = runtime.basis(n)
        for t in range(cfg.trials):
            stream = RngStream(cfg.seed, (5, n, t))
            coeffs = sample_coefficients(cfg.coefficients, basis.size, stream)
            poly = assemble_polynomial(basis, coeffs, tuple(stream.provenance()))
            if isinstance(runtime, _MeasureRuntime):
                roots = roots_of_combination(basis, coeffs)
            else:
                roots = roots_of(poly)
            rows = [
                (_fmt(z.real), _fmt(z.imag), _fmt(res))
                for z, res in zip(roots.roots, roots.log10_residuals)
            ]
            path = out / f"roots_n{n}_t{t}.csv"
            _write_csv(path, ["re", "im", "log10_residual"], rows)
            files.append(path.name)
    return {"files": files}


def _cmd_experiment(cfg: ExperimentConfig, out: Path, args) -> dict:
    extra: dict = {}
    kind = cfg.experiment_kind
    if kind in ("equidistribution", "bergman", "onp_check"):
        if kind == "bergman":
            runtime = _resolve_runtime(cfg)
            if isinstance(runtime, _MeasureRuntime):
                raise ConfigError("bergman runs need a weight ensemble")
            lo, hi, count = cfg.caps.get("bergman_grid", (0.1, 3.0, 120))
            radii = np.linspace(float(lo), float(hi), int(count))
            if runtime.m == 1:
                grid = radii.astype(complex)
            else:
                grid = np.tile(radii[:, None], (1, runtime.m)).astype(complex)
            report = bergman_convergence_report(
                runtime.weight, cfg.degrees, grid, runtime.evaluator
            )
            _write_csv(
                out / "bergman.csv",
                ["degree", "sup_error"],
                [(n, _fmt(e)) for n, e in zip(report.degrees, report.sup_errors)],
                comment="# schema: 1",
            )
            extra["flags"] = list(report.flags)
            return extra
        if kind == "onp_check":
            runtime = _resolve_runtime(cfg)
            if not isinstance(runtime, _MeasureRuntime):
                raise ConfigError("onp_check runs need a measure ensemble")
            probes = [p[0] for p in cfg.probes]
            report = onp_root_asymptotic_check(runtime.spec, cfg.degrees, probes)
            _write_csv(
                out / "onp_check.csv",
                ["degree", "max_error"],
                [(n, _fmt(e)) for n, e in zip(report.degrees, report.max_errors)],
                comment="# schema: 1",
            )
            extra["flags"] = list(report.flags)
            return extra
        records = run_equidistribution(cfg)
        stats = summarize(records, cfg.epsilons)
    elif kind == "probability_convergence":
        records, stats = run_probability_convergence(cfg)
        extra["summary_flags"] = list(stats.flags)
    elif kind == "pointwise_tail":
        records, report = run_pointwise_tail(cfg)
        stats = summarize(records, cfg.epsilons)
        _write_csv(
            out / "tail_report.csv",
            ["degree", "frequency", "envelope"],
            [(r.degree, _fmt(r.frequency), _fmt(r.envelope)) for r in report.rows],
            comment="# schema: 1",
        )
        extra["probe_reference"] = report.reference
    elif kind == "necessity":
        records, report = run_necessity(cfg)
        stats = summarize(records, cfg.epsilons)
        _write_csv(
            out / "necessity_report.csv",
            ["phase", "degree", "trial", "region", "certificate", "deviation"],
            [
                ("necessity", r.degree, r.trial, r.region, int(r.certificate), _fmt(r.deviation))
                for r in report.rows
            ]
            + [
                ("control", r.degree, r.trial, r.region, int(r.certificate), _fmt(r.deviation))
                for r in report.control_rows
            ],
            comment="# schema: 1",
        )
        extra["firings"] = report.firings
        extra["control_firings"] = report.control_firings
        extra["max_deviation"] = report.max_deviation
    else:
        raise ConfigError(f"unknown experiment_kind {kind!r}")
    persist(records, out / "records.jsonl")
    persist(stats, out / "summary.csv")
    return extra


def _cmd_report(cfg_path, out: Path, args) -> dict:
    with open(cfg_path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"malformed JSON in {cfg_path} at line {exc.lineno}: {exc.msg}"
            )
    if "records" not in raw:
        raise ConfigError("report configs need a 'records' key with a JSONL path")
    records = load_records(raw["records"])
    epsilons = tuple(float(e) for e in raw.get("epsilons", (0.05, 0.1, 0.2)))
    written = write_report(records, out, epsilons)
    return {"files": [p.name for p in written], "records": str(raw["records"])}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zerolab",
        description="numerical laboratory for zero distributions of random polynomial ensembles",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, helptext in (
        ("extremal", "tabulate the extremal function and radial distribution"),
        ("onb", "build and export orthonormal basis tables"),
        ("sample", "draw coefficient sequences"),
        ("roots", "find and dump roots of sampled polynomials"),
        ("experiment", "run a seeded experiment"),
        ("report", "summarize records and render figures"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--threads", type=int, default=None, help="worker cap")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.subcommand == "report":
            extra = _cmd_report(args.config, out, args)
            _write_manifest(out, args, None, extra)
            return 0
        cfg = _effective_config(args)
        handler = {
            "extremal": _cmd_extremal,
            "onb": _cmd_onb,
            "sample": _cmd_sample,
            "roots": _cmd_roots,
            "experiment": _cmd_experiment,
        }[args.subcommand]
        extra = handler(cfg, out, args)
        _write_manifest(out, args, cfg.seed, extra)
        if args.verbose:
            written = sorted(p.name for p in out.iterdir())
            print(
                f"{args.subcommand}: wrote {len(written)} file(s) to {out}: "
                + ", ".join(written),
                file=sys.stderr,
            )
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
