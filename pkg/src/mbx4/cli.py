"""Command-line interface: closed-form runs, propagation runs, validation.

Exit codes: 0 success, 1 validation failure, 2 config schema error,
3 parameter-domain error, 4 numerical abort (the manifest then records
the last good depth).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels, validation
from .analytic import analytic_areas, analytic_fields
from .config import (RESOLUTIONS, analytic_z_values, apply_resolution,
                     build_grid, build_medium, build_pulses, build_soliton_params,
                     build_solver_config, config_hash, load_config, output_dir)
from .core import DomainError, SchemaError, initial_snapshot
from .diagnostics import fit_sech
from .output import (snapshot_filename, write_areas_csv, write_fields_csv,
                     write_fits_csv, write_manifest, write_peaks_csv)
from .solver import NumericalAbort, propagate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SCHEMA = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4


def _prepare(args):
    doc = load_config(args.config)
    doc = apply_resolution(doc, args.resolution)
    out = Path(output_dir(doc, args.out))
    out.mkdir(parents=True, exist_ok=True)
    return doc, out


def cmd_analytic(args) -> int:
    started = time.perf_counter()
    doc, out = _prepare(args)
    grid = build_grid(doc)
    medium = build_medium(doc, grid)
    params = build_soliton_params(doc, medium)
    z_values = analytic_z_values(doc, params.kappa)

    outputs = []
    records = []
    energies = []
    for index, z in enumerate(z_values):
        snap = analytic_fields(z, grid, params)
        outputs.append(write_fields_csv(out / snapshot_filename(index), snap, grid))
        records.append(analytic_areas(z, params))
        mag2 = (np.abs(snap.omega) ** 2).sum(axis=0)
        energies.append(float(np.trapezoid(mag2, grid.t)))
    outputs.append(write_areas_csv(out / "areas.csv", records, energies))
    outputs.append(write_manifest(
        out / "manifest.json", config_hash(doc), outputs, grid,
        medium.n_detuning, "closed-form", 0,
        runtime_s=time.perf_counter() - started))
    _assert_outputs(outputs)
    print(f"wrote {len(outputs)} files to {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    doc, out = _prepare(args)
    grid = build_grid(doc)
    medium = build_medium(doc, grid)
    pulses = build_pulses(doc)
    cfg = build_solver_config(doc)
    initial = initial_snapshot(pulses, grid)
    digest = config_hash(doc)
    threads = kernels.resolve_threads(cfg.num_threads)

    try:
        result = propagate(initial, medium, grid, cfg)
    except NumericalAbort as exc:
        write_manifest(out / "manifest.json", digest, [], grid,
                       medium.n_detuning, kernels.get_backend(), threads,
                       status="aborted", last_good_z=exc.last_good_z,
                       runtime_s=time.perf_counter() - started)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    outputs = []
    for index, snap in enumerate(result.snapshots):
        outputs.append(write_fields_csv(out / snapshot_filename(index), snap, grid))
    outputs.append(write_areas_csv(out / "areas.csv", result.area_records,
                                   result.energies))
    outputs.append(write_peaks_csv(out / "peaks.csv", result.peak_z,
                                   result.peak_times, result.peak_amps))
    fit_rows = []
    final = result.snapshots[-1]
    for i, channel in enumerate("abcd"):
        try:
            fit_rows.append((final.z, channel, fit_sech(final.omega[i], grid)))
        except DomainError:
            continue  # channel empty or not single-peaked at the exit face
    outputs.append(write_fits_csv(out / "fits.csv", fit_rows))
    outputs.append(write_manifest(
        out / "manifest.json", digest, outputs, grid, medium.n_detuning,
        result.backend, threads, runtime_s=time.perf_counter() - started))
    _assert_outputs(outputs)
    print(f"wrote {len(outputs)} files to {out} "
          f"(backend: {result.backend})")
    return EXIT_OK


def cmd_validate(args) -> int:
    names = validation.CRITERION_NAMES
    if args.criteria:
        requested = tuple(name.strip() for name in args.criteria.split(","))
        unknown = [n for n in requested if n not in names]
        if unknown:
            print(f"error: unknown criteria {unknown}", file=sys.stderr)
            return EXIT_SCHEMA
        names = requested
    if args.list_criteria:
        for name in names:
            print(name)
        return EXIT_OK

    lines = []
    results = []
    for name in names:
        result = validation.run_criterion(name, fault=args.inject_fault)
        status = "PASS" if result.passed else "FAIL"
        line = (f"[{status}] {result.name} ({result.runtime_s:.1f} s): "
                f"{result.details}")
        print(line)
        lines.append(line)
        results.append(result)
    failed = [r.name for r in results if not r.passed]
    summary = (f"{len(failed)} criteria failed: {', '.join(failed)}" if failed
               else f"all {len(results)} criteria passed")
    print(summary)
    lines.append(summary)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "validation_report.txt").write_text("\n".join(lines) + "\n",
                                                   encoding="utf-8")
    return EXIT_VALIDATION if failed else EXIT_OK


def _assert_outputs(paths):
    for path in paths:
        path = Path(path)
        if not path.exists() or path.stat().st_size == 0:
            raise RuntimeError(f"declared output {path} missing or empty")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbx4",
        description="Four-pulse propagation in four-level resonant media")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analytic = sub.add_parser(
        "analytic", help="evaluate the closed-form solution at given depths")
    p_analytic.add_argument("--config", required=True)
    p_analytic.add_argument("--out", default=None)
    p_analytic.add_argument("--resolution", choices=RESOLUTIONS,
                            default="default")
    p_analytic.set_defaults(func=cmd_analytic)

    p_sim = sub.add_parser("simulate", help="propagate configured input pulses")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=None)
    p_sim.add_argument("--resolution", choices=RESOLUTIONS, default="default")
    p_sim.set_defaults(func=cmd_simulate)

    p_val = sub.add_parser("validate", help="run the acceptance criteria suite")
    p_val.add_argument("--list", action="store_true", dest="list_criteria")
    p_val.add_argument("--out", default=None,
                       help="also write the report to DIR/validation_report.txt")
    p_val.add_argument("--criteria", default=None,
                       help="comma-separated subset of criteria to run")
    p_val.add_argument("--inject-fault", choices=["kappa"], default=None,
                       help="deliberately corrupt the closed form (self-test)")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
