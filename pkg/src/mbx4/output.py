"""CSV and manifest emitters with fixed, documented column schemas.

Floats are written with ``repr`` (shortest round-trip form), so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from .core import CHANNELS

FIELDS_COLUMNS = ("z", "t",
                  "omega_a_re", "omega_a_im", "omega_b_re", "omega_b_im",
                  "omega_c_re", "omega_c_im", "omega_d_re", "omega_d_im")
AREAS_COLUMNS = ("z", "theta_a", "theta_b", "theta_c", "theta_d",
                 "theta_1", "theta_2", "theta_total",
                 "theta_abs_a", "theta_abs_b", "theta_abs_c", "theta_abs_d",
                 "energy")
PEAKS_COLUMNS = ("z", "channel", "t_peak", "amplitude")
FITS_COLUMNS = ("z", "channel", "amplitude", "width", "center",
                "rms_residual", "n_points")

ENGINE_VERSION = "0.1.0"


def _fmt(x) -> str:
    return repr(float(x))


def _write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    return path


def snapshot_filename(index: int) -> str:
    return f"fields_z{index:04d}.csv"


def write_fields_csv(path, snapshot, grid):
    t = grid.t
    om = snapshot.omega
    z = _fmt(snapshot.z)
    rows = (
        [z, _fmt(t[k])]
        + [part for i in range(4)
           for part in (_fmt(om[i, k].real), _fmt(om[i, k].imag))]
        for k in range(grid.n_t)
    )
    return _write_rows(path, FIELDS_COLUMNS, rows)


def write_areas_csv(path, records, energies):
    rows = (
        [_fmt(r.z), _fmt(r.theta_a), _fmt(r.theta_b), _fmt(r.theta_c),
         _fmt(r.theta_d), _fmt(r.theta_1), _fmt(r.theta_2),
         _fmt(r.theta_total), _fmt(r.theta_abs_a), _fmt(r.theta_abs_b),
         _fmt(r.theta_abs_c), _fmt(r.theta_abs_d), _fmt(e)]
        for r, e in zip(records, energies)
    )
    return _write_rows(path, AREAS_COLUMNS, rows)


def write_peaks_csv(path, peak_z, peak_times, peak_amps):
    peak_z = np.asarray(peak_z)
    rows = (
        [_fmt(peak_z[k]), CHANNELS[i], _fmt(peak_times[i, k]),
         _fmt(peak_amps[i, k])]
        for k in range(len(peak_z))
        for i in range(4)
    )
    return _write_rows(path, PEAKS_COLUMNS, rows)


def write_fits_csv(path, fit_rows):
    """fit_rows: iterable of (z, channel, SechFit)."""
    rows = (
        [_fmt(z), channel, _fmt(fit.amplitude), _fmt(fit.width),
         _fmt(fit.center), _fmt(fit.rms_residual), str(fit.n_points)]
        for z, channel, fit in fit_rows
    )
    return _write_rows(path, FITS_COLUMNS, rows)


def write_manifest(path, config_digest, outputs, grid, n_detuning, backend,
                   threads, status="ok", last_good_z=None, runtime_s=None):
    doc = {
        "engine_version": ENGINE_VERSION,
        "config_sha256": config_digest,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "status": status,
        "outputs": [str(p) for p in outputs],
        "convergence": {"n_t": grid.n_t, "n_z": grid.n_z,
                        "n_detuning": n_detuning},
        "kernel_backend": backend,
        "threads": threads,
    }
    if last_good_z is not None:
        doc["last_good_z"] = last_good_z
    if runtime_s is not None:
        doc["runtime_s"] = runtime_s
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path
