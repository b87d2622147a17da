"""JSON run-configuration schema: validation and construction of domain objects.

One JSON document describes one run, with sections ``grid``, ``medium``,
``solver`` and ``output`` plus either ``pulses`` (propagation runs) or
``soliton`` + z values (closed-form runs).  Structural problems raise
SchemaError and name the offending key; value problems surface as
DomainError from the domain types themselves.
"""

from __future__ import annotations

import hashlib
import json
import math

from .core import (DomainError, MediumSpec, PulseSpec, RetardedGrid,
                   SchemaError)
from .solver import SolverConfig

RESOLUTIONS = ("low", "default", "high")


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("config root must be a JSON object")
    return doc


def dump_config(doc) -> str:
    """Canonical serialization (sorted keys); parse -> dump -> parse is identity."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)


def config_hash(doc) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"),
                           allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _section(doc, name):
    if name not in doc:
        raise SchemaError(f"missing key: {name}")
    if not isinstance(doc[name], dict):
        raise SchemaError(f"wrong type for {name}: expected object")
    return doc[name]


def _number(section, name, path, optional=False, default=None):
    if name not in section:
        if optional:
            return default
        raise SchemaError(f"missing key: {path}.{name}")
    value = section[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"wrong type for {path}.{name}: expected number")
    return float(value)


def _integer(section, name, path):
    if name not in section:
        raise SchemaError(f"missing key: {path}.{name}")
    value = section[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"wrong type for {path}.{name}: expected integer")
    return value


def _string(section, name, path, optional=False, default=None):
    if name not in section:
        if optional:
            return default
        raise SchemaError(f"missing key: {path}.{name}")
    value = section[name]
    if not isinstance(value, str):
        raise SchemaError(f"wrong type for {path}.{name}: expected string")
    return value


def build_grid(doc) -> RetardedGrid:
    g = _section(doc, "grid")
    return RetardedGrid(
        t_min=_number(g, "t_min", "grid"),
        t_max=_number(g, "t_max", "grid"),
        n_t=_integer(g, "n_t", "grid"),
        z_max=_number(g, "z_max", "grid"),
        n_z=_integer(g, "n_z", "grid"),
    )


def build_medium(doc, grid: RetardedGrid) -> MediumSpec:
    m = _section(doc, "medium")
    if "t2_star" not in m:
        raise SchemaError("missing key: medium.t2_star")
    raw = m["t2_star"]
    if raw is None:
        t2_star = None
    elif isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise SchemaError("wrong type for medium.t2_star: expected number or null")
    else:
        t2_star = None if math.isinf(raw) else float(raw)
    return MediumSpec(
        mu=_number(m, "mu", "medium"),
        t2_star=t2_star,
        n_detuning=_integer(m, "n_detuning", "medium"),
        alpha_sq=_number(m, "alpha_sq", "medium"),
        beta_sq=_number(m, "beta_sq", "medium"),
        length=grid.z_max,
    )


def build_pulses(doc):
    if "pulses" not in doc:
        raise SchemaError("missing key: pulses")
    raw = doc["pulses"]
    if not isinstance(raw, list) or not raw:
        raise SchemaError("pulses must be a non-empty array")
    pulses = []
    for idx, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise SchemaError(f"wrong type for pulses[{idx}]: expected object")
        path = f"pulses[{idx}]"
        pulses.append(PulseSpec(
            channel=_string(entry, "channel", path),
            shape=_string(entry, "shape", path),
            area=_number(entry, "area", path),
            width=_number(entry, "width", path),
            center=_number(entry, "center", path),
        ))
    return pulses


def build_solver_config(doc) -> SolverConfig:
    s = doc.get("solver", {})
    if not isinstance(s, dict):
        raise SchemaError("wrong type for solver: expected object")
    snapshot_every = _number(s, "snapshot_every", "solver", optional=True)
    return SolverConfig(
        scheme=_string(s, "scheme", "solver", optional=True, default="heun"),
        snapshot_every=snapshot_every,
        stability_policy=_string(s, "stability_policy", "solver",
                                 optional=True, default="warn"),
        num_threads=int(_number(s, "num_threads", "solver", optional=True,
                                default=0)),
    )


def build_soliton_params(doc, medium: MediumSpec):
    """SolitonParams for closed-form runs; kappa derives from the medium."""
    from .analytic import SolitonParams, kappa_average

    s = _section(doc, "soliton")
    tau = _number(s, "tau", "soliton")
    u = _number(s, "u", "soliton")
    kappa = kappa_average(medium.mu, tau, medium.t2_star, medium.n_detuning)
    return SolitonParams(tau=tau, u=u, alpha_sq=medium.alpha_sq,
                         beta_sq=medium.beta_sq, kappa=kappa)


def analytic_z_values(doc, kappa):
    """Depths for closed-form evaluation: absolute or in units of 1/kappa."""
    has_abs = "z_values" in doc
    has_scaled = "kappa_z_values" in doc
    if has_abs == has_scaled:
        raise SchemaError(
            "exactly one of z_values or kappa_z_values is required")
    key = "z_values" if has_abs else "kappa_z_values"
    raw = doc[key]
    if not isinstance(raw, list) or not raw:
        raise SchemaError(f"{key} must be a non-empty array")
    values = []
    for idx, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"wrong type for {key}[{idx}]: expected number")
        values.append(float(v) if has_abs else float(v) / kappa)
    return values


def output_dir(doc, override=None):
    if override is not None:
        return override
    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise SchemaError("wrong type for output: expected object")
    return _string(out, "dir", "output", optional=True, default="out")


def apply_resolution(doc, resolution):
    """Scale the grid by the named resolution; returns a deep-copied document."""
    if resolution not in RESOLUTIONS:
        raise SchemaError(
            f"unknown resolution {resolution!r}, expected one of {RESOLUTIONS}")
    doc = json.loads(json.dumps(doc))
    if resolution == "default":
        return doc
    g = _section(doc, "grid")
    factor = 0.5 if resolution == "low" else 2.0
    g["n_t"] = max(2, int(round(_integer(g, "n_t", "grid") * factor)))
    g["n_z"] = max(1, int(round(_integer(g, "n_z", "grid") * factor)))
    return doc
