"""Writers for run artifacts: result/certificate JSON, shape SVG, config files."""
from __future__ import annotations

import json
import math
from dataclasses import fields as dc_fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .geometry import FourierBoundary, uniform_thetas
from .optimality import Certificate
from .optimizer import RunConfig, RunResult

__all__ = [
    "result_dict",
    "write_result_json",
    "read_boundary_json",
    "write_certificate_json",
    "write_shape_svg",
    "parse_config_text",
    "read_config",
    "resolve_config",
    "write_manifest",
    "write_log_csv",
]

SVG_SIZE = 1000
SVG_RADIUS = 450.0
SVG_SAMPLES = 512


def _floats(x):
    return [float(v) for v in np.ravel(x)]


def result_dict(res: RunResult) -> dict:
    b = res.boundary
    return {
        "k": res.config.k,
        "mode": res.config.mode,
        "objective": float(res.objective),
        "perimeter": float(res.perimeter),
        "lambda": _floats(res.lambdas),
        "cluster": [res.cluster.lo, res.cluster.hi],
        "mu": _floats(res.certificate.mu),
        "residual_rel": float(res.certificate.residual_rel),
        "gap_ok": bool(res.gap.gap_ok),
        "boundary": {"a0": float(b.a0), "a": _floats(b.a), "b": _floats(b.b)},
        "iterations": int(res.iterations),
        "converged": bool(res.converged),
        "stationarity": float(res.stationarity),
        "flags": list(res.flags),
    }


def _dump(data: dict, path, timestamp: bool) -> None:
    # one key per line; the timestamp gets a line of its own so reruns can be
    # compared after dropping that single line
    body = json.dumps(data, indent=1, sort_keys=False, allow_nan=True)
    if timestamp:
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        body = body[:-2] + f',\n "timestamp": "{stamp}"\n}}'
    Path(path).write_text(body + "\n", encoding="utf-8", newline="\n")


def write_result_json(res: RunResult, path, timestamp: bool = True) -> None:
    _dump(result_dict(res), path, timestamp)


def read_boundary_json(path) -> FourierBoundary:
    """Boundary stored in a ``result.json`` (or a bare ``{"a0", "a", "b"}`` object)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    b = data.get("boundary", data)
    return FourierBoundary(float(b["a0"]), np.array(b["a"], dtype=float), np.array(b["b"], dtype=float))


def write_certificate_json(cert: Certificate, cluster, path) -> None:
    data = {
        "mu": _floats(cert.mu),
        "residual_rel": float(cert.residual_rel),
        "basis_rotation": [_floats(row) for row in cert.basis_rotation],
        "cluster": [int(cluster.lo), int(cluster.hi)],
    }
    _dump(data, path, timestamp=False)


def write_shape_svg(boundary: FourierBoundary, path, samples: int = SVG_SAMPLES) -> None:
    """Single closed polyline, centred, largest radius scaled to 450 units."""
    th = uniform_thetas(samples)
    r = boundary.radius(th)
    s = SVG_RADIUS / float(r.max())
    c = SVG_SIZE / 2.0
    x = c + s * r * np.cos(th)
    y = c - s * r * np.sin(th)
    pts = " ".join(f"{xi:.4f},{yi:.4f}" for xi, yi in zip(x, y))
    pts += f" {x[0]:.4f},{y[0]:.4f}"
    svg = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" '
           f'width="{SVG_SIZE}" height="{SVG_SIZE}">\n'
           f'<polyline fill="none" stroke="black" stroke-width="2" points="{pts}"/>\n</svg>\n')
    Path(path).write_text(svg, encoding="utf-8", newline="\n")


def parse_config_text(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; blank lines ignored."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ValueError(f"line {n}: empty key")
        out[key] = value
    return out


def read_config(path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def _convert(name: str, kind, text: str):
    if kind is int or kind == "int":
        return int(text)
    if kind is float or kind == "float":
        value = float(text)
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite")
        return value
    return text


def resolve_config(raw: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    """Apply string overrides to ``base``; unknown keys raise ``KeyError``."""
    base = RunConfig() if base is None else base
    types = {f.name: f.type for f in dc_fields(RunConfig)}
    values = {f.name: getattr(base, f.name) for f in dc_fields(RunConfig)}
    for key, text in raw.items():
        if key not in types:
            raise KeyError(f"unknown config key {key!r}")
        values[key] = _convert(key, types[key], text)
    return RunConfig(**values).validate()


def write_manifest(path, verb: str, config: RunConfig | None, extra: dict | None = None) -> None:
    lines = [f"verb = {verb}"]
    if config is not None:
        for f in dc_fields(RunConfig):
            lines.append(f"{f.name} = {getattr(config, f.name)!r}".replace("'", ""))
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_log_csv(res: RunResult, path) -> None:
    rows = ["iter,objective,stationarity,step,cluster_lo,cluster_hi"]
    for e in res.log:
        rows.append(f"{e['iter']},{float(e['objective'])!r},{float(e['stationarity'])!r},"
                    f"{float(e.get('step', 0.0))!r},{e['cluster'][0]},{e['cluster'][1]}")
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
