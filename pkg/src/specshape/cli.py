"""Command-line entry point.

Verbs: ``optimize``, ``certify``, ``spectrum``, ``cluster-demo``,
``validate`` and ``cost-curve``. Every verb writes ``manifest.txt`` with the
fully resolved configuration into the output directory.

Exit codes: 0 success, 1 failed validation checks, 2 invalid configuration,
3 non-convergence (results are still written).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .analysis import analyze, certify
from .cluster import signature_field
from .eigensolver import solve_spectrum, write_spectrum_csv
from .errors import SpecShapeError
from .geometry import FourierBoundary, PerturbedBoundary
from .mesh import build_mesh, write_mesh
from .optimizer import RunConfig, cost_curve, default_init, minimize
from .outputs import (read_boundary_json, read_config, resolve_config, write_certificate_json,
                      write_log_csv, write_manifest, write_result_json, write_shape_svg)
from .validation import run_validation, write_report

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_NOCONV = 0, 1, 2, 3
VERBS = ("optimize", "certify", "spectrum", "cluster-demo", "validate", "cost-curve")

log = logging.getLogger("specshape")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specshape", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--config", help="file of 'key = value' lines")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--k", type=int, help="shortcut for --set k=K")
    p.add_argument("--k-max", type=int, default=3, help="largest k for cost-curve")
    p.add_argument("--input", help="result.json holding a boundary (certify, spectrum)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--count", type=int, default=10, help="eigenvalues for spectrum")
    p.add_argument("--mesh-dump", action="store_true", help="also write mesh.txt (spectrum)")
    p.add_argument("--quick", action="store_true", help="coarser FD audits in validate")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _config(args) -> RunConfig:
    raw = read_config(args.config) if args.config else {}
    for item in args.set:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        raw[key.strip()] = value.strip()
    if args.k is not None:
        raw["k"] = str(args.k)
    return resolve_config(raw)


def _boundary(args, cfg: RunConfig) -> FourierBoundary:
    if args.input:
        return read_boundary_json(args.input)
    return FourierBoundary.circle(1.0, cfg.fourier_order)


def _best(runs):
    good = [r for r in runs if r.converged]
    return min(good or runs, key=lambda r: r.objective)


def _optimize(args, cfg, out: Path) -> int:
    runs = [minimize(cfg, default_init(cfg.k, r, cfg.seed, cfg.fourier_order)) for r in range(cfg.restarts)]
    best = _best(runs)
    write_result_json(best, out / "result.json")
    write_certificate_json(best.certificate, best.cluster, out / "certificate.json")
    write_spectrum_csv(best.lambdas, out / "spectrum.csv")
    write_shape_svg(best.boundary, out / "shape.svg")
    write_log_csv(best, out / "log.csv")
    print(f"k={cfg.k} objective={best.objective:.6f} converged={best.converged} flags={best.flags}")
    return EXIT_OK if best.converged else EXIT_NOCONV


def _certify(args, cfg, out: Path) -> int:
    st = analyze(_boundary(args, cfg), cfg.k, cfg.n_r, cfg.n_theta, M=cfg.n_samples, tau=cfg.tau_cluster)
    cert, gap = certify(st, cfg.mode, cfg.tau_cluster)
    write_certificate_json(cert, st.cluster, out / "certificate.json")
    print(f"cluster=({st.cluster.lo},{st.cluster.hi}) mu={np.round(cert.mu, 6).tolist()} "
          f"residual_rel={cert.residual_rel:.3e} gap_ok={gap.gap_ok}")
    return EXIT_OK if cert.residual_rel < cfg.eps_cert and gap.gap_ok else EXIT_NOCONV


def _spectrum(args, cfg, out: Path) -> int:
    mesh = build_mesh(_boundary(args, cfg), cfg.n_r, cfg.n_theta)
    spec = solve_spectrum(mesh, args.count)
    write_spectrum_csv(spec.values, out / "spectrum.csv")
    if args.mesh_dump:
        write_mesh(mesh, out / "mesh.txt")
    print(" ".join(f"{v:.6f}" for v in spec.values))
    return EXIT_OK


def _cluster_demo(args, cfg, out: Path) -> int:
    """Split the unit-disk lambda_2 = lambda_3 pair with a signature field."""
    disk = FourierBoundary.circle(1.0, cfg.fourier_order)
    st = analyze(disk, 2, cfg.n_r, cfg.n_theta, M=cfg.n_samples, tau=cfg.tau_cluster)
    sig = signature_field(st.cluster_traces(), st.fields, ell=1)
    eps = 1e-4
    idx = st.cluster.indices
    moved = PerturbedBoundary(disk, sig, eps).check()
    lam_eps = solve_spectrum(build_mesh(moved, cfg.n_r, cfg.n_theta), 6).values[idx]
    slopes = (lam_eps - st.spectrum.values[idx]) / eps
    data = {
        "cluster": [st.cluster.lo, st.cluster.hi],
        "delta": float(sig.delta),
        "centers": [float(c) for c in sig.centers],
        "magnitudes": [float(m) for m in sig.magnitudes],
        "cluster_eigs": [float(v) for v in sig.cluster_eigs],
        "per_rate": float(sig.per_rate),
        "field_norm": float(sig.field_norm),
        "fd_slopes": [float(v) for v in slopes],
    }
    (out / "cluster_demo.json").write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")
    print(f"A_V eigenvalues {np.round(sig.cluster_eigs, 4).tolist()}, FD slopes {np.round(slopes, 4).tolist()}")
    return EXIT_OK if slopes[0] < 0 < slopes[1] else EXIT_CHECKS


def _validate(args, cfg, out: Path) -> int:
    lines = run_validation(quick=args.quick)
    write_report(lines, out / "validate.txt")
    for line in lines:
        print(line.format())
    return EXIT_OK if all(line.passed for line in lines) else EXIT_CHECKS


def _cost_curve(args, cfg, out: Path) -> int:
    curve = cost_curve(args.k_max, cfg)
    rows = ["k,restart,objective,converged,flags"]
    for entry in curve:
        for r, run in enumerate(entry["runs"]):
            rows.append(f"{entry['k']},{r},{run.objective!r},{int(run.converged)},{'|'.join(run.flags)}")
    (out / "cost_curve.csv").write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    costs = [entry["cost"] for entry in curve]
    print("costs:", ", ".join("n/a" if c is None else f"{c:.6f}" for c in costs))
    return EXIT_OK if all(c is not None for c in costs) else EXIT_NOCONV


_HANDLERS = {
    "optimize": _optimize,
    "certify": _certify,
    "spectrum": _spectrum,
    "cluster-demo": _cluster_demo,
    "validate": _validate,
    "cost-curve": _cost_curve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if args.verb == "cost-curve" and args.k_max < 2:
            raise ValueError("--k-max must be at least 2")
    except (ValueError, KeyError, OSError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    extra = {"k_max": args.k_max} if args.verb == "cost-curve" else None
    write_manifest(out / "manifest.txt", args.verb, cfg, extra)
    try:
        return _HANDLERS[args.verb](args, cfg, out)
    except SpecShapeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
