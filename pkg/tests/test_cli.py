import json
import re

import numpy as np
import pytest

from specshape.cli import main
from specshape.outputs import parse_config_text, resolve_config


def test_config_parsing():
    raw = parse_config_text("# comment\nk = 3\n\nmode = constrained  # trailing\n")
    assert raw == {"k": "3", "mode": "constrained"}
    cfg = resolve_config(raw)
    assert cfg.k == 3 and cfg.mode == "constrained"
    with pytest.raises(KeyError):
        resolve_config({"bogus": "1"})
    with pytest.raises(ValueError):
        parse_config_text("no equals sign")
    with pytest.raises(ValueError):
        resolve_config({"eps_opt": "nan"})


def test_invalid_config_exit_codes(tmp_path):
    assert main(["optimize", "--k", "0", "--out", str(tmp_path)]) == 2
    assert main(["spectrum", "--set", "foo=1", "--out", str(tmp_path)]) == 2
    assert main(["spectrum", "--set", "n_r", "--out", str(tmp_path)]) == 2
    assert main(["cost-curve", "--k-max", "1", "--out", str(tmp_path)]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)]) == 2


def test_spectrum_verb(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_r = 20\nn_theta = 40\n")
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path), "--count", "4", "--mesh-dump"]) == 0
    rows = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert rows[0] == "index,lambda" and len(rows) == 5
    assert float(rows[1].split(",")[1]) == pytest.approx(5.783, rel=2e-2)
    manifest = (tmp_path / "manifest.txt").read_text()
    assert "verb = spectrum" in manifest and "n_r = 20" in manifest and "seed = 0" in manifest
    assert (tmp_path / "mesh.txt").exists()


def _strip_stamp(text):
    return "\n".join(l for l in text.splitlines() if '"timestamp"' not in l)


def test_optimize_and_certify(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    args = ["optimize", "--k", "1", "--set", "restarts=1"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    r1 = (out1 / "result.json").read_text()
    assert _strip_stamp(r1) == _strip_stamp((out2 / "result.json").read_text())
    assert len([l for l in r1.splitlines() if "timestamp" in l]) == 1
    data = json.loads(r1)
    for key in ("k", "mode", "objective", "perimeter", "lambda", "cluster", "mu", "residual_rel",
                "gap_ok", "boundary", "iterations", "converged"):
        assert key in data
    assert data["objective"] == pytest.approx(11.5514, rel=2e-2)
    assert data["converged"] and data["gap_ok"] and data["cluster"] == [1, 1]
    cert = json.loads((out1 / "certificate.json").read_text())
    assert set(cert) == {"mu", "residual_rel", "basis_rotation", "cluster"}
    svg = (out1 / "shape.svg").read_text()
    assert 'viewBox="0 0 1000 1000"' in svg and svg.count("<polyline") == 1
    pts = re.search(r'points="([^"]+)"', svg).group(1).split()
    xy = np.array([[float(v) for v in p.split(",")] for p in pts])
    assert len(xy) == 513
    assert np.max(np.hypot(xy[:, 0] - 500, xy[:, 1] - 500)) == pytest.approx(450, abs=1e-3)

    cdir = tmp_path / "c"
    assert main(["certify", "--k", "1", "--input", str(out1 / "result.json"), "--out", str(cdir)]) == 0
    again = json.loads((cdir / "certificate.json").read_text())
    assert again["residual_rel"] == pytest.approx(cert["residual_rel"], rel=1e-6)
    # the unit disk is not optimal for lambda_1 + Per
    assert main(["certify", "--k", "1", "--out", str(tmp_path / "d")]) == 3


def test_non_convergence_exit(tmp_path):
    code = main(["optimize", "--k", "2", "--set", "max_iters=2", "--set", "restarts=1",
                 "--set", "n_r=16", "--set", "n_theta=32", "--out", str(tmp_path)])
    assert code == 3
    data = json.loads((tmp_path / "result.json").read_text())
    assert not data["converged"] and "MaxIterations" in data["flags"]


def test_cluster_demo_and_validate(tmp_path):
    assert main(["cluster-demo", "--set", "n_r=30", "--set", "n_theta=60", "--out", str(tmp_path)]) == 0
    demo = json.loads((tmp_path / "cluster_demo.json").read_text())
    assert demo["cluster"] == [2, 3] and demo["fd_slopes"][0] < 0 < demo["fd_slopes"][1]
    assert main(["validate", "--quick", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "validate.txt").read_text().splitlines()
    assert all(len(l.split()) == 5 and l.split()[1] == "PASS" for l in lines)


def test_cost_curve_verb(tmp_path):
    code = main(["cost-curve", "--k-max", "2", "--set", "restarts=1", "--set", "n_r=16",
                 "--set", "n_theta=32", "--out", str(tmp_path)])
    rows = (tmp_path / "cost_curve.csv").read_text().splitlines()
    assert rows[0] == "k,restart,objective,converged,flags" and len(rows) == 3
    assert code in (0, 3)
    assert "k_max = 2" in (tmp_path / "manifest.txt").read_text()
