import hashlib
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from lemniprint import io
from lemniprint.blaschke import BlaschkeProduct, circle_grid, diffeo_from_function, identity_diffeo
from lemniprint.cli import main
from lemniprint.polynomial import ComplexPolynomial


def write_poly(path, coeffs):
    io.write_polynomial(path, ComplexPolynomial(coeffs))
    return str(path)


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_proper_reports(tmp_path, capsys):
    assert main(["proper", "--poly", write_poly(tmp_path / "p.json", [0, 0, 0.5])]) == 0
    out = capsys.readouterr().out
    assert "margin 1.0" in out
    assert main(["proper", "--poly", write_poly(tmp_path / "q.json", [1.5, 0, 0.5])]) == 1
    assert "critical value modulus 1.5" in capsys.readouterr().out


def test_malformed_input_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["proper", "--poly", str(bad)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:") and err.count("\n") == 1
    assert main(["proper", "--poly", str(tmp_path / "missing.json")]) == 2
    bad.write_text(json.dumps({"degree": 3, "coeffs": [[0, 0], [1, 0]]}))
    assert main(["proper", "--poly", str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_trace_circle_svg(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert main(["trace", "--poly", write_poly(tmp_path / "p.json", [0, 0, 0.5]), "--out", str(out), "--grid", "256"]) == 0
    pts = io.read_curve_points(out)
    assert np.allclose(np.abs(pts), np.sqrt(2), atol=1e-12)
    svg = (tmp_path / "c.svg").read_text()
    assert svg.count("<polyline") == 1
    coords = re.search(r'points="([^"]+)"', svg).group(1).split()
    # closed: the last vertex repeats the first, and everything sits in the unit square
    assert coords[0] == coords[-1]
    xy = np.array([[float(v) for v in c.split(",")] for c in coords])
    assert xy.min() >= 0 and xy.max() <= 1


def test_identity_diffeo_plot_on_diagonal(tmp_path):
    files = io.emit_plot(identity_diffeo(64), tmp_path / "id.csv")
    svg = files[1].read_text()
    lines = re.findall(r'points="([^"]+)"', svg)
    graph = np.array([[float(v) for v in c.split(",")] for c in lines[1].split()])
    assert np.allclose(graph[:, 0] + graph[:, 1], 1, atol=1e-6)


def test_file_round_trips(tmp_path, rng):
    p = ComplexPolynomial(rng.normal(size=5) + 1j * rng.normal(size=5))
    io.write_polynomial(tmp_path / "p.json", p)
    assert np.array_equal(io.read_polynomial(tmp_path / "p.json").coeffs, p.coeffs)
    B = BlaschkeProduct(np.exp(0.37j), rng.uniform(-0.5, 0.5, 3) + 1j * rng.uniform(-0.5, 0.5, 3))
    io.write_blaschke(tmp_path / "b.json", B)
    C = io.read_blaschke(tmp_path / "b.json")
    assert C.lam == B.lam and np.array_equal(C.zeros, B.zeros)
    k = diffeo_from_function(lambda t: t + 0.2 * np.sin(t), lambda t: 1 + 0.2 * np.cos(t), 128)
    io.write_diffeo(tmp_path / "k.csv", k)
    k2 = io.read_diffeo(tmp_path / "k.csv")
    assert np.array_equal(k2.lift, k.lift) and np.array_equal(k2.derivative, k.derivative)
    z = np.exp(1j * circle_grid(50)) * (1 + 1e-3 * rng.normal(size=50))
    io.write_curve(tmp_path / "c.csv", z)
    assert np.array_equal(io.read_curve_points(tmp_path / "c.csv"), z)


def test_fingerprint_and_hausdorff(tmp_path, capsys):
    poly = write_poly(tmp_path / "p.json", [0, -1, 0, 1 / 3])
    fp = tmp_path / "fp.csv"
    assert main(["fingerprint", "--poly", poly, "--out", str(fp)]) == 0
    k = io.read_diffeo(fp)
    B = io.read_blaschke(tmp_path / "fp.json")
    assert B.degree == 3 and k.grid_size >= 192
    meta = io.read_json(tmp_path / "fp.json")["normalization"]
    assert meta["crosscheck_error"] <= 1e-6
    capsys.readouterr()
    c = tmp_path / "c.csv"
    assert main(["trace", "--poly", poly, "--out", str(c)]) == 0
    capsys.readouterr()
    assert main(["hausdorff", str(c), str(c)]) == 0
    assert float(capsys.readouterr().out) == 0.0


def test_approx_command(tmp_path, capsys):
    k = diffeo_from_function(lambda t: t + 0.3 * np.sin(t), lambda t: 1 + 0.3 * np.cos(t), 256)
    io.write_diffeo(tmp_path / "k.csv", k)
    io.write_json(tmp_path / "cfg.json", {"n": 8, "R": 0.9, "N": 16})
    out = tmp_path / "b.json"
    assert main(["approx", "--diffeo", str(tmp_path / "k.csv"), "--config", str(tmp_path / "cfg.json"), "--out", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"c1_error", "sup_lift_error", "sup_derivative_error"}
    assert io.read_blaschke(out).degree == 8
    assert io.read_json(tmp_path / "b.errors.json") == report
    assert main(["approx", "--diffeo", str(tmp_path / "k.csv"), "--out", str(out)]) == 2


def test_reconstruct_power(tmp_path):
    io.write_blaschke(tmp_path / "b.json", BlaschkeProduct(1.0, [0.0, 0.0]))
    out = tmp_path / "p.json"
    assert main(["reconstruct", "--blaschke", str(tmp_path / "b.json"), "--out", str(out)]) == 0
    p = io.read_polynomial(out)
    assert p.max_coeff_error(ComplexPolynomial([0, 0, 0.5])) < 1e-8
    report = io.read_json(tmp_path / "p.report.json")
    assert report["psi_expected"] == 2 and len(report["candidates"]) == 1


def test_count_command(tmp_path, capsys):
    io.write_json(tmp_path / "w.json", {"values": [[0.5, 0], [0, 0.4]]})
    assert main(["count", "--values", str(tmp_path / "w.json")]) == 0
    res = json.loads(capsys.readouterr().out)
    assert (res["polynomial_count"], res["class_count"]) == (3, 1)
    assert main(["--seed", "3", "count", "--n", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["class_count"] == 1
    io.write_json(tmp_path / "w.json", {"values": [[1.5, 0]]})
    assert main(["count", "--values", str(tmp_path / "w.json")]) == 2


def test_outputs_are_deterministic(tmp_path):
    poly = write_poly(tmp_path / "p.json", [0.1, -1, 0, 1 / 3])
    hashes = []
    for run in range(2):
        d = tmp_path / f"run{run}"
        d.mkdir()
        assert main(["fingerprint", "--poly", poly, "--out", str(d / "fp.csv")]) == 0
        assert main(["--seed", "7", "count", "--n", "3"]) == 0
        hashes.append([digest(d / name) for name in ("fp.csv", "fp.svg", "fp.json")])
    assert hashes[0] == hashes[1]


def test_module_entry_point(tmp_path):
    poly = write_poly(tmp_path / "p.json", [0, 0, 0.5])
    res = subprocess.run(
        [sys.executable, "-m", "lemniprint", "proper", "--poly", poly],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and "margin 1.0" in res.stdout
