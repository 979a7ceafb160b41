"""End-to-end command-line checks, run in-process through cli.main."""

import json
import subprocess
import sys

import pytest

from fneighbors.cli import main

IDENTITY_MAP = json.dumps({"family": "circle_fourier", "m_out": 2,
                           "params": [0.0, 1.0, 0.0, 0.0, 0.0, 1.0]})


def run(*argv):
    return main(list(argv))


def test_neighbors_identity_circle(tmp_path, capsys):
    out = tmp_path / "report.json"
    svg = tmp_path / "plot.svg"
    code = run("neighbors", "--samples", "64", "--map", IDENTITY_MAP,
               "--out", str(out), "--svg", str(svg), "--dump-certs")
    assert code == 0
    assert "D_f = 2" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert doc["df"] == pytest.approx(2.0, abs=1e-12)
    assert doc["n_certificates"] == 1  # all samples concyclic: one tuple
    assert len(doc["certificates"]) == doc["n_certificates"]
    assert doc["config"]["samples"] == 64
    assert doc["tolerances"]["eps_inside_rel"] == 1e-6
    text = svg.read_text()
    assert text.startswith("<svg") and "polyline" in text


def test_repeat_invocation_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run("neighbors", "--samples", "128", "--seed", "7",
                   "--out", str(path)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_sphere_threads_byte_identical(tmp_path):
    a, b = tmp_path / "t1.json", tmp_path / "t8.json"
    assert run("verify-sphere", "--trials", "4", "--samples", "256",
               "--threads", "1", "--out", str(a)) == 0
    assert run("verify-sphere", "--trials", "4", "--samples", "256",
               "--threads", "8", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_sphere_csv_and_margins(tmp_path):
    out, csv_path = tmp_path / "r.json", tmp_path / "r.csv"
    assert run("verify-sphere", "--trials", "3", "--samples", "512",
               "--out", str(out), "--csv", str(csv_path)) == 0
    doc = json.loads(out.read_text())
    assert doc["all_ok"]
    assert doc["result"]["min_margin"] > -0.05
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "trial,df,allowance,margin,n_certificates"
    assert len(lines) == 4


def test_verify_sphere_coincidence_regime(tmp_path):
    out = tmp_path / "bu.json"
    assert run("verify-sphere", "--n", "1", "--m-out", "1", "--trials", "3",
               "--samples", "512", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    for row in doc["result"]["trials"]:
        assert row["rho"] == pytest.approx(2.0, abs=1e-12)


def test_verify_cube(tmp_path):
    out = tmp_path / "vc.json"
    assert run("verify-cube", "--trials", "2", "--samples", "512",
               "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["all_ok"]
    for row in doc["result"]["trials"]:
        assert row["faces"][0].startswith("min-face-")
        assert row["faces"][1].startswith("max-face-")
        assert row["lp_verdict"] == "yes"


def test_witness_identity_sphere(tmp_path):
    out = tmp_path / "w.json"
    code = run("witness", "--domain", "sphere", "--n", "2", "--samples",
               "300", "--map",
               json.dumps({"family": "identity_embed", "m_out": 3,
                           "params": []}),
               "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["ok"]
    assert doc["result"]["radius"] == pytest.approx(1.0, abs=1e-6)
    assert max(abs(v) for v in doc["result"]["point"]) < 1e-6


def test_degree_circle(tmp_path, capsys):
    out = tmp_path / "d.json"
    assert run("degree", "--samples", "512", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["result"]["verdict"] == "non_null_homotopic"
    assert abs(doc["result"]["degree"]) == 1
    assert "verdict = non_null_homotopic" in capsys.readouterr().out


def test_delta_sweep_csv(tmp_path):
    out, csv_path = tmp_path / "h.json", tmp_path / "h.csv"
    assert run("delta-sweep", "--samples", "256", "--bins", "8",
               "--map", IDENTITY_MAP, "--out", str(out),
               "--csv", str(csv_path)) == 0
    doc = json.loads(out.read_text())
    rows = csv_path.read_text().strip().splitlines()[1:]
    assert sum(int(r.split(",")[2]) for r in rows) == doc["result"]["n_pairs"]
    assert doc["result"]["n_pairs"] == 256 * 255 // 2


def test_mu_small_budget(tmp_path):
    out, svg = tmp_path / "m.json", tmp_path / "m.svg"
    assert run("mu", "--samples", "128", "--restarts", "2", "--budget", "60",
               "--probes", "8", "--out", str(out), "--svg", str(svg)) == 0
    doc = json.loads(out.read_text())
    res = doc["result"]
    assert res["lower_bound"] == pytest.approx(3 ** 0.5)
    assert res["best_df"] >= res["lower_bound"] - 0.05
    assert svg.read_text().startswith("<svg")


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": 256, "seed": 3}))
    out = tmp_path / "o.json"
    assert run("neighbors", "--config", str(cfg), "--samples", "128",
               "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["samples"] == 128  # flag beats config file
    assert doc["config"]["seed"] == 3       # config beats default


def test_map_file_equivalent_to_inline(tmp_path):
    map_file = tmp_path / "map.json"
    map_file.write_text(IDENTITY_MAP)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("neighbors", "--samples", "64", "--map", IDENTITY_MAP,
               "--out", str(a)) == 0
    assert run("neighbors", "--samples", "64", "--map", str(map_file),
               "--out", str(b)) == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert da["df"] == db["df"]
    assert da["map"] == db["map"]


def test_usage_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"not_a_flag": 1}))
    assert run("neighbors", "--config", str(bad)) == 2
    assert run("neighbors", "--domain", "cube", "--n", "2",
               "--svg", str(tmp_path / "x.svg")) == 2
    assert run("neighbors", "--map", "{broken json") == 2
    assert run("verify-sphere", "--n", "2", "--m-out", "1") == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fneighbors", "neighbors", "--samples", "64",
         "--map", IDENTITY_MAP],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "D_f = 2" in proc.stdout
