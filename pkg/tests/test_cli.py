import json
import os
import subprocess
import sys

import numpy as np
import pytest

from qsdcluster import Method, SbmParams, generate_plsbm, run_single
from qsdcluster.cli import main


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_rates(capsys):
    code, out, _ = _run(capsys, "rates", "--a", 4, "--b", 1, "--delta", 0.1)
    assert code == 0
    d = json.loads(out)
    assert d["I_vote"] == pytest.approx(0.05)
    assert d["rho"] == pytest.approx(1.169536, abs=1e-6)


def test_unknown_flag(capsys):
    code, _, err = _run(capsys, "rates", "--a", 4, "--b", 1, "--delta", 0.1, "--frobnicate")
    assert code == 1
    assert "usage:" in err


def test_runtime_error(capsys, tmp_path):
    code, _, err = _run(capsys, "run", "--graph", tmp_path / "missing.edges")
    assert code == 2
    assert "missing.edges" in err


def test_bad_parameters_exit_2(capsys, tmp_path):
    code, _, _ = _run(capsys, "gen", "--n", 7, "--a", 4, "--b", 1, "--delta", 0.1, "--out", tmp_path / "g")
    assert code == 2


def test_gen_run_round_trip(capsys, tmp_path):
    path = tmp_path / "g.edges"
    code, _, _ = _run(capsys, "gen", "--n", 100, "--a", 8, "--b", 2, "--delta", 0.1, "--seed", 5, "--out", path)
    assert code == 0
    code, out, _ = _run(capsys, "run", "--graph", path, "--a", 8, "--b", 2, "--delta", 0.1)
    assert code == 0
    d = json.loads(out)
    params = SbmParams(100, 8, 2, 0.1)
    expect = run_single(generate_plsbm(params, 5), tuple(Method), params)
    got = {p["method"]: p for p in d["predictions"]}
    assert set(got) == {m.value for m in Method}
    for m, pred in expect.items():
        assert got[m.value]["assignments"] == pred.to_json()["assignments"]
        assert got[m.value]["recovery_rate"] == pytest.approx(pred.recovery_rate)


def test_run_without_params_skips_mixed(capsys, tmp_path):
    path = tmp_path / "g.edges"
    _run(capsys, "gen", "--n", 60, "--a", 8, "--b", 2, "--delta", 0.2, "--out", path)
    code, out, _ = _run(capsys, "run", "--graph", path)
    assert code == 0
    assert [p["method"] for p in json.loads(out)["predictions"]] == ["qsd", "vote", "spectral"]


def test_run_external_sampling(capsys, tmp_path):
    (tmp_path / "g").write_text("0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n")
    (tmp_path / "l").write_text("+1\n+1\n+1\n-1\n-1\n-1\n")
    code, out, _ = _run(capsys, "run", "--graph", tmp_path / "g", "--labels", tmp_path / "l",
                        "--reveal", 0.34, "--seed", 1, "--methods", "vote")
    assert code == 0
    assert json.loads(out)["predictions"][0]["recovery_rate"] == 1.0


def test_bench_shape(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, text, _ = _run(capsys, "bench", "--n", 300, "--a", 4, "--b", 1, "--delta", 0.1,
                         "--regime", "connected", "--trials", 4, "--seed", 7, "--out", out)
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[1] == "trial,method,recovery_rate,error_rate,giant_component_size,seconds"
    assert len(rows) == 2 + 4 * 3
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["config"]["base_seed"] == 7
    assert "qsd" in text


def test_bench_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"params": {"n": 200, "a": 6, "b": 1, "delta": 0.1}, "trials": 2, "methods": ["vote"]}))
    code, _, _ = _run(capsys, "bench", "--config", cfg, "--out", tmp_path / "o.csv", "--trials", 3)
    assert code == 0
    assert len((tmp_path / "o.csv").read_text().splitlines()) == 2 + 3


def test_bench_needs_params(capsys):
    code, _, _ = _run(capsys, "bench", "--n", 100)
    assert code == 1


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_backend_flag(backend):
    env = dict(os.environ, QSD_BACKEND=backend)
    code = ("import qsdcluster as q, json;"
            "g=q.generate_plsbm(q.SbmParams(300,6,1,0.1),2);"
            "r=q.run_single(g,('qsd','vote','spectral'));"
            "print(json.dumps([q.BACKEND]+[p.to_json() for p in r.values()]))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    d = json.loads(out)
    assert d[0] == backend
    ref = subprocess.run([sys.executable, "-c", code], env=dict(os.environ, QSD_BACKEND="numpy"),
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(ref)[1:] == d[1:]


def test_bad_backend():
    env = dict(os.environ, QSD_BACKEND="fortran")
    r = subprocess.run([sys.executable, "-c", "import qsdcluster"], env=env, capture_output=True, text=True)
    assert r.returncode != 0
    assert "QSD_BACKEND" in r.stderr
