import json
import math

import numpy as np
import pytest

from matelab import io
from matelab.cli import main


def _run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def test_csv_format(tmp_path):
    p = io.write_csv(tmp_path / "a.csv", ["t", "value"], [(0.1, 1 / 3), (2, True)])
    raw = p.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().splitlines() == ["t,value", "0.10000000000000001,0.33333333333333331", "2,1"]
    assert float(io.read_csv(p)[1][0][1]) == 1 / 3


def test_pgm_round_trip(tmp_path):
    v = np.arange(12.0).reshape(3, 4)
    img = io.read_pgm(io.write_pgm(tmp_path / "a.pgm", v))
    assert img.shape == (3, 4) and img.min() == 0 and img.max() == 65535


def test_exponents_cut_point_row(tmp_path):
    assert _run(tmp_path, "exponents", "--gamma2", "8/3", "--n-max", "3") == 0
    hdr, rows = io.read_csv(tmp_path / "exponents.csv")
    assert hdr == ["name", "locus", "n", "rho", "Delta", "Delta_dual", "x", "dim"]
    cut = [r for r in rows if r[0] == "cut_points"][0]
    assert float(cut[-1]) == pytest.approx(0.75, abs=1e-12)
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["params"]["gamma2"] == pytest.approx(8 / 3) and "exponents.csv" in m["files"]


def test_fk_json(tmp_path):
    assert _run(tmp_path, "fk", "--q", "1") == 0
    d = json.loads((tmp_path / "fk.json").read_text())
    assert d["kappa_prime"] == pytest.approx(6) and d["p"] == pytest.approx(1 / 3)
    assert d["var_ratio"] == pytest.approx(1 / 3)


@pytest.mark.parametrize("cmd", [
    ["bm", "--n", "100"], ["bm", "--n", "100", "--kappa-prime", "6"],
    ["bessel", "--n", "100", "--delta", "1"], ["stable", "--n", "200"],
    ["sle-driving", "--n", "100"], ["mate", "--n", "50"], ["gff", "--n", "32"],
    ["measure", "--n", "32"], ["surface", "--horizon", "1"], ["levy", "--horizon", "0.01"],
    ["dual-measure", "--n", "32"],
])
def test_commands_deterministic(tmp_path, cmd):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(cmd + ["--seed", "5", "--out", str(a)]) == 0
    assert main(cmd + ["--seed", "5", "--out", str(b)]) == 0
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["files"] == mb["files"] and ma["created"]


def test_replica_files_and_env_seed(tmp_path, monkeypatch):
    assert main(["bm", "--n", "10", "--streams", "2", "--out", str(tmp_path / "r")]) == 0
    assert (tmp_path / "r" / "series_r0.csv").is_file() and (tmp_path / "r" / "series_r1.csv").is_file()
    monkeypatch.setenv("MATELAB_SEED", "11")
    assert main(["bm", "--n", "10", "--out", str(tmp_path / "e")]) == 0
    assert json.loads((tmp_path / "e" / "manifest.json").read_text())["seed"] == 11


def test_manifest_round_trip(tmp_path):
    assert main(["bm", "--n", "50", "--seed", "3", "--out", str(tmp_path / "a")]) == 0
    assert main(["bm", "--config", str(tmp_path / "a" / "manifest.json"),
                 "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "series.csv").read_bytes() == (tmp_path / "b" / "series.csv").read_bytes()
    assert main(["bm", "--config", str(tmp_path / "a" / "config.txt"),
                 "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "a" / "series.csv").read_bytes() == (tmp_path / "c" / "series.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ["bm", "--bogus", "1"], ["bm", "--n", "abc"], ["fk", "--q", "5"], ["verify", "nosuch"],
    ["bessel", "--delta", "3", "--zero-policy", "reflect"], ["nosuchcommand"], [],
    ["bm", "--config", "/nonexistent/file.txt"], ["bm", "--kappa-prime", "3"],
])
def test_exit_two(tmp_path, argv, capsys):
    assert main(argv + (["--out", str(tmp_path)] if argv and argv[0] != "nosuchcommand" else [])) == 2
    err = capsys.readouterr().err.strip()
    assert err and len(err.splitlines()) == 1


def test_verify_and_report(tmp_path, capsys):
    assert main(["verify", "algebra", "--out", str(tmp_path / "alg")]) == 0
    assert main(["verify", "duality", "--out", str(tmp_path / "dual")]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["report", str(tmp_path)]) == 0
    merged = json.loads((tmp_path / "consolidated.json").read_text())
    assert merged["pass"] and [s["suite"] for s in merged["suites"]] == ["algebra", "duality"]


def test_report_mixed_and_empty(tmp_path, capsys):
    assert main(["verify", "algebra", "--out", str(tmp_path / "alg")]) == 0
    rep = json.loads((tmp_path / "alg" / "report.json").read_text())
    rep["suite"] = "broken"
    rep["pass"] = False
    rep["checks"][0]["passed"] = False
    bad = tmp_path / "bad"
    bad.mkdir()
    (bad / "report.json").write_text(json.dumps(rep))
    (bad / "manifest.json").write_text("{}")
    assert main(["report", str(tmp_path)]) == 1
    assert "failing: broken:" in capsys.readouterr().out
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["report", str(empty)]) == 2
