import json
import os
import subprocess
import sys

import numpy as np
import pytest

from jstomo import cli
from jstomo.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def last_json(out):
    return json.loads(out.strip().splitlines()[-1])


@pytest.fixture
def half_state(tmp_path, capsys):
    code, out, _ = run(capsys, "state", "paper", "--j", "1/2", "--out", tmp_path)
    assert code == EXIT_OK
    return last_json(out)["file"]


def test_state_paper_and_embed(tmp_path, capsys):
    code, out, _ = run(capsys, "state", "paper", "--j", "1", "--out", tmp_path)
    info = last_json(out)
    assert code == EXIT_OK and info["basis"] == "spin" and info["dim"] == 3
    assert info["trace"] == pytest.approx(1.0) and info["purity"] == pytest.approx(1.0)
    code, out, _ = run(capsys, "state", "file", "--in", info["file"], "--embed", "--cutoff", "4",
                       "-o", tmp_path / "emb.json")
    emb = last_json(out)
    assert code == EXIT_OK and emb["basis"] == "fock2" and emb["dim"] == 25


def test_state_random_is_seeded(tmp_path, capsys):
    a = last_json(run(capsys, "state", "random", "--j", "3/2", "--seed", 4, "-o", tmp_path / "a.json")[1])
    b = last_json(run(capsys, "state", "random", "--j", "3/2", "--seed", 4, "-o", tmp_path / "b.json")[1])
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()
    assert a["purity"] == pytest.approx(1.0)


def test_tomogram_and_transform_spin_to_symplectic(tmp_path, capsys, half_state):
    code, out, _ = run(capsys, "tomogram", "spin", "--in", half_state, "--out", tmp_path)
    assert code == EXIT_OK
    tomo = last_json(out)["file"]
    code, out, _ = run(capsys, "transform", "spin-to-symplectic", "--in", tomo, "--x", "-3:3:0.5",
                       "--mu", "1,1", "--nu", "1,1", "--out", tmp_path)
    assert code == EXIT_OK
    res = json.loads(open(last_json(out)["file"]).read())
    assert res["meta"]["provenance"]["direction"] == "spin-to-symplectic"
    assert res["meta"]["provenance"]["quadrature"]["exact"] is True


def test_transform_matches_library(tmp_path, capsys, half_state):
    from jstomo.hilbert import make_paper_state
    from jstomo.tomography import spin_tomogram
    from jstomo.transforms import spin_to_wigner

    tomo = last_json(run(capsys, "tomogram", "spin", "--in", half_state, "--out", tmp_path)[1])["file"]
    code, out, _ = run(capsys, "transform", "spin-to-wigner", "--in", tomo, "--alpha", "0.3-0.2i,0.1i",
                       "--out", tmp_path)
    assert code == EXIT_OK
    from jstomo.tomography import WignerGrid

    got = WignerGrid.from_json(json.loads(open(last_json(out)["file"]).read())).values
    want = spin_to_wigner(spin_tomogram(make_paper_state("j_half").density()), [[0.3 - 0.2j, 0.1j]]).values
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_tomogram_csv(tmp_path, capsys):
    f = last_json(run(capsys, "state", "fock", "--n", 1, "--cutoff", 6, "--out", tmp_path)[1])["file"]
    code, out, _ = run(capsys, "tomogram", "symplectic", "--in", f, "--x", "-2:2:0.5", "--mu", "1", "--nu", "0",
                       "--csv", "--out", tmp_path)
    assert code == EXIT_OK
    csv = (tmp_path / "tomogram_symplectic.csv").read_text().splitlines()
    assert len(csv) == 1 + 9


def test_usage_errors_exit_2(tmp_path, capsys, half_state):
    assert run(capsys, "state", "paper", "--j", "7", "--out", tmp_path)[0] == EXIT_USAGE
    assert run(capsys, "tomogram", "symplectic", "--in", half_state, "--out", tmp_path)[0] == EXIT_USAGE
    assert run(capsys, "tomogram", "spin", "--in", tmp_path / "missing.json", "--out", tmp_path)[0] == EXIT_USAGE
    tomo = last_json(run(capsys, "tomogram", "spin", "--in", half_state, "--out", tmp_path)[1])["file"]
    code, _, err = run(capsys, "transform", "wigner-to-spin", "--in", tomo, "--j", "1/2", "--out", tmp_path)
    assert code == EXIT_USAGE and "error" in err
    assert run(capsys, "transform", "photon-to-spin", "--in", tomo, "--s", "1.5", "--j", "1/2")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["transform", "spin-to-qubit", "--in", tomo])
    assert exc.value.code == 2


def test_numeric_failure_exit_3(tmp_path, capsys):
    # vacuum has no j = 1/2 sector
    emb = np.zeros((25, 25))
    emb[0, 0] = 1
    from jstomo.hilbert import DensityMatrix

    p = tmp_path / "vac2.json"
    p.write_text(json.dumps(DensityMatrix.fock2(4, emb).to_json()))
    code, out, _ = run(capsys, "tomogram", "wigner", "--in", p, "--plane", "2.75:0.25", "--out", tmp_path)
    assert code == EXIT_OK
    code, _, err = run(capsys, "transform", "wigner-to-spin", "--in", last_json(out)["file"], "--j", "1/2",
                       "--out", tmp_path)
    assert code == EXIT_NUMERIC and "EmptySectorError" in err


def test_verify_kernels_small(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--only", "kernels", "--draws", 2, "--out", tmp_path)
    assert code == EXIT_OK
    lines = (tmp_path / "verify_report.jsonl").read_text().splitlines()
    assert len(lines) == 7
    assert all(json.loads(l)["passed"] for l in lines)
    assert "\033[" not in out  # not a tty


def test_verify_json_and_zero_tolerance(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--only", "transforms", "--transform", "spin_to_wigner",
                       "--state", "paper:j_half", "--json", "--tolerance", 0, "--out", tmp_path)
    assert code == EXIT_NUMERIC
    rec = [json.loads(l) for l in out.strip().splitlines()]
    assert len(rec) == 1 and rec[0]["passed"] is False and rec[0]["tolerance"] == 0.0
    code, _, _ = run(capsys, "verify", "--only", "transforms", "--transform", "spin_to_wigner",
                     "--state", "paper:j_half", "--json", "--out", tmp_path)
    assert code == EXIT_OK
    assert run(capsys, "verify", "--only", "transforms", "--transform", "nope", "--out", tmp_path)[0] == EXIT_USAGE
    assert run(capsys, "verify", "--only", "transforms", "--state", "paper:j_nine", "--out", tmp_path)[0] == EXIT_USAGE


def test_reproduce_fig4(tmp_path, capsys):
    code, out, _ = run(capsys, "reproduce", "fig4", "--out", tmp_path)
    assert code == EXIT_OK
    for name in ("fig4.png", "fig4.csv", "fig4.json", "fig4_report.jsonl"):
        assert (tmp_path / name).exists()
    tables = json.loads((tmp_path / "fig4.json").read_text())["tables"]
    assert set(tables) == {"1/2", "1", "3/2"}
    first = (tmp_path / "fig4.png").read_bytes()
    run(capsys, "reproduce", "fig4", "--out", tmp_path)
    assert (tmp_path / "fig4.png").read_bytes() == first  # no timestamps


def test_reproduce_fig3_and_tolerance(tmp_path, capsys):
    code, _, _ = run(capsys, "reproduce", "fig3", "--x", "-3:3:0.25", "--out", tmp_path)
    assert code == EXIT_OK
    assert {p.name for p in tmp_path.iterdir()} >= {"fig3.png", "fig3_j1_2.csv", "fig3_j1.json", "fig3_report.jsonl"}
    code, _, _ = run(capsys, "reproduce", "fig3", "--x", "-3:3:0.25", "--tolerance", 0, "--out", tmp_path)
    assert code == EXIT_NUMERIC
    with pytest.raises(SystemExit):
        main(["reproduce", "fig3", "--tolerance", "tight"])


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"x": "-1:1:0.5", "out": str(tmp_path / "from_cfg"), "seed": 3}))
    args = cli.build_parser().parse_args(["reproduce", "fig3", "--config", str(cfg), "--x", "-2:2:1"])
    rc = cli.resolve_config(args)
    assert rc.x == "-2:2:1" and rc.seed == 3 and rc.out == str(tmp_path / "from_cfg")
    args = cli.build_parser().parse_args(["reproduce", "fig3", "--config", str(cfg)])
    assert cli.resolve_config(args).x == "-1:1:0.5"


def test_config_rejects_unknown_and_bad_values(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": True}))
    code, _, err = run(capsys, "reproduce", "fig4", "--config", cfg)
    assert code == EXIT_USAGE and "colour" in err
    cfg.write_text(json.dumps({"s": 1.0}))
    assert run(capsys, "reproduce", "fig4", "--config", cfg)[0] == EXIT_USAGE
    cfg.write_text("{not json")
    assert run(capsys, "reproduce", "fig4", "--config", cfg)[0] == EXIT_USAGE


def test_colour_only_on_tty(monkeypatch):
    monkeypatch.setattr(sys.stdout, "isatty", lambda: True, raising=False)
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert "\033[32m" in cli.colorize("x pass")
    monkeypatch.setenv("NO_COLOR", "1")
    assert cli.colorize("x pass") == "x pass"


def test_module_entry_point(tmp_path):
    env = dict(os.environ, NO_COLOR="1")
    r = subprocess.run([sys.executable, "-m", "jstomo", "state", "paper", "--j", "3/2", "--out", str(tmp_path)],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0, r.stderr
    assert json.loads(r.stdout)["dim"] == 4
    r = subprocess.run([sys.executable, "-m", "jstomo", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "verify" in r.stdout
