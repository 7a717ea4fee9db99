import json
from pathlib import Path

import pytest

from ltebench import cli
from ltebench.config import ConfigError, load_config, parse_config
from ltebench.harness.report import strip_timing
from ltebench.manifest import read_manifest

APP = Path(__file__).resolve().parents[1] / "apps" / "pdsch.app"


def run(capsys, *argv):
    code = cli.execute([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_run_twice_same_digest(capsys, tmp_path):
    c1, o1, _ = run(capsys, "run", APP, "--iters", 10, "--seed", 7)
    c2, o2, _ = run(capsys, "run", APP, "--iters", 10, "--seed", 7, "--out", tmp_path)
    digest = [l for l in o1.splitlines() if "sha256" in l]
    assert c1 == c2 == 0 and digest and digest == [l for l in o2.splitlines() if "sha256" in l]
    man = read_manifest(tmp_path)
    assert man["command"] == "run" and man["seed"] == 7 and man["fixtures"]["sha256"]
    assert (tmp_path / "costs.csv").read_text().startswith("run_id,block")


def test_malformed_app(capsys, tmp_path):
    bad = tmp_path / "bad.app"
    bad.write_text('module a { lib = "copy" }\nmodule b { lib = "copy" ; x = }\n')
    code, _, err = run(capsys, "run", bad)
    assert code == 2 and "bad.app:2:31: syntax" in err


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "run")[0] == 1
    assert run(capsys, "run", tmp_path / "missing.app")[0] == 1
    assert run(capsys, "conformance", "--bler", "--mcs", 5)[0] == 1
    assert run(capsys, "sweep", "--out", tmp_path)[0] == 1
    assert run(capsys, "sweep", "--mcs", "3..1", "--snr", "0", "--iters", "1", "--out", tmp_path)[0] == 1


def test_invalid_values(capsys, tmp_path):
    code, _, err = run(capsys, "sweep", "--mcs", "0", "--snr", "0", "--iters", "1", "--blocks", 5,
                       "--out", tmp_path)
    assert code == 1 and "blocks" in err


def test_conformance_bler_saturated(capsys):
    code, out, _ = run(capsys, "conformance", "--bler", "--mcs", 5, "--snr", -20, "--blocks", 100)
    assert code == 3 and "bler=1.0000" in out


def test_conformance_bler_pass(capsys, tmp_path):
    code, out, _ = run(capsys, "conformance", "--bler", "--mcs", 5, "--snr", "inf", "--blocks", 100,
                       "--out", tmp_path)
    assert code == 0 and "PASS" in out
    assert json.loads((tmp_path / "report.json").read_text())["passed"] is True


def test_conformance_ber(capsys):
    code, out, _ = run(capsys, "conformance", "--ber", "--qm", 2, "--bits", 20000)
    assert code == 0 and out.count("PASS") == 3


def test_sweep_manifest_replay(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    code, _, _ = run(capsys, "sweep", "--mcs", "0..1", "--snr=-6,inf", "--iters", "1,2",
                     "--blocks", 100, "--min-errors", 20, "--seed", 3, "--out", a)
    assert code == 0
    assert {p.name for p in a.iterdir()} >= {"results.csv", "costs.csv", "fig3.svg", "fig4a.svg",
                                              "fig4b.svg", "manifest.json"}
    assert run(capsys, "sweep", "--from-manifest", a / "manifest.json", "--out", b)[0] == 0
    ra, rb = (a / "results.csv").read_text(), (b / "results.csv").read_text()
    assert strip_timing(ra) == strip_timing(rb)
    assert len(ra.splitlines()) == 9


def test_report_reemits(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "sweep", "--mcs", "2", "--snr", "inf", "--iters", "1", "--blocks", 100, "--out", a)
    assert run(capsys, "report", "--in", a, "--out", b)[0] == 0
    assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
    assert (b / "fig3.svg").exists() and (b / "manifest.json").exists()
    assert run(capsys, "report", "--in", tmp_path / "nowhere")[0] == 1


def test_volumes_and_threshold(capsys):
    code, out, _ = run(capsys, "volumes", "--mcs", "0,28")
    rows = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and rows[0]["e"] == 1512 and rows[1]["diagnostics"]
    code, out, _ = run(capsys, "threshold", "--mcs", 0, "--blocks", 100)
    assert code == 0 and "threshold=" in out


def test_config_override(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("seed = 7\n")
    c1, o1, _ = run(capsys, "--config", cfg, "run", APP, "--iters", 2)
    c2, o2, _ = run(capsys, "run", APP, "--iters", 2, "--seed", 7)
    assert c1 == c2 == 0
    assert [l for l in o1.splitlines() if "sha256" in l] == [l for l in o2.splitlines() if "sha256" in l]
    cfg.write_text("colour = red\n")
    assert run(capsys, "--config", cfg, "volumes", "--mcs", 0)[0] == 1


def test_config_parsing():
    assert load_config()["iterations"] == 5
    assert parse_config("isolation = off  # comment\nseed=3") == {"isolation": False, "seed": 3}
    for bad in ("seed 3", "seed = x", "isolation = maybe", "nope = 1"):
        with pytest.raises(ConfigError):
            parse_config(bad)


def test_list_parsing():
    assert cli.parse_int_list("0..3,10") == [0, 1, 2, 3, 10]
    with pytest.raises(cli.UsageError):
        cli.parse_int_list("")
    assert cli.parse_snr_list("1.5,inf") == [1.5, float("inf")]
