from __future__ import annotations

import json

import pytest

from statconv import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_suite_passes_with_exit_zero(capsys):
    code, out, _ = run(capsys, "suite", "example24")
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["schema"] == 1


def test_suite_mismatch_exit_one(tmp_path, capsys):
    cfg = tmp_path / "tight.cfg"
    cfg.write_text("tolerance = 1/10000\n")
    code, out, _ = run(capsys, "suite", "example24", "--config", str(cfg), "--format", "csv")
    assert code == 1 and out.startswith("suite,id,anchor")


def test_suite_writes_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "suite", "example24", "--out", str(path))
    assert code == 0 and out == "" and json.loads(path.read_text())["suite"] == "example24"


@pytest.mark.parametrize("argv", [
    ["suite", "nope"],
    ["suite", "example24", "--format", "xml"],
    ["suite", "example24", "--config", "/nonexistent/cfg"],
    ["density", "bogus:1"],
    ["density", "ap:0:2"],
    ["seq", "harmonic", "--eps", "a/b", "--limit", "0"],
    ["modes", "typewriter"],
    ["construct", "example24", "--depth", "40"],
    [],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "suite", "example24", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_density_command(capsys):
    code, out, _ = run(capsys, "density", "ap:1:3", "--ladder", "10,100,1000")
    data = json.loads(out)
    assert code == 0 and data["exact_density"] == "1/3"
    code, out, _ = run(capsys, "density", "~squares", "--ladder", "100,10000", "--format", "csv")
    assert code == 0 and len(out.strip().splitlines()) == 3


def test_seq_command(capsys):
    code, out, _ = run(capsys, "seq", "harmonic", "--limit", "0", "--cauchy", "1/8", "--cesaro", "4")
    data = json.loads(out)
    assert code == 0
    assert data["limit"]["verdict"] == "Holds" and data["cauchy"]["verdict"] == "Holds"
    assert data["cesaro"]["mean"] == "25/48"


def test_seq_scan(capsys):
    code, out, _ = run(capsys, "seq", "constant:1/2", "--scan", "0,1", "--ladder", "10,100,1000")
    scan = json.loads(out)["scan"]
    assert code == 0
    assert [(e["threshold"], e["verdict"], e["value"]) for e in scan] == [
        ("0/1", "Exists", "0/1"), ("1/1", "Exists", "1/1")]


def test_modes_command(capsys):
    code, out, _ = run(capsys, "modes", "typewriter", "--mode", "ae", "--ladder", "256,1024")
    assert code == 0 and json.loads(out)["verdict"] == "Fails"
    code, out, _ = run(capsys, "modes", "alternating_halves", "--mode", "st_lambda", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "profile,n,value_num,value_den"


def test_construct_command(capsys):
    code, out, _ = run(capsys, "construct", "typewriter", "--k", "3")
    assert code == 0 and json.loads(out)["terms"][2]["interval"] == ["0/1", "1/4"]
    code, out, _ = run(capsys, "construct", "example24", "--depth", "2", "--emit-anchors")
    data = json.loads(out)
    assert data["anchors"]["m"] == ["0", "10", "526"] and all(c["holds"] for c in data["checks"])
