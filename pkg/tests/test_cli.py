import csv
import json

import pytest

from mindet.cli import main
from mindet.config import bundled_configs, read_config_text


def _header(path):
    with path.open() as fh:
        return next(csv.reader(fh))


@pytest.mark.parametrize("name,code", [
    ("stieltjes_default", 0),
    ("operator_translation", 0),
    ("operator_gauged", 0),
    ("broken_lambda", 2),
])
def test_bundled_configs_exit_codes(name, code, tmp_path, capsys):
    assert main(["run", name, "--out", str(tmp_path)]) == code
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["schema"] == 1
    if code == 2:
        assert report["verdict"] == "FAILED(moment_spread)"
        assert "failing gate value" in capsys.readouterr().out


def test_all_bundled_configs_listed():
    names = {"stieltjes_default", "broken_lambda", "operator_translation", "operator_gauged"}
    assert {n + ".json" for n in names} <= set(bundled_configs())


def test_stieltjes_artifacts_and_verify(tmp_path):
    out = tmp_path / "s"
    argv = ["generate-stieltjes", "--epsilons=-1,0,1", "--out", str(out)]
    assert main(argv) == 0
    assert _header(out / "density.csv") == ["r", "eps=-1.0", "eps=0.0", "eps=1.0"]
    assert _header(out / "charfun.csv")[:3] == ["theta", "eps=-1.0:re", "eps=-1.0:im"]
    assert _header(out / "moments.csv")[0] == "n"
    assert main(["verify", "--in", str(out)]) == 0


def test_operator_artifacts_and_verify(tmp_path):
    out = tmp_path / "o"
    argv = ["generate-operator", "--operator", "gauged", "--betas", "0,3.14159", "--out", str(out)]
    assert main(argv) == 0
    assert _header(out / "density.csv") == ["r", "beta=0.0", "beta=3.14159"]
    assert main(["verify", "--in", str(out)]) == 0


def test_verify_detects_tampering(tmp_path):
    out = tmp_path / "s"
    assert main(["generate-stieltjes", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    report["moment_table"][0][2] += 1.0
    (out / "report.json").write_text(json.dumps(report))
    assert main(["verify", "--in", str(out)]) == 1


def test_broken_lambda_from_flags(tmp_path):
    assert main(["generate-stieltjes", "--lambda", "1.0", "--out", str(tmp_path)]) == 2
    assert main(["verify", "--in", str(tmp_path)]) == 2


@pytest.mark.parametrize("argv,field", [
    (["generate-stieltjes", "--epsilons=0,1.5"], "family.epsilons.1"),
    (["generate-stieltjes", "--n-points", "4000"], "grid"),
    (["generate-operator", "--betas=0,7"], "family.betas.1"),
    (["generate-stieltjes", "--epsilons", "a,b"], "flags"),
    (["frobnicate"], "flags"),
])
def test_config_invalid_names_field(argv, field, tmp_path, caplog):
    if argv[0] != "frobnicate":
        argv = argv + ["--out", str(tmp_path)]
    assert main(argv) == 1
    assert "ConfigInvalid" in caplog.text
    assert field in caplog.text


def test_unknown_config_field(tmp_path, caplog):
    raw = json.loads(read_config_text("stieltjes_default"))
    raw["generator"]["color"] = "red"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(raw))
    assert main(["run", str(path), "--out", str(tmp_path / "o")]) == 1
    assert "generator.color" in caplog.text


def test_missing_file(tmp_path, caplog):
    assert main(["run", str(tmp_path / "nope.json")]) == 1
    assert main(["verify", "--in", str(tmp_path / "nothing")]) == 1
    assert "IoError" in caplog.text
