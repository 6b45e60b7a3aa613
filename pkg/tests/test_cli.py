import json
import subprocess
import sys

import pytest

from opnorm import __version__
from opnorm.cli import main, parse_config, strip_timing, suite_seed
from opnorm.serialize import matrix_to_json
from opnorm.suites import ConfigError


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run_cfg(tmp_path, cfg, *extra):
    out = tmp_path / "report.json"
    code = main(["run", write(tmp_path, cfg), "-o", str(out), *extra])
    report = json.loads(out.read_text()) if out.exists() and out.read_text().startswith("{") else None
    return code, report


def test_norm_triangle_suite_passes_for_mult_norm(tmp_path):
    cfg = {"seed": 42, "suites": [{"suite": "prop5", "norm": {"name": "mult_norm_l2", "grid_size": 8}}]}
    code, rep = run_cfg(tmp_path, cfg)
    assert code == 0
    assert rep["schema"] == 1
    assert rep["status"] == "pass"
    assert rep["tool"]["version"] == __version__
    assert rep["config"]["seed"] == 42
    s = rep["suites"][0]
    assert s["name"] == "prop5" and s["status"] == "pass"
    assert set(s["residual"]) == {"max", "mean"}
    assert "wall_time_s" in s
    assert "||F(x+y)||" in s["claim"]


def test_adversarial_norm_fails_with_witness(tmp_path):
    cfg = {"seed": 1, "suites": [
        {"suite": "axioms-lh", "norm": {"name": "shifted_norm", "base": {"name": "mult_norm_l2", "grid_size": 4},
                                       "shift": 0.01}},
        {"suite": "axioms-ck", "norm": {"name": "negated_entry_norm", "base": {"name": "mult_norm_ck", "grid_size": 4}}},
    ]}
    code, rep = run_cfg(tmp_path, cfg)
    assert code == 1
    assert rep["status"] == "fail"
    assert rep["failed_suites"] == ["axioms-lh", "axioms-ck"]
    checks = [w["check"] for s in rep["suites"] for w in s["witnesses"]]
    assert "axioms.positivity" in checks


def test_empty_suites_pass_vacuously(tmp_path):
    code, rep = run_cfg(tmp_path, {"seed": 3, "suites": []})
    assert code == 0
    assert rep["suite_count"] == 0 and "zero suites" in rep["note"]


@pytest.mark.parametrize("cfg, where", [
    ({"suites": [{"suite": "prop5", "norm": {"name": "mult_norm_l2", "grid_size": 2}}, {"suite": "prop6"},
                 {"suite": "nope"}]}, "suites[2].suite"),
    ({"suites": [{"suite": "prop5", "norm": {"name": "bogus"}}]}, "suites[0].norm.name"),
    ({"suites": [{"suite": "prop5", "norm": {"name": "mult_norm_l2", "grid_size": 2}, "tol": -1}]}, "suites[0].tol"),
    ({"suites": [{"suite": "prop5", "norm": {"name": "mult_norm_l2", "grid_size": 2}, "pairs": 0}]}, "suites[0].pairs"),
    ({"suites": [{"suite": "axioms-lh", "norm": {"name": "mult_norm_ck", "grid_size": 2}}]}, "suites[0].norm.name"),
    ({"suites": [{"suite": "prop6", "extra": 1}]}, "suites[0].extra"),
    ({"suites": [{"suite": "theorem-b1", "norm": {"name": "compose_norm",
                                                  "T": {"rows": 1, "cols": 1, "entries": [["x", 0]]}}}]},
     "suites[0].norm.T.entries[0]"),
    ({"seed": -4, "suites": []}, "seed"),
    ({"format": "xml", "suites": []}, "format"),
])
def test_invalid_config_exit_2_with_location(tmp_path, capsys, cfg, where):
    assert main(["run", write(tmp_path, cfg)]) == 2
    assert where in capsys.readouterr().err


def test_parse_error_location_attribute():
    with pytest.raises(ConfigError) as info:
        parse_config({"suites": [{"suite": "prop6"}, {"suite": "gelfand", "algebra": {"dim": 0}}]})
    assert info.value.where == "suites[1].algebra.dim"


def test_bad_json_and_missing_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["run", str(p)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    err = capsys.readouterr().err
    assert "line 1" in err and "cannot read config" in err


def test_construction_failure_is_invalid_input(tmp_path, capsys):
    singular = matrix_to_json([[1, 0], [0, 0]])
    cfg = {"suites": [{"suite": "prop5", "norm": {"name": "compose_norm",
                                                  "base": {"name": "mult_norm_l2", "grid_size": 2}, "T": singular}}]}
    assert main(["run", write(tmp_path, cfg)]) == 2
    noncommuting = {"suites": [{"suite": "gelfand", "algebra": {"generators": [
        matrix_to_json([[1, 0], [0, 2]]), matrix_to_json([[0, 1], [1, 0]])]}}]}
    assert main(["run", write(tmp_path, noncommuting)]) == 2
    assert "singular" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    cfg = write(tmp_path, {"suites": []})
    assert main(["run", cfg, "-o", str(tmp_path / "no" / "such" / "dir.json")]) == 2


def test_describe(capsys):
    assert main(["describe", "embed-a6"]) == 0
    out = capsys.readouterr().out
    assert "defect" in out and "1 - cos(pi/m)" in out and "guarantee" in out
    assert main(["describe", "gelfand"]) == 0
    out = capsys.readouterr().out
    assert "commuting" in out and "normal" in out
    assert main(["describe", "compose_norm"]) == 0
    assert main(["describe", "foo"]) == 2
    assert "unknown" in capsys.readouterr().err


def test_version(capsys):
    assert main(["version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_seed_env_override(tmp_path, monkeypatch):
    cfg = {"seed": 1, "suites": [{"suite": "prop5", "norm": {"name": "mult_norm_ck", "grid_size": 3}}]}
    monkeypatch.setenv("OPNORM_SEED", "77")
    _, rep = run_cfg(tmp_path, cfg)
    assert rep["config"]["seed"] == 77
    assert rep["suites"][0]["seed"] == suite_seed(77, 0)
    monkeypatch.setenv("OPNORM_SEED", "abc")
    assert main(["run", write(tmp_path, cfg)]) == 2


def test_suite_seeds_independent_of_other_suites():
    assert suite_seed(5, 0) != suite_seed(5, 1)
    assert suite_seed(5, 1) == suite_seed(5, 1)


def test_determinism_in_process(tmp_path):
    cfg = {"seed": 9, "suites": [{"suite": "theorem-b1", "norm": {"name": "compose_norm"}},
                                 {"suite": "cor-a9", "algebra": {"dim": 4, "count": 2}}]}
    _, a = run_cfg(tmp_path, cfg)
    _, b = run_cfg(tmp_path, cfg)
    assert json.dumps(strip_timing(a)) == json.dumps(strip_timing(b))


def test_text_format(tmp_path):
    cfg = {"seed": 2, "format": "text", "suites": [{"suite": "prop6", "matrices": 10, "radius_samples": 10000}]}
    out = tmp_path / "r.txt"
    code = main(["run", write(tmp_path, cfg), "-o", str(out)])
    text = out.read_text()
    assert code == 0
    assert text.startswith("opnorm ") and "prop6" in text and "claim:" in text


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "opnorm.cli", "version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
