import json

import pytest

from dunklkit import __version__
from dunklkit.checks import check_names
from dunklkit import cli
from dunklkit.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main
from dunklkit.config import load_config
from dunklkit.output import read_csv_header

SMALL_CONFIG = """\
grid:
  radius: 8
  points: 64
  radial_points: 64
schedules:
  p: [1, 2]
  shifts: [1.0]
"""


@pytest.fixture(autouse=True)
def workdir(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("DUNKLKIT_THREADS", raising=False)
    monkeypatch.delenv("DEBUG", raising=False)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_list(capsys):
    assert main(["verify", "--list"]) == EXIT_OK
    assert capsys.readouterr().out.split() == check_names()


def test_config_error_exit_code(capsys, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("grid:\n  pionts: 3\n")
    code, out = run(capsys, "transform", "--config", str(path))
    assert code == EXIT_CONFIG
    assert out["success"] is False
    assert "line 2" in out["error"]


def test_unknown_check_fails(capsys, tmp_path):
    code, out = run(capsys, "verify", "--filter", "nope", "--out", str(tmp_path / "out"))
    assert code == EXIT_FAIL
    assert "unknown check" in out["error"]


def test_unexpected_error_is_reported(capsys, monkeypatch, tmp_path):
    def boom(cfg, writer, args):
        raise RuntimeError("grid exploded")

    monkeypatch.setitem(cli.COMMANDS, "transform", boom)
    code, out = run(capsys, "transform", "--out", str(tmp_path / "out"))
    assert code == EXIT_FAIL == 1
    assert out == {"success": False, "error": "grid exploded"}


def test_verify_single_check(capsys, tmp_path):
    out_dir = tmp_path / "out"
    code, out = run(capsys, "verify", "--filter", "sd_counterexample", "--out", str(out_dir), "--no-timing")
    assert code == EXIT_OK
    assert out["success"] is True
    assert out["data"]["checks"][0]["passed"] is True
    doc = json.loads((out_dir / "verify.json").read_text())
    assert doc["anchors"] == ["translation.translate_monomial_sd"]
    assert "runtime_ms" not in doc["data"]["checks"][0]
    assert out["data"]["files"] == [str(out_dir / "verify.json")]


def test_transform(capsys, tmp_path):
    config = tmp_path / "small.yaml"
    config.write_text(SMALL_CONFIG)
    out_dir = tmp_path / "out"
    code, out = run(capsys, "transform", "--config", str(config), "--out", str(out_dir))
    assert code == EXIT_OK
    assert out["data"]["plancherel_defect"] < 1e-6
    assert set(out["data"]["norms"]) == {"1.0", "2.0"}
    cfg = load_config(config).with_overrides(output_dir=str(out_dir))
    header = read_csv_header(out_dir / "transform.csv")
    assert header["config_hash"] == cfg.config_hash()
    assert header["anchors"] == "transform.transform_to_grid"


def test_translate_routes(capsys, tmp_path):
    config = tmp_path / "small.yaml"
    config.write_text(SMALL_CONFIG)
    code, out = run(capsys, "translate", "--config", str(config), "--out", str(tmp_path / "out"), "--route", "closed")
    assert code == EXIT_OK
    assert out["data"]["routes"] == ["closed"]
    (shift,) = out["data"]["shifts"]
    assert shift["y"] == [1.0]
    assert shift["route_differences"] == {}
    assert set(shift["norm_ratios"]) == {"1.0", "2.0"}
    assert (tmp_path / "out" / "translate_0.csv").exists()


def test_translate_explicit_matches_closed(capsys, tmp_path):
    config = tmp_path / "small.yaml"
    config.write_text(SMALL_CONFIG)
    code, out = run(capsys, "translate", "--config", str(config), "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert out["data"]["routes"] == ["explicit", "radial", "spectral", "closed"]
    diffs = out["data"]["shifts"][0]["route_differences"]
    assert diffs["explicit-closed"] < 1e-6


def test_translate_skips_routes_for_non_radial(capsys, tmp_path):
    config = tmp_path / "odd.yaml"
    config.write_text(SMALL_CONFIG + "test_function:\n  name: odd\n")
    code, out = run(capsys, "translate", "--config", str(config), "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert out["data"]["routes"] == ["explicit", "spectral"]


def test_negative_kappa_is_config_error(capsys, tmp_path):
    config = tmp_path / "neg.yaml"
    config.write_text("multiplicity:\n  kappa: [-1]\n")
    code, out = run(capsys, "verify", "--config", str(config))
    assert code == EXIT_CONFIG
    assert "kappa" in out["error"]


def test_summability_table(capsys, tmp_path):
    config = tmp_path / "small.yaml"
    config.write_text(SMALL_CONFIG.replace("  p: [1, 2]\n", "  p: [1, 2]\n  eps: [1.0, 0.5]\n"))
    out_dir = tmp_path / "out"
    code, out = run(capsys, "summability", "--config", str(config), "--out", str(out_dir), "--no-timing")
    assert code == EXIT_OK
    rows = out["data"]["rows"]
    assert [(r["eps"], r["p"]) for r in rows] == [(1.0, 1.0), (0.5, 1.0), (1.0, 2.0), (0.5, 2.0)]
    assert rows[1]["relative"] < rows[0]["relative"]
    lines = (out_dir / "summability.csv").read_text().splitlines()
    assert lines[3] == "kernel,param,eps,p,error,relative"
    assert len(lines) == 4 + len(rows)


def test_maximal_outputs(capsys, tmp_path):
    config = tmp_path / "small.yaml"
    config.write_text(SMALL_CONFIG + "runtime:\n  seed: 3\n")
    out_dir = tmp_path / "out"
    code, out = run(capsys, "maximal", "--config", str(config), "--out", str(out_dir))
    assert code == EXIT_OK
    assert out["data"]["weak_type_constant"] > 0
    assert out["data"]["majorization_constant"] > 0
    assert (out_dir / "maximal_weak_type.csv").exists()
    assert (out_dir / "maximal_majorization.csv").exists()
