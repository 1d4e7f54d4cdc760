import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from horolab import __version__
from horolab.lab import cli
from horolab.lab.config import SCHEMA, ConfigError, load_config, parse_config
from horolab.lab.report import CSV_COLUMNS, format_float, read_report, write_report
from horolab.lab.runner import run_experiment

CONFIGS = sorted((Path(__file__).parent.parent / "configs").glob("*.json"))

# sha256 of the JSON report for {"kind": "fourier-coeff", "n_max": 5, "seed": 7},
# pinned when the report format was fixed; the version string is part of the bytes
GOLDEN_SHA256 = "ab83aa36a4451831263fec9aaae6831efc89a8d39f094cfbba4cd15e280f6238"
GOLDEN_VERSION = "0.1.0"


def test_every_kind_has_a_shipped_config():
    assert sorted(p.stem for p in CONFIGS) == sorted(SCHEMA)


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_shipped_config_round_trips(path):
    cfg = load_config(path)
    assert cfg.kind == path.stem
    again = parse_config(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg


def test_config_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "absent.json")
    with pytest.raises(ConfigError) as e:
        parse_config({"kind": "sparse-horocycle", "gamma": -1})
    assert e.value.key == "gamma" and "gamma" in str(e.value)
    with pytest.raises(ConfigError) as e:
        parse_config({"kind": "horocycle", "T": 5, "colour": "red"})
    assert e.value.key == "colour"
    for bad, key in [
        ({"kind": "warp"}, "kind"),
        ({}, "kind"),
        ({"kind": "horocycle", "T": 0}, "T"),
        ({"kind": "horocycle", "T": float("nan")}, "T"),
        ({"kind": "sparse-horocycle", "N": 2.5}, "N"),
        ({"kind": "twisted-period", "q": 9}, "q"),
        ({"kind": "twisted-period", "q": 5, "index": 4}, "index"),
        ({"kind": "twisted-period", "s_re": 1.5}, "s_re"),
        ({"kind": "rankin-selberg", "s_re": 1.0}, "s_re"),
        ({"kind": "horocycle", "seed": -1}, "seed"),
        ({"kind": "horocycle", "seed": 1 << 64}, "seed"),
        ({"kind": "horocycle", "basepoint": "elsewhere"}, "basepoint"),
        ({"kind": "amplifier", "K": []}, "K"),
        ({"kind": "horocycle", "format": "xml"}, "format"),
        ({"kind": "heegner", "discriminants": [-23, True]}, "discriminants"),
    ]:
        with pytest.raises(ConfigError) as e:
            parse_config(bad)
        assert e.value.key == key, bad
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{kind: horocycle")
    with pytest.raises(ConfigError):
        load_config(bad_json)


def test_eisenstein_report():
    rep = run_experiment(parse_config({"kind": "eisenstein-check"}))
    stats = {r.statistic: r.value for r in rep.rows}
    assert stats["max_functional_equation_residual"] < 1e-8
    assert rep.passed is True


def test_fourier_report():
    rep = run_experiment(parse_config({"kind": "fourier-coeff", "n_max": 10}))
    errs = [r.value for r in rep.rows if r.statistic == "relative_error"]
    assert len(errs) == 10 and max(errs) < 1e-6
    assert rep.passed is True


def test_report_metadata():
    cfg = parse_config({"kind": "matrix-coefficient", "n": 20_000, "seed": 5})
    d = run_experiment(cfg).as_dict()
    assert d["seed"] == 5 and d["version"] == __version__ and d["config"] == cfg.to_dict()
    assert d["wall_clock"] is None
    (row,) = d["results"]
    assert row["statistic"] == "normalized_correlation" and row["stderr"] > 0 and row["n"] == 20_000
    assert run_experiment(cfg, timing=True).wall_clock > 0


def test_determinism_and_threads():
    cfg = parse_config({"kind": "rankin-selberg", "mc_n": 100_000, "seed": 3})
    a = write_report(run_experiment(cfg), "json")
    b = write_report(run_experiment(cfg), "json")
    c = write_report(run_experiment(cfg, workers=3), "json")
    assert a == b == c
    d = write_report(run_experiment(cfg.with_seed(4)), "json")
    assert d != a


def test_csv_schema():
    out = write_report(run_experiment(parse_config({"kind": "fourier-coeff", "n_max": 3})), "csv")
    lines = out.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) == "experiment,function_name,statistic,value,stderr,n,seed"
    assert len(lines) == 4
    assert all(len(l.split(",")) == 7 for l in lines)


def test_float_format():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(1 / 3)) == 1 / 3
    assert format_float(float("nan")) == "NaN" and format_float(float("-inf")) == "-Infinity"


def test_json_round_trip(tmp_path):
    cfg = parse_config({"kind": "amplifier", "K": [5, 7]})
    rep = run_experiment(cfg)
    text = write_report(rep, "json")
    parsed = read_report(text)
    # 17 significant digits: every float survives the trip exactly
    assert [r["value"] for r in parsed["results"]] == [r.value for r in rep.rows]
    assert parse_config(parsed["config"]) == cfg
    path = tmp_path / "r.json"
    write_report(rep, "json", path)
    assert read_report(path) == parsed
    with pytest.raises(OSError):
        write_report(rep, "json", tmp_path / "missing" / "r.json")


def test_golden_hash():
    text = write_report(run_experiment(parse_config({"kind": "fourier-coeff", "n_max": 5, "seed": 7})), "json")
    assert __version__ == GOLDEN_VERSION
    assert hashlib.sha256(text.encode()).hexdigest() == GOLDEN_SHA256


def _write(tmp_path, data):
    p = tmp_path / f"c{len(list(tmp_path.iterdir()))}.json"
    p.write_text(json.dumps(data))
    return str(p)


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("HOROLAB_SEED", raising=False)
    ok = _write(tmp_path, {"kind": "fourier-coeff", "n_max": 3})
    assert cli.main(["run", "--config", ok]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True
    assert cli.main(["run", "--config", _write(tmp_path, {"kind": "horocycle", "T": -1})]) == 2
    assert "T" in capsys.readouterr().err
    assert cli.main(["run", "--config", ok, "--threads", "0"]) == 2
    # a tolerance no computation can meet is a numeric failure
    strict = _write(tmp_path, {"kind": "fourier-coeff", "n_max": 3, "tol": 1e-300})
    assert cli.main(["run", "--config", strict]) == 3
    assert cli.main(["run", "--config", str(tmp_path / "nope.json")]) == 4
    assert cli.main(["run", "--config", ok, "--out", str(tmp_path / "no" / "dir.json")]) == 4
    out = tmp_path / "r.csv"
    assert cli.main(["run", "--config", ok, "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().startswith("experiment,")


def test_cli_seed_override(tmp_path, capsys, monkeypatch):
    ok = _write(tmp_path, {"kind": "matrix-coefficient", "n": 10_000, "seed": 1})
    monkeypatch.setenv("HOROLAB_SEED", "424242")
    assert cli.main(["run", "--config", ok]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["seed"] == 424242 and d["config"]["seed"] == 424242
    monkeypatch.setenv("HOROLAB_SEED", "abc")
    assert cli.main(["run", "--config", ok]) == 2


def test_console_script(tmp_path):
    ok = _write(tmp_path, {"kind": "amplifier", "K": [5]})
    r = subprocess.run([sys.executable, "-m", "horolab.lab.cli", "run", "--config", ok], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["experiment"] == "amplifier"
