import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from quht.cli import main

GOLDEN = Path(__file__).parent / "golden"


def _read_skipping_version(path: Path) -> str:
    lines = path.read_text().split("\n")
    assert lines[0].startswith("# quht ")
    return "\n".join(lines[1:])


# --- threshold ------------------------------------------------------------------


def test_threshold_frozen_value(capsys):
    rc = main(["threshold", "--scheme", "pauli-qubit", "--m", "5400", "--alpha", "0.05"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "c_m = 0.21880337618012308" in out
    assert "C = 0.018518518518518517" in out
    assert "g(m) = 6" in out


def test_threshold_two_sample(capsys):
    rc = main(["threshold", "--scheme", "pauli-qubit", "--m", "5400", "--n", "5400",
               "--alpha", "0.05"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "c_k = 0.46821528908577903" in out


def test_threshold_entangled_reports_rate(capsys):
    rc = main(["threshold", "--scheme", "entangled", "--d", "2", "--m", "1000",
               "--alpha", "0.05"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "C = 0.5" in out
    assert "(m+1)^12" in out  # weakened prefactor with r defaulting to d


def test_threshold_missing_alpha_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["threshold", "--scheme", "pauli-qubit", "--m", "100"])
    assert err.value.code == 2


def test_threshold_unknown_scheme_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["threshold", "--scheme", "magic", "--m", "100", "--alpha", "0.05"])
    assert err.value.code == 2


def test_threshold_missing_dimension_exits_2(capsys):
    rc = main(["threshold", "--scheme", "entangled", "--m", "100", "--alpha", "0.05"])
    assert rc == 2
    assert "requires --d" in capsys.readouterr().err


# --- simulate -----------------------------------------------------------------------


@pytest.mark.parametrize("name", ["pure_beta", "qubit_beta", "two_sample_alpha"])
def test_simulate_matches_golden(tmp_path, capsys, name):
    stem = tmp_path / name
    rc = main(["simulate", str(GOLDEN / f"{name}.json"), "--output", str(stem),
               "--no-figures", "--threads", "2"])
    assert rc == 0
    assert _read_skipping_version(stem.with_suffix(".csv")) == _read_skipping_version(
        GOLDEN / f"{name}.csv"
    )
    summary = json.loads(stem.with_suffix(".json").read_text())
    config = json.loads((GOLDEN / f"{name}.json").read_text())
    assert summary["master_seed"] == config["seed"]
    assert len(summary["grid"]) == len(config["m_grid"])
    assert "wrote" in capsys.readouterr().out


def test_simulate_renders_figure(tmp_path):
    stem = tmp_path / "fig"
    rc = main(["simulate", str(GOLDEN / "pure_beta.json"), "--output", str(stem),
               "--threads", "1"])
    assert rc == 0
    png = stem.with_suffix(".png")
    assert png.exists() and png.stat().st_size > 1000


def test_simulate_output_from_config(tmp_path):
    cfg = json.loads((GOLDEN / "pure_beta.json").read_text())
    cfg["output"] = str(tmp_path / "fromcfg")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    rc = main(["simulate", str(cfg_path), "--no-figures"])
    assert rc == 0
    assert (tmp_path / "fromcfg.csv").exists()


def test_simulate_rerun_is_byte_identical(tmp_path):
    for stem in ("a", "b"):
        rc = main(["simulate", str(GOLDEN / "qubit_beta.json"),
                   "--output", str(tmp_path / stem), "--no-figures"])
        assert rc == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_simulate_thread_env_is_byte_identical(tmp_path):
    # QUHT_THREADS=1 vs QUHT_THREADS=4 must produce identical files
    outputs = []
    for threads, stem in (("1", "one"), ("4", "many")):
        env = dict(os.environ, QUHT_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "quht.cli", "simulate", str(GOLDEN / "qubit_beta.json"),
             "--output", str(tmp_path / stem), "--no-figures"],
            capture_output=True, text=True, env=env, cwd=str(tmp_path),
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append((tmp_path / stem).with_suffix(".csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_simulate_invalid_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "one-sample"}))
    assert main(["simulate", str(bad), "--output", str(tmp_path / "x")]) == 2
    assert "missing required" in capsys.readouterr().err
    bad.write_text("{not json")
    assert main(["simulate", str(bad), "--output", str(tmp_path / "x")]) == 2


def test_simulate_unknown_field_exits_2(tmp_path, capsys):
    cfg = json.loads((GOLDEN / "pure_beta.json").read_text())
    cfg["mystery"] = 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cfg))
    assert main(["simulate", str(bad), "--output", str(tmp_path / "x")]) == 2
    assert "unknown fields" in capsys.readouterr().err


def test_simulate_missing_config_exits_3(tmp_path):
    assert main(["simulate", str(tmp_path / "nope.json"), "--output", str(tmp_path / "x")]) == 3


def test_simulate_unwritable_output_exits_3(capsys):
    rc = main(["simulate", str(GOLDEN / "pure_beta.json"),
               "--output", "/proc/no/such/dir/run", "--no-figures"])
    assert rc == 3
    assert "I/O error" in capsys.readouterr().err


def test_simulate_missing_output_stem_exits_2(capsys):
    rc = main(["simulate", str(GOLDEN / "pure_beta.json")])
    assert rc == 2
    assert "output" in capsys.readouterr().err


# --- bounds --------------------------------------------------------------------------


def _write_state(path: Path, obj) -> str:
    path.write_text(json.dumps(obj))
    return str(path)


def test_bounds_report(tmp_path, capsys):
    rho = _write_state(tmp_path / "rho.json", {"ket": [[1, 0], [0, 0]]})
    sigma = _write_state(tmp_path / "sigma.json", {"bloch": [1, 0, 0]})
    rc = main(["bounds", rho, sigma, "--m", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "trace_distance = 0.70710678118654" in out
    assert "fidelity = 0.5" in out
    assert "relative_entropy = inf" in out
    assert "renyi_half = 0.693147180559945" in out
    assert "helstrom(m=1) = 0.146446609406726" in out


def test_bounds_identical_states(tmp_path, capsys):
    rho = _write_state(tmp_path / "rho.json", {"bloch": [0.3, 0.1, -0.2]})
    rc = main(["bounds", rho, rho, "--m", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "trace_distance = 0" in out
    assert "fidelity = 1" in out
    assert "helstrom(m=2) = 0.5" in out


def test_bounds_parse_failure_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    rho = _write_state(tmp_path / "rho.json", {"bloch": [0, 0, 0]})
    assert main(["bounds", str(bad), rho]) == 2
    bad.write_text(json.dumps({"bloch": [2, 0, 0]}))
    assert main(["bounds", str(bad), rho]) == 2


# --- inequality suite and pinsker scan --------------------------------------------------


def test_inequality_suite_cli(capsys):
    rc = main(["inequality-suite", "--seed", "1", "--pairs", "100", "--d", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "PASS" in out
    assert "min_fvdg_slack" in out


def test_pinsker_scan_cli(capsys):
    rc = main(["pinsker-scan", "--epsilon", "0.01"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "ratio = " in out
    assert "P = (0.5" in out


def test_version_flag():
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0


def test_alpha_run_figure_renders(tmp_path):
    cfg = json.loads((GOLDEN / "two_sample_alpha.json").read_text())
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    stem = tmp_path / "alpha_fig"
    rc = main(["simulate", str(cfg_path), "--output", str(stem), "--threads", "1"])
    assert rc == 0
    assert stem.with_suffix(".png").stat().st_size > 1000


def test_bounds_dimension_mismatch_exits_2(tmp_path, capsys):
    rho = _write_state(tmp_path / "rho.json", {"bloch": [0, 0, 0]})
    sigma = _write_state(
        tmp_path / "sigma.json",
        {"matrix": {"re": [[0.25, 0, 0, 0], [0, 0.25, 0, 0], [0, 0, 0.25, 0], [0, 0, 0, 0.25]],
                    "im": [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}},
    )
    assert main(["bounds", rho, sigma]) == 2
    assert "mismatch" in capsys.readouterr().err
