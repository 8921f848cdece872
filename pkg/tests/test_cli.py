"""Command-line interface: subcommands, exit codes, and output contracts."""

from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from entrisk.cli import cli_main

FIXTURES = Path(__file__).parent / "fixtures"


def write_config(tmp_path: Path, **overrides) -> Path:
    raw = {
        "predictor": "linear_regression",
        "loss": "squared",
        "grid_min": [0.25],
        "grid_max": [0.25],
        "grid_resolution": [1],
        "reference": "uniform",
        "dataset": "synthetic",
        "true_model": [0.5],
        "noise": 0.1,
        "n": 6,
        "data_seed": 5,
        "lambda_min": 0.5,
        "lambda_max": 2.0,
        "lambda_count": 3,
        "output_csv": "out.csv",
        "output_json": "out.json",
        "seed": 1,
    }
    raw.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw), encoding="utf-8")
    return path


def copy_two_atom_fixture(tmp_path: Path) -> Path:
    for name in ("two_atom_config.json", "two_atom_data.csv"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    return tmp_path / "two_atom_config.json"


class TestVerify:
    def test_constant_risk_config_passes(self, tmp_path, capsys):
        cfg = write_config(tmp_path)  # single-atom grid: constant risks
        assert cli_main(["verify", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "pass" in out

    def test_two_atom_fixture_passes(self, tmp_path):
        cfg = copy_two_atom_fixture(tmp_path)
        assert cli_main(["verify", "--config", str(cfg)]) == 0


class TestSolve:
    def test_negative_lambda_is_validation_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        code = cli_main(["solve", "--config", str(cfg), "--lambda", "-1", "--type", "2"])
        assert code == 1
        assert "lambda" in capsys.readouterr().err

    def test_solution_json_round_trips(self, tmp_path, capsys):
        cfg = copy_two_atom_fixture(tmp_path)
        code = cli_main(["solve", "--config", str(cfg), "--lambda", "1.0", "--type", "2"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["type"] == 2
        assert payload["k_bar"] == pytest.approx(0.7071067811865475, abs=1e-9)
        assert payload["weights"] == pytest.approx([0.70710678, 0.29289322], abs=1e-6)

    def test_type1_solution_reports_log_partition(self, tmp_path, capsys):
        cfg = copy_two_atom_fixture(tmp_path)
        code = cli_main(["solve", "--config", str(cfg), "--lambda", "1.0", "--type", "1"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["log_partition"] == pytest.approx(-0.3798854930417224, abs=1e-12)

    def test_bad_type_choice_is_validation_error(self, tmp_path):
        cfg = write_config(tmp_path)
        assert cli_main(["solve", "--config", str(cfg), "--lambda", "1", "--type", "3"]) == 1


class TestSweep:
    def test_golden_fixture_csv(self, tmp_path):
        cfg = copy_two_atom_fixture(tmp_path)
        assert cli_main(["sweep", "--config", str(cfg)]) == 0
        produced = (tmp_path / "two_atom_sweep.csv").read_bytes()
        assert produced == (FIXTURES / "two_atom_sweep_golden.csv").read_bytes()

    def test_two_runs_byte_identical(self, tmp_path):
        cfg = copy_two_atom_fixture(tmp_path)
        assert cli_main(["sweep", "--config", str(cfg)]) == 0
        first = (tmp_path / "two_atom_sweep.csv").read_bytes()
        first_json = (tmp_path / "two_atom_summary.json").read_bytes()
        assert cli_main(["sweep", "--config", str(cfg)]) == 0
        assert (tmp_path / "two_atom_sweep.csv").read_bytes() == first
        assert (tmp_path / "two_atom_summary.json").read_bytes() == first_json

    def test_summary_json_contains_flags_and_digest(self, tmp_path):
        cfg = copy_two_atom_fixture(tmp_path)
        assert cli_main(["sweep", "--config", str(cfg)]) == 0
        summary = json.loads((tmp_path / "two_atom_summary.json").read_text())
        assert summary["invariants"]["identity_gap_le_1e-9"] is True
        assert summary["invariants"]["k_bar_strictly_increasing"] is True
        assert len(summary["instance_digest"]) == 64
        assert summary["config"]["loss"] == "absolute"

    def test_missing_output_csv_is_validation_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, output_csv=None)
        # json.dumps writes null; strip it to omit the key entirely
        raw = json.loads(cfg.read_text())
        del raw["output_csv"]
        cfg.write_text(json.dumps(raw))
        assert cli_main(["sweep", "--config", str(cfg)]) == 1
        assert "output_csv" in capsys.readouterr().err


class TestExitCodes:
    def test_missing_config_file_is_io_error(self, tmp_path):
        assert cli_main(["verify", "--config", str(tmp_path / "nope.json")]) == 3

    def test_invalid_json_is_validation_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        assert cli_main(["verify", "--config", str(path)]) == 1

    def test_unknown_key_is_validation_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, mystery=1)
        assert cli_main(["verify", "--config", str(cfg)]) == 1
        assert "mystery" in capsys.readouterr().err

    def test_usage_error_maps_to_validation(self):
        assert cli_main(["solve", "--nonsense"]) == 1

    def test_help_exits_zero(self, capsys):
        assert cli_main(["--help"]) == 0
        assert "sweep" in capsys.readouterr().out
