"""
Integration tests for the command-line surface and the artifact directory.
"""

import json
from pathlib import Path

import pandas as pd
import pytest
import yaml

from app.config import settings
from app.core.controller import load_controller, save_controller
from app.main import main
from tests.conftest import linear_controller

ARTIFACTS = {
    "config.yaml",
    "weights_initial.yaml",
    "weights_final.yaml",
    "verification_log.jsonl",
    "iteration_log.jsonl",
    "report.yaml",
    "regions_before.json",
    "regions_before.csv",
    "regions_after.json",
    "regions_after.csv",
}


@pytest.fixture
def toy_config(tmp_path) -> Path:
    controller = save_controller(linear_controller([[0.0]], [0.01]), tmp_path / "toy_controller.yaml")
    config = {
        "plant": "toy",
        "controller": str(controller),
        "K": 10,
        "sigma": 0.05,
        "tau0": 0.01,
        "max_iter": 50,
        "refine_depth": 1,
        "max_rounds": 10,
        "seed": 3,
        "threads": 2,
        "record_timing": False,
    }
    path = tmp_path / "toy.yaml"
    path.write_text(yaml.safe_dump(config))
    return path


def _read_tree(directory: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestRunCommands:
    """verify, repair and baseline subcommands."""

    def test_repair_writes_every_artifact(self, toy_config, tmp_path, capsys):
        out = tmp_path / "run"

        assert main(["repair", "--config", str(toy_config), "--out", str(out)]) == 0

        assert {p.name for p in out.iterdir()} == ARTIFACTS
        assert capsys.readouterr().out.startswith("Method")
        report = yaml.safe_load((out / "report.yaml").read_text())
        assert report["method"] == "isar"
        assert report["after"]["broken"] == 0
        iterations = [json.loads(line) for line in (out / "iteration_log.jsonl").read_text().splitlines()]
        assert all(r["rho_min"] >= 0 for r in iterations if r["accepted"])
        assert load_controller(out / "weights_final.yaml").input_dim == 1

    def test_repeated_runs_are_byte_identical(self, toy_config, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"

        assert main(["repair", "--config", str(toy_config), "--out", str(first)]) == 0
        assert main(["repair", "--config", str(toy_config), "--out", str(second), "--threads", "1"]) == 0

        assert _read_tree(first) == _read_tree(second)

    def test_seed_override_lands_in_provenance(self, toy_config, tmp_path):
        out = tmp_path / "run"

        assert main(["verify", "--config", str(toy_config), "--out", str(out), "--seed", "11"]) == 0

        assert yaml.safe_load((out / "config.yaml").read_text())["seed"] == 11

    def test_verify_only(self, toy_config, tmp_path, capsys):
        out = tmp_path / "verify"

        assert main(["verify", "--config", str(toy_config), "--out", str(out)]) == 0

        report = yaml.safe_load((out / "report.yaml").read_text())
        assert report["after"] is None
        assert report["method"] == "verify-only"
        assert not (out / "regions_after.json").exists()
        assert (out / "weights_initial.yaml").read_bytes() == (out / "weights_final.yaml").read_bytes()
        assert capsys.readouterr().out == ""

    def test_baseline(self, toy_config, tmp_path):
        out = tmp_path / "baseline"

        assert main(["baseline", "--config", str(toy_config), "--method", "plain-sa", "--out", str(out)]) == 0

        assert yaml.safe_load((out / "report.yaml").read_text())["method"] == "plain-sa"

    def test_invalid_config_writes_error_record(self, tmp_path, capsys):
        config = tmp_path / "bad.yaml"
        config.write_text(yaml.safe_dump({"plant": "toy", "K": 0}))
        out = tmp_path / "failed"

        assert main(["repair", "--config", str(config), "--out", str(out)]) == 1

        record = json.loads((out / "error.json").read_text())
        assert record["error"] == "ConfigError"
        assert any(e.startswith("K") for e in record["context"]["errors"])
        assert "ConfigError" in capsys.readouterr().err

    def test_error_record_defaults_to_output_dir(self, tmp_path, monkeypatch):
        config = tmp_path / "bad.yaml"
        config.write_text(yaml.safe_dump({"plant": "toy", "K": 0}))
        monkeypatch.setattr(settings, "OUTPUT_DIR", str(tmp_path / "runs"))

        assert main(["verify", "--config", str(config)]) == 1

        record = json.loads((tmp_path / "runs" / "error.json").read_text())
        assert record["error"] == "ConfigError"


class TestArtifactCommands:
    """report, plot-data and synthesize subcommands."""

    def test_report_renders_table(self, toy_config, tmp_path, capsys):
        out = tmp_path / "run"
        main(["repair", "--config", str(toy_config), "--out", str(out)])
        capsys.readouterr()

        assert main(["report", str(out / "report.yaml")]) == 0

        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("Method")
        assert lines[2].startswith("Before repair")
        assert lines[3].startswith("isar")

    def test_report_on_invalid_file(self, tmp_path):
        path = tmp_path / "report.yaml"
        path.write_text("plant: toy\n")

        assert main(["report", str(path)]) == 1
        assert not (tmp_path / "error.json").exists()

    def test_plot_data(self, toy_config, tmp_path):
        out = tmp_path / "run"
        main(["verify", "--config", str(toy_config), "--out", str(out)])
        csv = tmp_path / "grid.csv"

        assert main(["plot-data", str(out / "regions_before.json"), "--out", str(csv)]) == 0

        frame = pd.read_csv(csv)
        assert list(frame["class"]) == ["failed", "verified"]
        assert list(frame.columns) == ["id", "lower_x", "upper_x", "class"]

    def test_synthesize(self, tmp_path):
        config = tmp_path / "toy.yaml"
        config.write_text(yaml.safe_dump({"plant": "toy", "seed": 2, "synthesis": {"budget": 10}}))
        out = tmp_path / "controllers"

        assert main(["synthesize", "--config", str(config), "--out", str(out)]) == 0

        params = load_controller(out / "seed_controller.yaml")
        assert params.input_dim == 1
