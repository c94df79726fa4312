#!/usr/bin/env python3
"""
Regenerate tests/golden/classification.yaml.

For each desk-scale preset this synthesizes the seed controller from the preset's
seed, runs ISAR on it and records the region classes before and after repair.
"""

import sys
import tempfile
from pathlib import Path

import yaml

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import app.core  # noqa: F401
from app.core.exceptions import RepairToolkitError
from app.core.services import experiment
from app.core.services.reporting import load_report

PRESETS = ("uuv-small", "mc-small")
CLASSIFICATION = project_root / "tests" / "golden" / "classification.yaml"
HEADER = (
    "# Region classes of the desk-scale presets, seed controller synthesized from the preset seed.\n"
    "# Regenerate with scripts/freeze_golden.py.\n"
)


def freeze(preset: str) -> dict:
    preset_path = project_root / "config" / "presets" / f"{preset}.yaml"
    config = experiment.load_experiment_config(preset_path, method="isar")
    with tempfile.TemporaryDirectory() as tmp:
        report = load_report(experiment.run(config, Path(tmp)) / "report.yaml")
    print(f"{preset}: before {report.before.counts}, after {report.after.counts}")
    return {
        "before": report.before.counts.model_dump(),
        "after": report.after.counts.model_dump(),
        "broken": report.after.broken,
        "repaired": report.after.repaired,
    }


def main() -> None:
    """Freeze every desk-scale preset."""
    print("Freezing golden classification...")
    try:
        frozen = {preset: freeze(preset) for preset in PRESETS}
    except RepairToolkitError as e:
        print(f"❌ {type(e).__name__}: {e.message}")
        sys.exit(1)
    CLASSIFICATION.parent.mkdir(parents=True, exist_ok=True)
    CLASSIFICATION.write_text(HEADER + yaml.safe_dump(frozen, sort_keys=False, default_flow_style=None))
    print(f"✅ Golden classification written to {CLASSIFICATION}")


if __name__ == "__main__":
    main()
