"""
Unit tests for result tables and plot-ready region grids.
"""

import pandas as pd
import pytest
import yaml

from app.core.exceptions import ReportSchemaError
from app.core.services.reporting import (
    TABLE_COLUMNS,
    emit_plot_data,
    format_share,
    format_stats,
    load_report,
    load_snapshot,
    plot_frame,
    render_report,
)
from app.schemas.region import PartitionSnapshot, RegionRecord
from app.schemas.report import ClassCounts, MinRobStats, RepairReport, ReportRow


def _report(regions_total: int = 10, after: bool = True) -> RepairReport:
    before = ReportRow(
        label="Before repair",
        counts=ClassCounts(verified=6, unknown=1, failed=3),
        min_rob_failed=MinRobStats(mean=-0.5, std=0.25, count=3),
        min_rob_safe=MinRobStats(mean=4.514, std=3.018, count=7),
        min_rob_overall=MinRobStats(mean=3.0, std=3.5, count=10),
    )
    row = ReportRow(
        label="isar",
        counts=ClassCounts(verified=6, unknown=3, failed=1),
        broken=0,
        repaired=2,
        min_rob_safe=MinRobStats(mean=4.0, std=3.0, count=9),
        min_rob_overall=MinRobStats(mean=3.5, std=3.2, count=10),
    )
    return RepairReport(
        plant="uuv",
        formula="G[0,30](y >= 10) & G[0,30](y <= 30)",
        method="isar",
        seed=0,
        regions_total=regions_total,
        initially_verified=6,
        initially_failed=3,
        before=before,
        after=row if after else None,
    )


class TestFormatting:
    def test_share(self):
        assert format_share(0, 6) == "0 (0%)"
        assert format_share(2, 3) == "2 (66.7%)"
        assert format_share(None, 3) == "-"
        assert format_share(0, 0) == "0 (0%)"

    def test_stats(self):
        assert format_stats(MinRobStats(mean=4.514, std=3.018, count=5)) == "4.51 ± 3.02"
        assert format_stats(None) == "N/A"


class TestRenderReport:
    """Test suite for render_report."""

    def test_rows_follow_header(self):
        lines = render_report(_report()).splitlines()

        assert lines[0].startswith("Method")
        assert all(column in lines[0] for column in TABLE_COLUMNS)
        assert lines[2].startswith("Before repair")
        assert "6:1:3" in lines[2]
        assert "4.51 ± 3.02" in lines[2]
        assert lines[3].startswith("isar")
        assert "0 (0%)" in lines[3]
        assert "2 (66.7%)" in lines[3]
        assert "N/A" in lines[3]

    def test_verify_only_has_one_row(self):
        assert len(render_report(_report(after=False)).splitlines()) == 3

    def test_empty_partition_renders_header_only(self):
        assert len(render_report(_report(regions_total=0)).splitlines()) == 2

    def test_round_trip_through_yaml(self, tmp_path):
        path = tmp_path / "report.yaml"
        path.write_text(yaml.safe_dump(_report().model_dump(mode="json")))

        assert load_report(path) == _report()

    def test_invalid_report(self, tmp_path):
        path = tmp_path / "report.yaml"
        path.write_text(yaml.safe_dump({"plant": "uuv", "version": 2}))

        with pytest.raises(ReportSchemaError, match="Invalid report"):
            load_report(path)


def _snapshot() -> PartitionSnapshot:
    classes = ["verified", "unknown", "failed", "failed"]
    return PartitionSnapshot(
        plant="mc",
        phase="before",
        free_names=["p", "v"],
        regions=[
            RegionRecord(
                id=i,
                lower=[0.1 * i, 0.0],
                upper=[0.1 * (i + 1), 0.01],
                verified=label == "verified",
                region_class=label,
                min_rob=1.0 if label != "failed" else -1.0,
            )
            for i, label in enumerate(classes)
        ],
    )


class TestPlotData:
    """Test suite for plot_frame and emit_plot_data."""

    def test_frame_columns(self):
        frame = plot_frame(_snapshot())

        assert list(frame.columns) == ["id", "lower_p", "lower_v", "upper_p", "upper_v", "class"]
        assert frame["class"].value_counts().to_dict() == {"failed": 2, "verified": 1, "unknown": 1}

    def test_csv_next_to_snapshot(self, tmp_path):
        path = tmp_path / "regions_before.json"
        path.write_text(_snapshot().model_dump_json())

        written = emit_plot_data(path)
        frame = pd.read_csv(written)

        assert written == tmp_path / "regions_before.csv"
        assert len(frame) == 4
        assert (frame["class"] == "verified").sum() == 1
        assert frame.loc[3, "upper_p"] == pytest.approx(0.4)

    def test_explicit_output_path(self, tmp_path):
        path = tmp_path / "regions_before.json"
        path.write_text(_snapshot().model_dump_json())

        written = emit_plot_data(path, tmp_path / "grid.csv")

        assert written.name == "grid.csv"

    def test_invalid_snapshot(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")

        with pytest.raises(ReportSchemaError):
            load_snapshot(path)
