"""
Human-readable result tables and plot-ready region grids.
"""

import json
from pathlib import Path

import pandas as pd
import yaml
from loguru import logger
from pydantic import ValidationError

from app.core.exceptions import ReportSchemaError
from app.schemas.region import PartitionSnapshot
from app.schemas.report import MinRobStats, RepairReport, ReportRow

TABLE_COLUMNS = (
    "Method",
    "|Ss|:|S~s|:|Sf|",
    "# of regions in Ss broken",
    "# of regions in Sf repaired",
    "Min rob per region (Sf)",
    "Min rob per region (Ss u S~s)",
    "Min rob per region (all)",
)


def format_share(count: int | None, total: int) -> str:
    """'0 (0%)' for zero, otherwise the count with a one-decimal percentage."""
    if count is None:
        return "-"
    if count == 0 or total == 0:
        return f"{count} (0%)"
    return f"{count} ({100.0 * count / total:.1f}%)"


def format_stats(stats: MinRobStats | None) -> str:
    if stats is None:
        return "N/A"
    return f"{stats.mean:.2f} ± {stats.std:.2f}"


def _row_cells(row: ReportRow, report: RepairReport) -> list[str]:
    counts = row.counts
    return [
        row.label,
        f"{counts.verified}:{counts.unknown}:{counts.failed}",
        format_share(row.broken, report.initially_verified),
        format_share(row.repaired, report.initially_failed),
        format_stats(row.min_rob_failed),
        format_stats(row.min_rob_safe),
        format_stats(row.min_rob_overall),
    ]


def render_report(report: RepairReport) -> str:
    """Fixed-width results table; a run without regions renders the header alone."""
    rows = []
    if report.regions_total > 0:
        rows.append(_row_cells(report.before, report))
        if report.after is not None:
            rows.append(_row_cells(report.after, report))
    widths = [max(len(cells[i]) for cells in [list(TABLE_COLUMNS), *rows]) for i in range(len(TABLE_COLUMNS))]

    def _line(cells: list[str]) -> str:
        return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths, strict=True)).rstrip()

    lines = [_line(list(TABLE_COLUMNS)), _line(["-" * w for w in widths])]
    lines.extend(_line(cells) for cells in rows)
    return "\n".join(lines) + "\n"


def load_report(path: Path) -> RepairReport:
    """
    Read a report document.

    Raises:
        ReportSchemaError: If the file is not a valid report
    """
    try:
        with Path(path).open() as f:
            return RepairReport.model_validate(yaml.safe_load(f))
    except (yaml.YAMLError, ValidationError, TypeError) as e:
        raise ReportSchemaError(f"Invalid report document {path}: {e}", {"path": str(path)}, e) from e


def report_render(path: Path) -> str:
    return render_report(load_report(path))


def load_snapshot(path: Path) -> PartitionSnapshot:
    try:
        return PartitionSnapshot.model_validate(json.loads(Path(path).read_text()))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ReportSchemaError(f"Invalid region snapshot {path}: {e}", {"path": str(path)}, e) from e


def plot_frame(snapshot: PartitionSnapshot) -> pd.DataFrame:
    """One row per region: id, lower bounds, upper bounds, class label."""
    records = []
    for region in snapshot.regions:
        record: dict[str, object] = {"id": region.id}
        record.update({f"lower_{name}": lo for name, lo in zip(snapshot.free_names, region.lower, strict=True)})
        record.update({f"upper_{name}": hi for name, hi in zip(snapshot.free_names, region.upper, strict=True)})
        record["class"] = region.region_class
        records.append(record)
    columns = ["id", *(f"lower_{n}" for n in snapshot.free_names), *(f"upper_{n}" for n in snapshot.free_names), "class"]
    return pd.DataFrame.from_records(records, columns=columns)


def emit_plot_data(snapshot_path: Path, output_path: Path | None = None) -> Path:
    """Write the region grid of a snapshot as CSV next to it (or to output_path)."""
    snapshot_path = Path(snapshot_path)
    output_path = Path(output_path) if output_path else snapshot_path.with_suffix(".csv")
    frame = plot_frame(load_snapshot(snapshot_path))
    frame.to_csv(output_path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info(f"Wrote {len(frame)} region rows to {output_path}")
    return output_path
