"""
Command-line entry point.

    isar verify     --config uuv-small
    isar repair     --config uuv-small --seed 7 --threads 4 --out runs/uuv-small
    isar baseline   --config uuv-small --method grad
    isar synthesize --config mc-small --out controllers/
    isar report     runs/uuv-small/report.yaml
    isar plot-data  runs/uuv-small/regions_after.json
"""

import argparse
import json
import sys
from pathlib import Path

from loguru import logger

# Import core module to trigger registry auto-discovery
import app.core  # noqa: F401
from app.config import settings
from app.core.controller import save_controller
from app.core.exceptions import RepairToolkitError
from app.core.services import experiment
from app.core.services.reporting import emit_plot_data, report_render
from app.workers.pool import WorkPool

SEED_CONTROLLER_FILE = "seed_controller.yaml"


def configure_logging(level: str | None = None) -> None:
    logger.remove()
    logger.add(sys.stderr, format=settings.LOG_FORMAT, level=level or settings.LOG_LEVEL)


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="Config file or preset name")
    parser.add_argument("--seed", type=int, help="Override the config seed")
    parser.add_argument("--threads", type=int, help="Work-pool size (default: logical CPU count)")
    parser.add_argument("--out", type=Path, help="Artifact directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isar", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--log-level", help=f"Log level (default {settings.LOG_LEVEL})")
    parser.add_argument("--version", action="version", version=settings.APP_VERSION)
    commands = parser.add_subparsers(dest="command", required=True)

    _add_run_options(commands.add_parser("verify", help="Verify and classify every region"))
    _add_run_options(commands.add_parser("repair", help="Incremental repair with preservation"))
    baseline = commands.add_parser("baseline", help="Run a comparison method through the same driver")
    _add_run_options(baseline)
    baseline.add_argument("--method", required=True, choices=["grad", "plain-sa"])
    _add_run_options(commands.add_parser("synthesize", help="Write a seed controller for the configured plant"))

    report = commands.add_parser("report", help="Render a report as a table")
    report.add_argument("path", type=Path)
    plot = commands.add_parser("plot-data", help="Write the region grid of a snapshot as CSV")
    plot.add_argument("path", type=Path)
    plot.add_argument("--out", type=Path, help="CSV path (default: next to the snapshot)")
    return parser


METHODS = {"verify": "verify-only", "repair": "isar"}


def _run_phase(args: argparse.Namespace) -> Path:
    method = args.method if args.command == "baseline" else METHODS[args.command]
    config = experiment.load_experiment_config(
        args.config,
        seed=args.seed,
        threads=args.threads,
        output_dir=str(args.out) if args.out else None,
        method=method,
    )
    out_dir = experiment.run(config, args.out)
    if args.command != "verify":
        sys.stdout.write(report_render(out_dir / "report.yaml"))
    return out_dir


def _synthesize(args: argparse.Namespace) -> Path:
    config = experiment.load_experiment_config(args.config, seed=args.seed, threads=args.threads)
    resolved = experiment.Experiment(config.model_copy(update={"controller": None}))
    with WorkPool(config.threads) as pool:
        params = resolved.controller(pool)
    out_dir = Path(args.out or settings.OUTPUT_DIR)
    path = out_dir / SEED_CONTROLLER_FILE
    save_controller(params, path)
    logger.info(f"Seed controller {params.digest()} written to {path}")
    return path


def _error_dir(args: argparse.Namespace) -> Path | None:
    """Run commands record failures in --out, or the settings output directory without it."""
    if args.command in ("report", "plot-data"):
        return None
    return Path(args.out or settings.OUTPUT_DIR)


def _write_error(error: RepairToolkitError, out_dir: Path | None) -> None:
    record = error.to_record()
    text = json.dumps(record, indent=2, default=str)
    if out_dir is not None:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "error.json").write_text(text + "\n")
        except OSError as e:
            logger.warning(f"Could not write error record to {out_dir}: {e}")
    sys.stderr.write(text + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        if args.command == "report":
            sys.stdout.write(report_render(args.path))
        elif args.command == "plot-data":
            emit_plot_data(args.path, args.out)
        elif args.command == "synthesize":
            _synthesize(args)
        else:
            _run_phase(args)
    except RepairToolkitError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        _write_error(e, _error_dir(args))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
