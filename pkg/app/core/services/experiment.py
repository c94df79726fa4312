"""
Experiment orchestration: load a config, run a phase, persist the artifact directory.

Artifacts written into the output directory:

    config.yaml            resolved configuration
    weights_initial.yaml   controller the run started from
    weights_final.yaml     controller after repair
    verification_log.jsonl one record per region and phase
    iteration_log.jsonl    one record per optimizer iteration
    report.yaml            results table data
    regions_before.json    classification snapshot before repair (and .csv grid)
    regions_after.json     classification snapshot after repair (and .csv grid)
"""

from collections.abc import Iterable
from pathlib import Path

import numpy as np
import yaml
from loguru import logger
from pydantic import BaseModel, ValidationError

from app.config import settings
from app.core.controller import MlpParams, load_controller, save_controller
from app.core.energy import EnergyConfig
from app.core.exceptions import ConfigError, DimensionMismatchError
from app.core.plants.base import BasePlant
from app.core.region import PartitionState, Region, partition
from app.core.registry import get_plant
from app.core.services.annealing import AnnealConfig
from app.core.services.gradient import GradientConfig
from app.core.services.repair import RepairOutcome, RepairService, RepairSettings
from app.core.services.reporting import emit_plot_data
from app.core.stl import StlFormula, parse_formula
from app.core.synthesis import synthesize_seed_controller
from app.schemas.experiment import ExperimentConfig
from app.schemas.region import PartitionSnapshot, RegionRecord
from app.workers.pool import WorkPool


def resolve_config_path(name_or_path: str | Path) -> Path:
    """Accept a file path or the name of a preset in settings.PRESETS_DIR."""
    path = Path(name_or_path)
    if path.exists():
        return path
    preset = Path(settings.PRESETS_DIR) / f"{name_or_path}.yaml"
    if preset.exists():
        return preset
    raise ConfigError(f"No config file or preset named '{name_or_path}'", {"config": str(name_or_path)})


def _field_errors(error: ValidationError) -> list[str]:
    return [f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}" for e in error.errors()]


def load_experiment_config(name_or_path: str | Path, **overrides: object) -> ExperimentConfig:
    """
    Read and validate an experiment config; non-None overrides replace file values.

    Raises:
        ConfigError: Listing every invalid field by dotted path
    """
    path = resolve_config_path(name_or_path)
    try:
        with path.open() as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse config {path}: {e}", {"path": str(path)}, e) from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must be a mapping", {"path": str(path)})
    data.update({key: value for key, value in overrides.items() if value is not None})
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        errors = _field_errors(e)
        raise ConfigError(f"Invalid config {path}: " + "; ".join(errors), {"errors": errors}, e) from e
    logger.debug(f"Loaded config {path} for plant {config.plant}")
    return config


class Experiment:
    """Objects resolved from an ExperimentConfig."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config
        try:
            self.plant: BasePlant = get_plant(config.plant)
        except KeyError as e:
            raise ConfigError(f"plant: {e.args[0]}", {"errors": [f"plant: {e.args[0]}"]}, e) from e
        self.formula: StlFormula = parse_formula(config.formula or self.plant.formula, self.plant.state_names)
        lower = config.initial_lower or list(self.plant.initial_lower)
        upper = config.initial_upper or list(self.plant.initial_upper)
        steps = config.steps or list(self.plant.partition_steps)
        if len(lower) != len(self.plant.free_dims):
            raise ConfigError(
                f"initial_lower: {self.plant.name} has {len(self.plant.free_dims)} free initial coordinates",
                {"errors": ["initial_lower"]},
            )
        self.regions: list[Region] = partition(lower, upper, steps)

    @property
    def free_names(self) -> list[str]:
        return [self.plant.state_names[i] for i in self.plant.free_dims]

    def repair_settings(self) -> RepairSettings:
        c = self.config
        return RepairSettings(
            K=c.K,
            seed=c.seed,
            refine_depth=c.refine_depth,
            epsilon=c.epsilon,
            max_rounds=c.max_rounds,
            max_attempts=c.max_attempts,
            record_timing=c.record_timing,
        )

    def energy_config(self) -> EnergyConfig:
        return EnergyConfig(lam=self.config.lam, barrier_floor=self.config.barrier_floor, K=self.config.K)

    def anneal_config(self) -> AnnealConfig:
        c = self.config
        return AnnealConfig(sigma=c.sigma, tau0=c.tau0, alpha=c.alpha, max_iter=c.max_iter, seed=c.seed)

    def gradient_config(self) -> GradientConfig:
        g = self.config.gradient
        return GradientConfig(etas=tuple(g.etas), steps=g.steps, fd_step=g.fd_step, beta=g.beta)

    def controller(self, pool: WorkPool | None = None) -> MlpParams:
        """Load the configured controller or synthesize one from the seed."""
        if self.config.controller is not None:
            params = load_controller(Path(self.config.controller))
        else:
            s = self.config.synthesis
            params = synthesize_seed_controller(
                self.plant, self.formula, s.budget, self.config.seed, s.grid_points, s.step_size, pool
            )
        if params.input_dim != self.plant.obs_dim:
            raise DimensionMismatchError(
                f"Controller expects {params.input_dim} inputs, {self.plant.name} observes {self.plant.obs_dim}",
            )
        return params


def snapshot(state: PartitionState, plant: BasePlant, phase: str) -> PartitionSnapshot:
    """Serializable classification of every region."""
    free = list(plant.free_dims)
    return PartitionSnapshot(
        plant=plant.name,
        phase=phase,
        free_names=[plant.state_names[i] for i in free],
        regions=[
            RegionRecord(
                id=region.id,
                lower=list(region.lower),
                upper=list(region.upper),
                verified=bool(state.flags[region.id]),
                region_class=state.region_class(region.id).value,
                min_rob=float(np.min(state.robustness[region.id])),
                samples=state.samples[region.id][:, free].tolist(),
                robustness=state.robustness[region.id].tolist(),
            )
            for region in state.regions
        ],
    )


def _write_yaml(path: Path, model: BaseModel, exclude: set[str] | None = None) -> None:
    with path.open("w") as f:
        yaml.safe_dump(model.model_dump(mode="json", exclude=exclude), f, sort_keys=False, allow_unicode=True)


def _write_jsonl(path: Path, records: Iterable[BaseModel]) -> None:
    with path.open("w") as f:
        for record in records:
            f.write(record.model_dump_json() + "\n")


def write_artifacts(
    out_dir: Path,
    experiment: Experiment,
    initial: MlpParams,
    outcome: RepairOutcome,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_yaml(out_dir / "config.yaml", experiment.config, exclude={"output_dir", "threads"})
    save_controller(initial, out_dir / "weights_initial.yaml")
    save_controller(outcome.params, out_dir / "weights_final.yaml")
    _write_jsonl(out_dir / "verification_log.jsonl", outcome.verification)
    _write_jsonl(out_dir / "iteration_log.jsonl", outcome.iterations)
    _write_yaml(out_dir / "report.yaml", outcome.report)

    phases = [("before", outcome.before), ("after", outcome.after)]
    for phase, state in phases:
        if state is None:
            continue
        path = out_dir / f"regions_{phase}.json"
        path.write_text(snapshot(state, experiment.plant, phase).model_dump_json() + "\n")
        emit_plot_data(path)
    logger.info(f"Artifacts written to {out_dir}")


def run(config: ExperimentConfig, out_dir: Path | None = None) -> Path:
    """
    Execute the configured phase and write the artifact directory.

    Returns:
        Path of the artifact directory
    """
    out_dir = Path(out_dir or config.output_dir or Path(settings.OUTPUT_DIR) / f"{config.plant}-{config.method}")
    experiment = Experiment(config)
    logger.info(
        f"Running {config.method} on {experiment.plant.name}: {len(experiment.regions)} regions, "
        f"K={config.K}, seed={config.seed}",
    )
    with WorkPool(config.threads) as pool:
        initial = experiment.controller(pool)
        service = RepairService(
            experiment.plant,
            experiment.formula,
            experiment.repair_settings(),
            experiment.energy_config(),
            experiment.anneal_config(),
            experiment.gradient_config(),
            pool,
        )
        method = None if config.method == "verify-only" else config.method
        outcome = service.run(initial, experiment.regions, method)
    write_artifacts(out_dir, experiment, initial, outcome)
    return out_dir
