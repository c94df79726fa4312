"""
Feed-forward neural controllers: parameters, forward pass and weight files.

The flat parameter vector theta lists, layer by layer, the row-major weights followed
by the bias. Repair optimizers work on that vector and rebuild controllers from it.
"""

from __future__ import annotations

import hashlib
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np
import yaml
from loguru import logger
from pydantic import ValidationError
from scipy.special import expit

from app.core.exceptions import ControllerError, DimensionMismatchError
from app.schemas.controller import ControllerDocument, LayerDocument


class Activation(StrEnum):
    TANH = "tanh"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"

    def apply(self, values: np.ndarray) -> np.ndarray:
        if self is Activation.TANH:
            return np.tanh(values)
        if self is Activation.SIGMOID:
            return expit(values)
        return values


@dataclass(frozen=True)
class DenseLayer:
    weight: np.ndarray
    bias: np.ndarray
    activation: Activation

    def __post_init__(self) -> None:
        weight = np.array(self.weight, dtype=float)
        bias = np.array(self.bias, dtype=float)
        if weight.ndim != 2 or bias.ndim != 1 or weight.shape[0] != bias.shape[0]:
            raise ControllerError(
                f"Layer weight {weight.shape} and bias {bias.shape} do not chain",
                {"weight_shape": list(weight.shape), "bias_shape": list(bias.shape)},
            )
        if not (np.all(np.isfinite(weight)) and np.all(np.isfinite(bias))):
            raise ControllerError("Controller parameters must be finite")
        weight.setflags(write=False)
        bias.setflags(write=False)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "activation", Activation(self.activation))

    @property
    def n_params(self) -> int:
        return self.weight.size + self.bias.size


@dataclass(frozen=True)
class MlpParams:
    """Immutable controller parameters; safe to share across threads."""

    layers: tuple[DenseLayer, ...]

    def __post_init__(self) -> None:
        layers = tuple(self.layers)
        if not layers:
            raise ControllerError("A controller needs at least one layer")
        for previous, current in zip(layers, layers[1:], strict=False):
            if current.weight.shape[1] != previous.weight.shape[0]:
                raise ControllerError(
                    f"Layer input {current.weight.shape[1]} does not match previous output {previous.weight.shape[0]}",
                )
        object.__setattr__(self, "layers", layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0].weight.shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].weight.shape[0]

    @property
    def n_params(self) -> int:
        return sum(layer.n_params for layer in self.layers)

    def to_vector(self) -> np.ndarray:
        """Flatten into theta (weights row-major, then bias, per layer)."""
        parts: list[np.ndarray] = []
        for layer in self.layers:
            parts.append(layer.weight.ravel())
            parts.append(layer.bias)
        return np.concatenate(parts)

    def with_vector(self, theta: np.ndarray) -> MlpParams:
        """Controller with the same architecture and the given flat parameters."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise DimensionMismatchError(
                f"Parameter vector has shape {theta.shape}, expected ({self.n_params},)",
            )
        layers: list[DenseLayer] = []
        offset = 0
        for layer in self.layers:
            w_size = layer.weight.size
            weight = theta[offset : offset + w_size].reshape(layer.weight.shape)
            offset += w_size
            bias = theta[offset : offset + layer.bias.size]
            offset += layer.bias.size
            layers.append(DenseLayer(weight, bias, layer.activation))
        return MlpParams(tuple(layers))

    def digest(self) -> str:
        """Content hash of the parameters, used as a cache key."""
        hasher = hashlib.sha256()
        for layer in self.layers:
            hasher.update(layer.activation.value.encode())
            hasher.update(np.ascontiguousarray(layer.weight).tobytes())
            hasher.update(np.ascontiguousarray(layer.bias).tobytes())
        return hasher.hexdigest()[:16]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MlpParams):
            return NotImplemented
        return len(self.layers) == len(other.layers) and all(
            a.activation == b.activation
            and a.weight.shape == b.weight.shape
            and np.array_equal(a.weight, b.weight)
            and np.array_equal(a.bias, b.bias)
            for a, b in zip(self.layers, other.layers, strict=True)
        )

    def __hash__(self) -> int:
        return hash(self.digest())

    @classmethod
    def build(
        cls,
        sizes: Sequence[int],
        activations: Sequence[Activation | str],
        rng: np.random.Generator | None = None,
        scale: float = 1.0,
    ) -> MlpParams:
        """
        Create a controller with the given layer sizes.

        Args:
            sizes: Layer widths including input and output, e.g. (2, 32, 32, 1)
            activations: One activation per layer (len(sizes) - 1 entries)
            rng: Generator for Glorot-uniform weights; all-zero parameters when None
            scale: Multiplier applied to the random weights

        Returns:
            New controller
        """
        if len(activations) != len(sizes) - 1:
            raise ControllerError(f"Need {len(sizes) - 1} activations, got {len(activations)}")
        layers: list[DenseLayer] = []
        for fan_in, fan_out, activation in zip(sizes[:-1], sizes[1:], activations, strict=True):
            if rng is None:
                weight = np.zeros((fan_out, fan_in))
            else:
                limit = scale * np.sqrt(6.0 / (fan_in + fan_out))
                weight = rng.uniform(-limit, limit, size=(fan_out, fan_in))
            layers.append(DenseLayer(weight, np.zeros(fan_out), Activation(activation)))
        return cls(tuple(layers))


def controller_eval(params: MlpParams, obs: np.ndarray) -> np.ndarray:
    """
    Forward pass of the network.

    Args:
        params: Controller parameters
        obs: Observation of shape (..., input_dim)

    Returns:
        Raw network output of shape (..., output_dim); plants scale and clamp it

    Raises:
        DimensionMismatchError: If the observation dimension differs from input_dim
    """
    values = np.asarray(obs, dtype=float)
    if values.shape[-1:] != (params.input_dim,):
        raise DimensionMismatchError(
            f"Observation has dimension {values.shape[-1:]}, controller expects {params.input_dim}",
        )
    for layer in params.layers:
        values = layer.activation.apply(values @ layer.weight.T + layer.bias)
    return values


def to_document(params: MlpParams) -> ControllerDocument:
    return ControllerDocument(
        input_dim=params.input_dim,
        output_dim=params.output_dim,
        layers=[
            LayerDocument(
                shape=layer.weight.shape,
                activation=layer.activation.value,
                weights=[float(w) for w in layer.weight.ravel()],
                bias=[float(b) for b in layer.bias],
            )
            for layer in params.layers
        ],
    )


def from_document(document: ControllerDocument) -> MlpParams:
    layers: list[DenseLayer] = []
    for index, layer in enumerate(document.layers):
        rows, cols = layer.shape
        if len(layer.weights) != rows * cols or len(layer.bias) != rows:
            raise ControllerError(
                f"Layer {index} entries do not match its declared shape {layer.shape}",
                {"layer": index},
            )
        layers.append(DenseLayer(np.array(layer.weights).reshape(rows, cols), np.array(layer.bias), layer.activation))
    params = MlpParams(tuple(layers))
    if params.input_dim != document.input_dim or params.output_dim != document.output_dim:
        raise ControllerError(
            "Declared input/output dimensions do not match the layers",
            {"input_dim": document.input_dim, "output_dim": document.output_dim},
        )
    return params


def save_controller(params: MlpParams, path: Path) -> Path:
    """Write a controller weight file (YAML, shortest round-trip float repr)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        yaml.safe_dump(to_document(params).model_dump(mode="json"), f, sort_keys=False)
    logger.debug(f"Saved controller with {params.n_params} parameters to {path}")
    return path


def load_controller(path: Path) -> MlpParams:
    """
    Read a controller weight file.

    Raises:
        ControllerError: If the file is missing, malformed or holds non-finite values
    """
    path = Path(path)
    if not path.exists():
        raise ControllerError(f"Controller file not found at {path}", {"path": str(path)})
    try:
        with path.open() as f:
            document = ControllerDocument.model_validate(yaml.safe_load(f))
    except (yaml.YAMLError, ValidationError) as e:
        raise ControllerError(f"Invalid controller file {path}: {e}", {"path": str(path)}, e) from e
    params = from_document(document)
    logger.info(f"Loaded controller from {path} ({params.n_params} parameters)")
    return params
