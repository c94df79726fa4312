from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

CONTROLLER_FORMAT_VERSION = 1


class LayerDocument(BaseModel):
    """One dense layer: row-major weights of shape (outputs, inputs) plus bias."""

    model_config = ConfigDict(extra="forbid")

    shape: tuple[int, int] = Field(description="(outputs, inputs)")
    activation: Literal["tanh", "sigmoid", "identity"] = Field(description="Elementwise activation")
    weights: list[float] = Field(description="Row-major weight entries")
    bias: list[float] = Field(description="Bias entries, one per output")


class ControllerDocument(BaseModel):
    """Versioned structured-text form of a feed-forward controller."""

    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = Field(default=CONTROLLER_FORMAT_VERSION, description="File format version")
    input_dim: int = Field(gt=0, description="Observation dimension")
    output_dim: int = Field(gt=0, description="Raw action dimension")
    layers: list[LayerDocument] = Field(min_length=1, description="Layers from input to output")
