import numpy as np

from app.config import settings
from app.core.controller import MlpParams
from app.core.exceptions import DivergenceError
from app.core.plants.base import BasePlant
from app.core.verifier.interval import IntervalBox, interval_activation, interval_affine


def controller_box(params: MlpParams, box: IntervalBox) -> IntervalBox:
    """Interval enclosure of the network output over an observation box."""
    for layer in params.layers:
        box = interval_activation(interval_affine(box, layer.weight, layer.bias), layer.activation)
    return box


def propagate_box(
    plant: BasePlant,
    params: MlpParams,
    box0: IntervalBox,
    T: int,
    cap: float | None = None,
) -> list[IntervalBox]:
    """
    Reachable-set enclosures box_0 .. box_T of the closed loop.

    box0 may carry leading batch dimensions; every step keeps them.

    Raises:
        DivergenceError: If any bound exceeds the magnitude cap
    """
    cap = settings.DIVERGENCE_CAP if cap is None else cap
    boxes = [box0]
    box = box0
    for t in range(T):
        actions = plant.act_box(controller_box(params, plant.observe_box(box)))
        box = plant.step_box(box, actions)
        magnitude = max(float(np.max(np.abs(box.lower))), float(np.max(np.abs(box.upper))))
        if magnitude > cap:
            raise DivergenceError(
                f"Reachable set bounds reached {magnitude:.3g} at step {t + 1}, above cap {cap:g}",
                {"step": t + 1, "cap": cap},
            )
        boxes.append(box)
    return boxes
