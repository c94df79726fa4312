"""Plant models; importing this package registers every plant and derived signal."""

from app.core.plants import mountain_car, synthetic, uuv
from app.core.plants.base import BasePlant
from app.core.plants.mountain_car import MountainCarPlant, step_mc
from app.core.plants.synthetic import HoldPlant, ShiftPlant, ToyPlant
from app.core.plants.uuv import UuvPlant, step_uuv

__all__ = [
    "BasePlant",
    "HoldPlant",
    "MountainCarPlant",
    "ShiftPlant",
    "ToyPlant",
    "UuvPlant",
    "mountain_car",
    "step_mc",
    "step_uuv",
    "synthetic",
    "uuv",
]
