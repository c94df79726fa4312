"""
Registry pattern implementation for plants, derived signals and repair optimizers.

This module provides a centralized registry system that follows the Open/Closed Principle,
allowing new plants and repair methods to be added without modifying existing factory code.
"""

from collections.abc import Callable, Mapping
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from app.core.plants.base import BasePlant
    from app.core.services.annealing import RepairOptimizer

SignalFunction = Callable[[Mapping[str, np.ndarray]], np.ndarray]

# Global registries for plants, derived signals and repair optimizers
plant_registry: dict[str, type["BasePlant"]] = {}
signal_registry: dict[str, SignalFunction] = {}
optimizer_registry: dict[str, type["RepairOptimizer"]] = {}


def register_plant(name: str) -> Callable[[type["BasePlant"]], type["BasePlant"]]:
    """
    Decorator to register a plant class in the global registry.

    Args:
        name: Unique name for the plant (e.g., "uuv", "mc")

    Returns:
        Decorator function that registers the class

    Example:
        @register_plant("uuv")
        class UuvPlant(BasePlant):
            pass
    """

    def decorator(cls: type["BasePlant"]) -> type["BasePlant"]:
        plant_registry[name] = cls
        return cls

    return decorator


def register_signal(name: str) -> Callable[[SignalFunction], SignalFunction]:
    """
    Decorator to register a named nonlinear signal usable inside STL predicates.

    The function receives a mapping from state-variable name to an array of values
    (any leading shape) and returns an array of the same shape.

    Args:
        name: Signal name as it appears in formula text (e.g., "pipe_distance")

    Returns:
        Decorator function that registers the signal
    """

    def decorator(fn: SignalFunction) -> SignalFunction:
        signal_registry[name] = fn
        return fn

    return decorator


def register_optimizer(name: str) -> Callable[[type["RepairOptimizer"]], type["RepairOptimizer"]]:
    """
    Decorator to register a repair optimizer (the inner step of the repair driver).

    Args:
        name: Method name used on the command line (e.g., "isar", "plain-sa", "grad")

    Returns:
        Decorator function that registers the class
    """

    def decorator(cls: type["RepairOptimizer"]) -> type["RepairOptimizer"]:
        optimizer_registry[name] = cls
        return cls

    return decorator


def get_plant_class(name: str) -> type["BasePlant"]:
    """
    Get a plant class from the registry.

    Raises:
        KeyError: If plant is not found in registry
    """
    if name not in plant_registry:
        raise KeyError(f"Plant '{name}' not found in registry. Available: {list(plant_registry.keys())}")

    return plant_registry[name]


def get_signal(name: str) -> SignalFunction:
    """
    Get a derived signal function from the registry.

    Raises:
        KeyError: If signal is not found in registry
    """
    if name not in signal_registry:
        raise KeyError(f"Signal '{name}' not found in registry. Available: {list(signal_registry.keys())}")

    return signal_registry[name]


def get_optimizer_class(name: str) -> type["RepairOptimizer"]:
    """
    Get a repair optimizer class from the registry.

    Raises:
        KeyError: If optimizer is not found in registry
    """
    if name not in optimizer_registry:
        raise KeyError(f"Optimizer '{name}' not found in registry. Available: {list(optimizer_registry.keys())}")

    return optimizer_registry[name]


def list_registered_plants() -> list[str]:
    """Get a list of all registered plant names."""
    return list(plant_registry.keys())


def list_registered_optimizers() -> list[str]:
    """Get a list of all registered optimizer names."""
    return list(optimizer_registry.keys())


# Factory function for convenience
def get_plant(name: str) -> "BasePlant":
    """
    Factory function to get a plant instance by name.

    Args:
        name: Name of the plant (case-insensitive)

    Returns:
        Plant instance

    Raises:
        KeyError: If plant is not found in registry
    """
    plant_class = get_plant_class(name.lower())
    return plant_class()
