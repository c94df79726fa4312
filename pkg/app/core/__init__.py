"""
Core module initialization with auto-discovery for registry pattern.

Importing this package registers every plant, derived signal and repair optimizer.
"""

# Import all plants to trigger registration (plants register their signals)
from app.core import plants  # noqa: F401

# Import all optimizers to trigger registration
from app.core.services import annealing, gradient  # noqa: F401

# Import registry for convenience
from app.core.registry import (  # noqa: F401
    get_optimizer_class,
    get_plant,
    list_registered_optimizers,
    list_registered_plants,
)
