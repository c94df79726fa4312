from app.core.verifier.interval import (
    IntervalBox,
    interval_activation,
    interval_affine,
    interval_clip,
    interval_mul,
    interval_trig,
)

__all__ = [
    "IntervalBox",
    "interval_activation",
    "interval_affine",
    "interval_clip",
    "interval_mul",
    "interval_trig",
]
