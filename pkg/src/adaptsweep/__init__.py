"""Adaptive frequency sampling for rational surrogates of multiport frequency responses."""

from .core import (
    BarycentricModel,
    FrequencyGrid,
    PoleResidueModel,
    SampleSet,
    SingularResolventError,
    StateSpaceModel,
    evaluate_model,
    make_grid,
)
from .oracle import PlaybackOracle, SyntheticRationalSystem, load_touchstone, make_synthetic

__version__ = "0.1.0"

__all__ = [
    "BarycentricModel",
    "FrequencyGrid",
    "PlaybackOracle",
    "PoleResidueModel",
    "SampleSet",
    "SingularResolventError",
    "StateSpaceModel",
    "SyntheticRationalSystem",
    "evaluate_model",
    "load_touchstone",
    "make_grid",
    "make_synthetic",
]
