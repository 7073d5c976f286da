"""Zeno and anti-Zeno dynamics of two-qubit correlations in a lossy cavity."""

from ._backend import backend_name
from .model import (
    AmplitudeState,
    FullDensity,
    InconsistentStateError,
    InitialState,
    InvalidParameterError,
    LorentzianSpectrum,
    PhysicalParams,
    WrongRegimeError,
    XStateDensity,
    build_initial,
    reduce_to_xstate,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeState",
    "FullDensity",
    "InconsistentStateError",
    "InitialState",
    "InvalidParameterError",
    "LorentzianSpectrum",
    "PhysicalParams",
    "WrongRegimeError",
    "XStateDensity",
    "backend_name",
    "build_initial",
    "reduce_to_xstate",
    "__version__",
]
