"""Numerical detection of virtual levels (threshold resonances) of Schroedinger operators."""

from .errors import ThresholdScopeError
from .jost import SpectralPoint, jost_minus, jost_plus, wronskian
from .lapnorm import WeightPair, lap_sweep
from .numerics import Grid, Tolerance
from .potentials import Potential
from .resolvent import bound_states, detect_virtual_level

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "Potential",
    "SpectralPoint",
    "ThresholdScopeError",
    "Tolerance",
    "WeightPair",
    "bound_states",
    "detect_virtual_level",
    "jost_minus",
    "jost_plus",
    "lap_sweep",
    "wronskian",
]
