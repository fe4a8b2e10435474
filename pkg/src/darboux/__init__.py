"""Quantum motion on the two-dimensional Darboux spaces: geometry, special
functions, propagators, closed-form solutions and numerical checks."""
from .geometry import Chart, SpaceId, SpaceParams, SystemId
from .kernels import UNITS, PhysicalConstants

__all__ = ["Chart", "SpaceId", "SpaceParams", "SystemId", "PhysicalConstants", "UNITS"]
__version__ = "0.1.0"
