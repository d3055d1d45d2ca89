"""Numerical laboratory for Toeplitz and composition operators on weighted Bergman spaces.

Every verdict produced here comes from finite grids and truncations: it is
numerical evidence about a limit statement, not a proof.
"""
from . import composition, geometry, kernels, numerics, toeplitz, weights
from .composition import SelfMap
from .errors import LabError
from .toeplitz import MeasureSpec
from .weights import RadialWeight

__version__ = "0.1.0"

__all__ = ["LabError", "MeasureSpec", "RadialWeight", "SelfMap", "composition", "geometry",
           "kernels", "numerics", "toeplitz", "weights", "__version__"]
