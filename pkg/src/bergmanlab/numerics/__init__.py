"""Shared numerical kernels: quadrature, root finding, winding numbers, spectra."""
from .quadrature import (
    BOUNDARY_OFFSETS,
    DEFAULT_SPEC,
    UNIT_DISC,
    PolarPatch,
    QuadratureSpec,
    adaptive_gl,
    gauss_legendre,
    integrate_disc,
    integrate_radial,
    integrate_toward_zero,
    polar_tensor_rule,
    richardson_to_boundary,
    unit_interval_rule,
)
from .roots import aberth_roots
from .series import SeriesTail, geometric_tail_bound, power_series_on_circle
from .winding import count_preimages, winding_number
from .linalg import hermitian_eigenvalues

__all__ = [
    "BOUNDARY_OFFSETS", "DEFAULT_SPEC", "UNIT_DISC", "PolarPatch", "QuadratureSpec",
    "SeriesTail", "aberth_roots", "adaptive_gl", "count_preimages", "gauss_legendre",
    "geometric_tail_bound", "hermitian_eigenvalues", "integrate_disc", "integrate_radial",
    "integrate_toward_zero", "polar_tensor_rule", "power_series_on_circle",
    "richardson_to_boundary", "unit_interval_rule", "winding_number",
]
