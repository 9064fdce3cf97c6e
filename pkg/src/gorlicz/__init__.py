"""Generalized Orlicz spaces on grids: Phi-functions, Luxemburg norms,
fractional maximal and Riesz operators, commutators and BMO."""

from . import bmo, conditions, grid, norms, operators, phi, transform
from .grid import Cube, CubeFamily, Grid, GridFunction, cube_family, make_grid
from .norms import GridNorm, luxemburg_norm, modular
from .phi import PhiSpec, conjugate, double_phase, load_phi, phi_from_dict, power, variable_exponent
from .transform import power_scale, regularize, sharp_alpha, target_psi

__version__ = "0.1.0"

__all__ = [
    "bmo", "conditions", "grid", "norms", "operators", "phi", "transform",
    "Cube", "CubeFamily", "Grid", "GridFunction", "cube_family", "make_grid",
    "GridNorm", "luxemburg_norm", "modular",
    "PhiSpec", "conjugate", "double_phase", "load_phi", "phi_from_dict", "power", "variable_exponent",
    "power_scale", "regularize", "sharp_alpha", "target_psi",
]
