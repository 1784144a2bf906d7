"""Grids, fields, transforms, norms, and multiplier calculus."""

from .field import (SpectralField, from_function, inverse_transform, physical,
                    reality_defect, transform, zero_field)
from .grid import Grid
from .norms import (h1_norm, l2_inner, l2_norm, linf_norm, parseval_defect,
                    sobolev_norm, sobolev_weights)
from .operators import (apply_laplacian, boundary_mass_fraction, compose_shear,
                        ddx, ddy, dealias, divergence, invert_laplacian,
                        invert_sheared_laplacian, is_commensurate, multiply,
                        project_cone, project_nonzero_x, shift_frame, velocity,
                        x_antiderivative)
from .serial import load_field, save_field

__all__ = [
    "Grid", "SpectralField", "transform", "inverse_transform", "physical",
    "from_function", "zero_field", "reality_defect",
    "sobolev_norm", "sobolev_weights", "l2_norm", "h1_norm", "l2_inner",
    "linf_norm", "parseval_defect",
    "invert_laplacian", "invert_sheared_laplacian", "apply_laplacian",
    "ddx", "ddy", "velocity", "divergence", "x_antiderivative",
    "project_nonzero_x", "project_cone", "dealias", "multiply",
    "compose_shear", "shift_frame", "is_commensurate",
    "boundary_mass_fraction",
    "save_field", "load_field",
]
