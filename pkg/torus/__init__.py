from .spectral import *
from .galerkin import *

__all__ = [
    "FOUR_PI_SQ",
    "SectorTag",
    "SpectralField",
    "TorusGrid",
    "parseval_weights",
    "basis_dimension",
    "basis_map",
    "wavenumber_squares",
    "trig_tables",
    "coeff_to_nodal",
    "nodal_to_coeff",
    "sector_asymmetry",
    "laplacian_apply",
    "field_map",
    "field_power",
    "field_product",
    "inner_product",
    "l2_norm",
    "quadrature",
    "nodal_minimum",
    "reflect_y",
    "shift_half_period",
    "swap_axes",
    "random_field",
    "basis_values",
    "operator_grid",
    "multiplication_matrix",
    "schrodinger_matrix",
]
