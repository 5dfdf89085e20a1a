from .equation import *
from .stokes import *
from .continuation import *
from .minimizer import *

__all__ = [
    "residual",
    "BranchKind",
    "StokesWave",
    "equilibrium_level",
    "bifurcation_frequency",
    "generator_field",
    "generator_amplitude",
    "solvability_c2",
    "closed_form_c2",
    "expected_inverse_form",
    "stokes_wave",
    "stokes_residual_order",
    "WaveBranchPoint",
    "Branch",
    "newton_solve_fixed_amplitude",
    "continue_branch",
    "d_phi_dc",
    "mass_derivative",
    "MinimizerSettings",
    "MinimizerRun",
    "PositivityReport",
    "B_c",
    "constraint_integral",
    "restrict_to_generator",
    "positivity_and_phase_check",
    "align_to_reference",
    "minimize",
]
