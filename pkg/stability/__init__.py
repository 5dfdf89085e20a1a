from .operators import *
from .krein import *
from .jl_spectrum import *
from .analysis import *

__all__ = [
    "StandingWave",
    "OperatorMatrix",
    "SpectrumCounts",
    "assemble_L1",
    "assemble_L2",
    "assemble_L",
    "shifted_laplacian",
    "eig_sym",
    "pseudo_solve",
    "solve_in_range",
    "quadratic_form_inverse",
    "apply_operator",
    "complement_minimum",
    "Verdict",
    "KreinReport",
    "kernel_basis_L",
    "apply_J",
    "build_V",
    "krein_verdict",
    "analyze_krein",
    "JLSpectrumReport",
    "ConsistencyRecord",
    "assemble_JL",
    "quartet_defect",
    "squared_spectrum_defect",
    "classify_spectrum",
    "jl_report",
    "verdict_crosscheck",
    "ComparisonItem",
    "StabilityAnalysis",
    "analyze_wave",
]
