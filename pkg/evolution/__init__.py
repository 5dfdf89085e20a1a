from .split_step import *

__all__ = [
    "ComplexTorusField",
    "ConservedQuantities",
    "EvolutionTrace",
    "strang_step",
    "conserved_quantities",
    "deviation",
    "evolve_perturbed",
]
