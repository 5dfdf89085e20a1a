import logging

from dataclasses import dataclass
from enum import Enum

import numpy as np

from scipy import linalg

from config import EIGEN_TOL_FLOOR, EIGEN_TOL_RELATIVE, SOLVABILITY_TOL
from errors import SolvabilityError
from torus import SpectralField
from .operators import SpectrumCounts, pseudo_solve

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class KreinReport:
    """
    Index bookkeeping n(L) - n(V) - z(V) over a kernel basis theta of L.
    ``theta`` holds stacked pairs (w1, w2) as columns.
    """

    zL: int
    theta: np.ndarray
    V: np.ndarray
    V_symmetry_defect: float
    V_tol: float
    nV: int
    zV: int
    nL: int
    rhs_index: int
    verdict: Verdict
    inconsistent: bool
    orthogonality_premise: bool
    orthogonality_defect: float
    obstruction: int | None = None


def kernel_basis_L(spectrum1: SpectrumCounts, spectrum2: SpectrumCounts) -> np.ndarray:
    """Columns (v, 0) for v in Ker(L1), then (0, w) for w in Ker(L2)."""
    kernel1, kernel2 = spectrum1.kernel_vectors, spectrum2.kernel_vectors
    dim1, dim2 = spectrum1.eigenvalues.size, spectrum2.eigenvalues.size
    theta = np.zeros((dim1 + dim2, kernel1.shape[1] + kernel2.shape[1]))
    theta[:dim1, :kernel1.shape[1]] = kernel1
    theta[dim1:, kernel1.shape[1]:] = kernel2
    return theta


def apply_J(stacked: np.ndarray) -> np.ndarray:
    """J (w1, w2) = (-w2, w1) on stacked columns."""
    half = stacked.shape[0] // 2
    return np.concatenate([-stacked[half:], stacked[:half]])


def build_V(spectrum1: SpectrumCounts, spectrum2: SpectrumCounts, theta: np.ndarray) -> tuple[np.ndarray, float]:
    """
    V_jl = <L^-1 J theta_j, J theta_l>, solving blockwise on the ranges of L1 and L2.

    :return: (symmetrized V, largest entry of |V - V^T| before symmetrization).
    """
    dim1 = spectrum1.eigenvalues.size
    j_theta = apply_J(theta)

    solutions = np.zeros_like(j_theta)
    for j in range(theta.shape[1]):
        try:
            solutions[:dim1, j] = pseudo_solve(spectrum1, j_theta[:dim1, j])
            solutions[dim1:, j] = pseudo_solve(spectrum2, j_theta[dim1:, j])
        except SolvabilityError as e:
            raise SolvabilityError(e.projection, j) from e

    V = solutions.T @ j_theta
    defect = float(np.max(np.abs(V - V.T))) if V.size else 0.0
    return (V + V.T) / 2, defect


def krein_verdict(nL: int, nV: int, zV: int) -> tuple[int, Verdict, bool]:
    """
    :return: (n(L) - n(V) - z(V), verdict by parity, inconsistency flag).
    """
    rhs_index = nL - nV - zV
    if rhs_index < 0:
        return rhs_index, Verdict.INCONCLUSIVE, True
    if rhs_index == 0:
        return rhs_index, Verdict.STABLE, False
    if rhs_index % 2 == 1:
        return rhs_index, Verdict.UNSTABLE, False
    return rhs_index, Verdict.INCONCLUSIVE, False


def analyze_krein(wave_field: SpectralField,
                  nL: int,
                  spectrum1: SpectrumCounts,
                  spectrum2: SpectrumCounts) -> KreinReport:
    """
    Build theta and V for a wave and evaluate the index.

    :param wave_field: The wave profile.
    :param nL: Negative count of the block operator L.
    :param spectrum1: eig_sym(L1).
    :param spectrum2: eig_sym(L2).
    :return: The report; a solvability obstruction is recorded rather than raised.
    """
    theta = kernel_basis_L(spectrum1, spectrum2)
    zL = theta.shape[1]

    phi = wave_field.to_vector()
    kernel1 = spectrum1.kernel_vectors
    orthogonality_defect = float(np.max(np.abs(kernel1.T @ phi))) / float(np.linalg.norm(phi)) if kernel1.size else 0.0

    try:
        V, defect = build_V(spectrum1, spectrum2, theta)
    except SolvabilityError as e:
        logger.warning(f"[Krein] kernel vector {e.theta_index} obstructs the range solve ({e.projection:.3e})")
        return KreinReport(zL, theta, np.zeros((0, 0)), 0.0, 0.0, 0, 0, nL, nL,
                           Verdict.INCONCLUSIVE, False, orthogonality_defect <= SOLVABILITY_TOL,
                           orthogonality_defect, e.theta_index)

    if zL:
        eigenvalues = linalg.eigvalsh(V)
        V_tol = max(EIGEN_TOL_FLOOR, EIGEN_TOL_RELATIVE * float(np.max(np.abs(eigenvalues))))
        nV = int(np.sum(eigenvalues < -V_tol))
        zV = int(np.sum(np.abs(eigenvalues) <= V_tol))
    else:
        V_tol, nV, zV = EIGEN_TOL_FLOOR, 0, 0

    rhs_index, verdict, inconsistent = krein_verdict(nL, nV, zV)
    if inconsistent:
        logger.warning(f"[Krein] negative index n(L)={nL}, n(V)={nV}, z(V)={zV}")

    return KreinReport(zL, theta, V, defect, V_tol, nV, zV, nL, rhs_index, verdict, inconsistent,
                       orthogonality_defect <= SOLVABILITY_TOL, orthogonality_defect)


__all__ = [
    "Verdict",
    "KreinReport",
    "kernel_basis_L",
    "apply_J",
    "build_V",
    "krein_verdict",
    "analyze_krein",
]
