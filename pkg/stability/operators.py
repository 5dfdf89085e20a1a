import logging

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from scipy import linalg

from config import EIGEN_TOL_FLOOR, EIGEN_TOL_RELATIVE, SOLVABILITY_TOL
from errors import ContractViolation, SectorMismatchError, SolvabilityError
from torus import (
    SectorTag,
    SpectralField,
    basis_map,
    inner_product,
    schrodinger_matrix,
    wavenumber_squares,
)

logger = logging.getLogger(__name__)

# Relative asymmetry above which an assembled operator is reported
SYMMETRY_REPORT_TOL = 1e-12


class StandingWave(Protocol):
    p: int
    c: float
    field: SpectralField


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix of a linear operator in the orthonormal sector basis."""

    entries: np.ndarray
    symmetric: bool
    basis: tuple[tuple, ...]
    built_from: str
    sector: SectorTag
    N: int
    symmetrization_defect: float = 0.0

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float, copy=True)
        entries.setflags(write=False)
        if entries.shape != (len(self.basis), len(self.basis)):
            raise SectorMismatchError(f"Matrix of shape {entries.shape} does not match a basis of {len(self.basis)}.")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_entries(cls, entries: np.ndarray, sector: SectorTag, N: int, built_from: str) -> "OperatorMatrix":
        """Wrap an arbitrary single-block matrix, detecting symmetry."""
        entries = np.asarray(entries, dtype=float)
        scale = max(float(np.max(np.abs(entries))), np.finfo(float).tiny)
        defect = float(np.max(np.abs(entries - entries.T))) / scale
        return cls(entries, defect <= SYMMETRY_REPORT_TOL, basis_map(sector, N), built_from, SectorTag(sector), N, defect)


@dataclass(frozen=True, eq=False)
class SpectrumCounts:
    """Inertia of a symmetric operator at tolerance ``tol``."""

    n: int
    z: int
    positive: int
    tol: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sector: SectorTag
    N: int

    @property
    def kernel_mask(self) -> np.ndarray:
        return np.abs(self.eigenvalues) <= self.tol

    @property
    def kernel_vectors(self) -> np.ndarray:
        """Orthonormal kernel basis as columns."""
        return self.eigenvectors[:, self.kernel_mask]

    def kernel_fields(self) -> list[SpectralField]:
        return [SpectralField.from_vector(v, self.sector, self.N) for v in self.kernel_vectors.T]


def _assemble(wave: StandingWave, coefficient: float, tag: str) -> OperatorMatrix:
    raw = schrodinger_matrix(wave.field, wave.c, wave.p, coefficient)
    scale = max(float(np.max(np.abs(raw))), np.finfo(float).tiny)
    defect = float(np.max(np.abs(raw - raw.T))) / scale
    if defect > SYMMETRY_REPORT_TOL:
        logger.warning(f"[{tag} p={wave.p} c={wave.c:.6g}] assembled matrix asymmetric by {defect:.3e}")

    field = wave.field
    return OperatorMatrix((raw + raw.T) / 2, True, basis_map(field.sector, field.N), tag,
                          field.sector, field.N, defect)


def assemble_L1(wave: StandingWave) -> OperatorMatrix:
    """L1 = -Delta + c - (p+1) phi^p."""
    return _assemble(wave, wave.p + 1, "L1")


def assemble_L2(wave: StandingWave) -> OperatorMatrix:
    """L2 = -Delta + c - phi^p."""
    return _assemble(wave, 1, "L2")


def assemble_L(L1: OperatorMatrix, L2: OperatorMatrix) -> OperatorMatrix:
    """Block diagonal operator diag(L1, L2) acting on stacked pairs (w1, w2)."""
    basis = tuple(("w1",) + mode for mode in L1.basis) + tuple(("w2",) + mode for mode in L2.basis)
    return OperatorMatrix(linalg.block_diag(L1.entries, L2.entries), L1.symmetric and L2.symmetric,
                          basis, "L", L1.sector, L1.N,
                          max(L1.symmetrization_defect, L2.symmetrization_defect))


def shifted_laplacian(sector: SectorTag, N: int, shift: float) -> OperatorMatrix:
    """-Delta + shift."""
    return OperatorMatrix.from_entries(np.diag(wavenumber_squares(sector, N) + shift), sector, N,
                                       f"-Delta+{shift:g}")


def eig_sym(A: OperatorMatrix, tol: float | None = None) -> SpectrumCounts:
    """
    Full symmetric eigendecomposition with inertia counts.

    :param A: Symmetric operator.
    :param tol: Kernel tolerance; max(1e-8, 1e-10 * spectral radius) by default.
    :return: The counts, eigenvalues in ascending order and eigenvectors as columns.
    """
    if not A.symmetric:
        raise ContractViolation(f"eig_sym needs a symmetric operator, {A.built_from} is not.")

    eigenvalues, eigenvectors = linalg.eigh(A.entries)
    if tol is None:
        radius = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
        tol = max(EIGEN_TOL_FLOOR, EIGEN_TOL_RELATIVE * radius)

    n = int(np.sum(eigenvalues < -tol))
    z = int(np.sum(np.abs(eigenvalues) <= tol))
    return SpectrumCounts(n, z, eigenvalues.size - n - z, float(tol), eigenvalues, eigenvectors, A.sector, A.N)


def pseudo_solve(spectrum: SpectrumCounts, rhs: np.ndarray) -> np.ndarray:
    """
    Minimum-norm solution of A x = rhs with the kernel projected out.

    :param spectrum: Eigendecomposition of A.
    :param rhs: Right-hand side in orthonormal coordinates.
    :return: The solution vector.
    """
    coefficients = spectrum.eigenvectors.T @ rhs
    kernel = spectrum.kernel_mask
    rhs_norm = float(np.linalg.norm(rhs))
    projection = float(np.linalg.norm(coefficients[kernel])) / rhs_norm if rhs_norm > 0 else 0.0
    if projection > SOLVABILITY_TOL:
        raise SolvabilityError(projection)

    coefficients[kernel] = 0.0
    divisors = np.where(kernel, 1.0, spectrum.eigenvalues)
    return spectrum.eigenvectors @ (coefficients / divisors)


def solve_in_range(A: OperatorMatrix, rhs: SpectralField, spectrum: SpectrumCounts | None = None) -> SpectralField:
    """
    Solve A x = rhs in the orthogonal complement of the numerical kernel.

    :param A: Symmetric operator.
    :param rhs: Right-hand side, orthogonal to the kernel of A.
    :param spectrum: Precomputed eig_sym(A), if available.
    :return: The minimum-norm solution.
    """
    if rhs.sector is not A.sector or rhs.N != A.N:
        raise SectorMismatchError(f"Right-hand side does not live in the basis of {A.built_from}.")
    spectrum = spectrum or eig_sym(A)

    b = rhs.to_vector()
    x = pseudo_solve(spectrum, b)

    kernel = spectrum.kernel_vectors
    target = b - kernel @ (kernel.T @ b)
    defect = float(np.linalg.norm(A.entries @ x - target))
    if defect > 1e-9 * max(float(np.linalg.norm(b)), np.finfo(float).tiny):
        logger.warning(f"[{A.built_from}] range solve residual {defect:.3e} exceeds tolerance")

    return SpectralField.from_vector(x, A.sector, A.N)


def quadratic_form_inverse(A: OperatorMatrix, f: SpectralField, spectrum: SpectrumCounts | None = None) -> float:
    """<A^-1 f, f> with A inverted on its range."""
    return inner_product(solve_in_range(A, f, spectrum), f)


def apply_operator(A: OperatorMatrix, f: SpectralField) -> SpectralField:
    return SpectralField.from_vector(A.entries @ f.to_vector(), A.sector, A.N)


def complement_minimum(A: OperatorMatrix, f: SpectralField) -> float:
    """Minimum of <A Q, Q> over unit Q orthogonal to f."""
    basis = linalg.null_space(f.to_vector()[None, :])
    return float(linalg.eigvalsh(basis.T @ A.entries @ basis)[0])


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
]
