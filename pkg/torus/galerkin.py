from functools import lru_cache

import numpy as np

from scipy import fft

from errors import NumericRangeError
from .spectral import (
    SectorTag,
    SpectralField,
    TorusGrid,
    coeff_to_nodal,
    parseval_weights,
    trig_tables,
    wavenumber_squares,
)


@lru_cache(maxsize=16)
def basis_values(sector: SectorTag, N: int, M: int) -> np.ndarray:
    """
    Orthonormal basis functions sampled on an M x M grid.

    :return: Read-only array of shape (M*M, dim), columns in basis_map order.
    """
    cos_table, sin_table = trig_tables(N, M)
    cc_weights, ss_weight = parseval_weights(N)

    columns = [np.einsum("mk,nj->mnkj", cos_table, cos_table).reshape(M * M, -1)
               / np.sqrt(cc_weights.ravel())]
    if SectorTag(sector) is SectorTag.E and N > 0:
        sines = sin_table[:, 1:]
        columns.append(np.einsum("mk,nj->mnkj", sines, sines).reshape(M * M, -1) / np.sqrt(ss_weight))

    values = np.hstack(columns)
    values.setflags(write=False)
    return values


def operator_grid(N: int, p: int) -> TorusGrid:
    """Grid on which phi**p * e_i * e_l is integrated exactly."""
    return TorusGrid(fft.next_fast_len((p + 2) * N + 1))


def multiplication_matrix(potential: np.ndarray, sector: SectorTag, N: int) -> np.ndarray:
    """
    Galerkin matrix of multiplication by a function given at grid nodes.

    :param potential: Nodal values on a square grid.
    :param sector: Basis sector.
    :param N: Truncation.
    :return: Matrix with entries <V e_i, e_l> in the orthonormal basis.
    """
    M = potential.shape[0]
    basis = basis_values(SectorTag(sector), N, M)
    weighted = basis * (TorusGrid(M).quadrature_weight * potential.ravel())[:, None]
    return basis.T @ weighted


def schrodinger_matrix(field: SpectralField, c: float, p: int, coefficient: float) -> np.ndarray:
    """
    Matrix of -Delta + c - coefficient * field**p in the orthonormal sector basis.

    :param field: The wave profile.
    :param c: Frequency.
    :param p: Power of the nonlinearity.
    :param coefficient: Factor in front of field**p, p+1 for L1 and 1 for L2.
    :return: Dense (unsymmetrized) matrix.
    """
    grid = operator_grid(field.N, p)
    values = coeff_to_nodal(field, grid)
    with np.errstate(over="ignore"):
        potential = values ** p
    if not np.all(np.isfinite(potential)):
        raise NumericRangeError("Potential overflowed while assembling the operator.")

    matrix = -coefficient * multiplication_matrix(potential, field.sector, field.N)
    matrix[np.diag_indices_from(matrix)] += wavenumber_squares(field.sector, field.N) + c
    return matrix


__all__ = [
    "basis_values",
    "operator_grid",
    "multiplication_matrix",
    "schrodinger_matrix",
]
