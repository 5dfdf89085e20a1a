import logging

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from scipy import fft

from config import SYMMETRY_TOL
from errors import ConfigurationError, NumericRangeError, ResolutionError, SectorMismatchError

logger = logging.getLogger(__name__)

FOUR_PI_SQ = 4 * np.pi ** 2


class SectorTag(str, Enum):
    """Symmetry sector of a real field on the bi-torus."""

    # Even in x and in y separately: cos(kx)cos(jy)
    S = "S"
    # Even under (x, y) -> (-x, -y): adds sin(kx)sin(jy)
    E = "E"


def _frozen(array) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Real function on the bi-torus, stored as coefficients of the plain products
    cos(kx)cos(jy) (``cc``, 0 <= k, j <= N) and sin(kx)sin(jy) (``ss``,
    1 <= k, j <= N, E-sector only). Arrays are copied and frozen on construction.
    """

    sector: SectorTag
    cc: np.ndarray
    ss: np.ndarray | None = None

    def __post_init__(self):
        sector = SectorTag(self.sector)
        cc = _frozen(self.cc)
        if cc.ndim != 2 or cc.shape[0] != cc.shape[1] or cc.shape[0] == 0:
            raise SectorMismatchError(f"Cosine block must be a non-empty square array, got shape {cc.shape}.")
        N = cc.shape[0] - 1

        if sector is SectorTag.S:
            if self.ss is not None and np.any(np.asarray(self.ss) != 0):
                raise SectorMismatchError("S-sector fields cannot carry sin(kx)sin(jy) modes.")
            ss = None
        else:
            ss = np.zeros((N, N)) if self.ss is None else np.asarray(self.ss, dtype=float)
            if ss.shape != (N, N):
                raise SectorMismatchError(f"Sine block must have shape {(N, N)}, got {ss.shape}.")
            ss = _frozen(ss)

        if not np.all(np.isfinite(cc)) or (ss is not None and not np.all(np.isfinite(ss))):
            raise NumericRangeError("Spectral coefficients must be finite.")

        object.__setattr__(self, "sector", sector)
        object.__setattr__(self, "cc", cc)
        object.__setattr__(self, "ss", ss)

    @property
    def N(self) -> int:
        return self.cc.shape[0] - 1

    @property
    def sine_block(self) -> np.ndarray:
        """The ss block, as zeros for S-sector fields."""
        return self.ss if self.ss is not None else np.zeros((self.N, self.N))

    @classmethod
    def zeros(cls, sector: SectorTag, N: int) -> "SpectralField":
        return cls(sector, np.zeros((N + 1, N + 1)))

    @classmethod
    def constant(cls, value: float, sector: SectorTag, N: int) -> "SpectralField":
        cc = np.zeros((N + 1, N + 1))
        cc[0, 0] = value
        return cls(sector, cc)

    @classmethod
    def from_modes(cls,
                   sector: SectorTag,
                   N: int,
                   cc: dict[tuple[int, int], float] | None = None,
                   ss: dict[tuple[int, int], float] | None = None) -> "SpectralField":
        """
        Build a field from sparse mode dictionaries.

        :param sector: Target sector.
        :param N: Truncation.
        :param cc: Map (k, j) -> coefficient of cos(kx)cos(jy).
        :param ss: Map (k, j) -> coefficient of sin(kx)sin(jy), k, j >= 1.
        :return: The field.
        """
        cc_block = np.zeros((N + 1, N + 1))
        for (k, j), value in (cc or {}).items():
            cc_block[k, j] = value

        ss_block = None
        if ss:
            ss_block = np.zeros((N, N))
            for (k, j), value in ss.items():
                if k < 1 or j < 1:
                    raise SectorMismatchError(f"Sine mode ({k}, {j}) does not exist.")
                ss_block[k - 1, j - 1] = value

        return cls(sector, cc_block, ss_block)

    def cos_coefficient(self, k: int, j: int) -> float:
        return float(self.cc[k, j])

    def sin_coefficient(self, k: int, j: int) -> float:
        if self.ss is None:
            return 0.0
        return float(self.ss[k - 1, j - 1])

    def check_compatible(self, other: "SpectralField"):
        if self.sector is not other.sector or self.N != other.N:
            raise SectorMismatchError(
                f"Fields are incompatible: ({self.sector.value}, N={self.N}) vs ({other.sector.value}, N={other.N})."
            )

    def _combine(self, other: "SpectralField", op: Callable) -> "SpectralField":
        self.check_compatible(other)
        ss = None if self.ss is None else op(self.ss, other.ss)
        return SpectralField(self.sector, op(self.cc, other.cc), ss)

    def _scale(self, factor: float) -> "SpectralField":
        ss = None if self.ss is None else factor * self.ss
        return SpectralField(self.sector, factor * self.cc, ss)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return self._combine(other, np.add)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return self._combine(other, np.subtract)

    def __neg__(self) -> "SpectralField":
        return self._scale(-1.0)

    def __mul__(self, factor: float) -> "SpectralField":
        return self._scale(float(factor))

    __rmul__ = __mul__

    def __truediv__(self, factor: float) -> "SpectralField":
        return self._scale(1.0 / float(factor))

    def to_sector(self, sector: SectorTag) -> "SpectralField":
        """Embed an S-sector field into the E-sector, or restrict an E-sector field without sine modes."""
        sector = SectorTag(sector)
        if sector is self.sector:
            return self
        if sector is SectorTag.E:
            return SpectralField(SectorTag.E, self.cc, np.zeros((self.N, self.N)))
        if np.any(self.ss != 0):
            raise SectorMismatchError("Field has sin(kx)sin(jy) modes and does not lie in the S-sector.")
        return SpectralField(SectorTag.S, self.cc)

    def resized(self, N: int) -> "SpectralField":
        """Zero-pad or truncate to truncation N."""
        n = min(N, self.N)
        cc = np.zeros((N + 1, N + 1))
        cc[:n + 1, :n + 1] = self.cc[:n + 1, :n + 1]
        ss = None
        if self.ss is not None:
            ss = np.zeros((N, N))
            ss[:n, :n] = self.ss[:n, :n]
        return SpectralField(self.sector, cc, ss)

    def to_vector(self) -> np.ndarray:
        """Coordinates in the orthonormal basis, ordered as basis_map."""
        cc_weights, ss_weight = parseval_weights(self.N)
        parts = [(self.cc * np.sqrt(cc_weights)).ravel()]
        if self.ss is not None:
            parts.append((self.ss * np.sqrt(ss_weight)).ravel())
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, vector: np.ndarray, sector: SectorTag, N: int) -> "SpectralField":
        sector = SectorTag(sector)
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (basis_dimension(sector, N),):
            raise SectorMismatchError(f"Vector of shape {vector.shape} does not match ({sector.value}, N={N}).")

        cc_weights, ss_weight = parseval_weights(N)
        n_cc = (N + 1) ** 2
        cc = vector[:n_cc].reshape(N + 1, N + 1) / np.sqrt(cc_weights)
        ss = None
        if sector is SectorTag.E:
            ss = vector[n_cc:].reshape(N, N) / np.sqrt(ss_weight)
        return cls(sector, cc, ss)


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid with M nodes per direction, x_m = 2*pi*m/M."""

    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ResolutionError(f"Grid must have at least one node, got M={self.M}.")

    @property
    def nodes(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    @property
    def quadrature_weight(self) -> float:
        return FOUR_PI_SQ / self.M ** 2

    @classmethod
    def for_truncation(cls, N: int, degree: int = 1) -> "TorusGrid":
        """
        Smallest transform-friendly grid on which the Galerkin projection of a
        degree-``degree`` product of truncation-N fields is exact.
        """
        return cls(fft.next_fast_len((degree + 1) * N + 1))


def parseval_weights(N: int) -> tuple[np.ndarray, float]:
    """
    Return the L2 norms squared of the basis functions.

    :param N: Truncation.
    :return: (cc weights of shape (N+1, N+1), weight of every ss mode).
    """
    weights = np.full((N + 1, N + 1), np.pi ** 2)
    weights[0, :] *= 2
    weights[:, 0] *= 2
    return weights, np.pi ** 2


def basis_dimension(sector: SectorTag, N: int) -> int:
    return (N + 1) ** 2 + (N * N if SectorTag(sector) is SectorTag.E else 0)


def basis_map(sector: SectorTag, N: int) -> tuple[tuple[str, int, int], ...]:
    """Row/column meaning of vectors and matrices: cc modes row-major, then ss modes row-major."""
    modes = [("cc", k, j) for k in range(N + 1) for j in range(N + 1)]
    if SectorTag(sector) is SectorTag.E:
        modes += [("ss", k, j) for k in range(1, N + 1) for j in range(1, N + 1)]
    return tuple(modes)


def wavenumber_squares(sector: SectorTag, N: int) -> np.ndarray:
    """k^2 + j^2 for every basis function, in basis_map order."""
    k = np.arange(N + 1)
    kk = (k[:, None] ** 2 + k[None, :] ** 2).astype(float)
    parts = [kk.ravel()]
    if SectorTag(sector) is SectorTag.E:
        parts.append(kk[1:, 1:].ravel())
    return np.concatenate(parts)


@lru_cache(maxsize=64)
def trig_tables(N: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    """cos(k x_m) and sin(k x_m), shape (M, N+1)."""
    angles = np.outer(TorusGrid(M).nodes, np.arange(N + 1))
    return _frozen(np.cos(angles)), _frozen(np.sin(angles))


def coeff_to_nodal(f: SpectralField, grid: TorusGrid) -> np.ndarray:
    """
    Evaluate a field at every grid node.

    :param f: The field.
    :param grid: Grid with M >= 2N+1.
    :return: Array of shape (M, M), axis 0 is x and axis 1 is y.
    """
    if grid.M < 2 * f.N + 1:
        raise ResolutionError(f"Grid with M={grid.M} cannot represent a truncation-{f.N} field.")

    cos_table, sin_table = trig_tables(f.N, grid.M)
    values = cos_table @ f.cc @ cos_table.T
    if f.ss is not None and f.N > 0:
        sin_table = sin_table[:, 1:]
        values = values + sin_table @ f.ss @ sin_table.T
    return values


def _reflect(values: np.ndarray, axis: int) -> np.ndarray:
    # Maps node m to node -m (mod M)
    return np.roll(np.flip(values, axis), 1, axis)


def sector_asymmetry(values: np.ndarray, sector: SectorTag) -> float:
    """Largest violation of the sector symmetry among nodal values."""
    if SectorTag(sector) is SectorTag.S:
        return float(max(np.max(np.abs(values - _reflect(values, 0))),
                         np.max(np.abs(values - _reflect(values, 1)))))
    return float(np.max(np.abs(values - _reflect(_reflect(values, 0), 1))))


def nodal_to_coeff(values: np.ndarray,
                   sector: SectorTag,
                   N: int,
                   check_symmetry: bool = True) -> SpectralField:
    """
    Project nodal values onto the truncated sector basis. Exact when the values
    sample a trigonometric polynomial whose degree the grid resolves.

    :param values: Square array of nodal values.
    :param sector: Claimed symmetry sector.
    :param N: Target truncation.
    :param check_symmetry: Verify the claimed symmetry to the configured tolerance.
    :return: The projected field.
    """
    sector = SectorTag(sector)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ResolutionError(f"Nodal values must be a square array, got shape {values.shape}.")
    M = values.shape[0]
    if M < 2 * N + 1:
        raise ResolutionError(f"Grid with M={M} cannot represent a truncation-{N} field.")

    if check_symmetry:
        asymmetry = sector_asymmetry(values, sector)
        scale = max(1.0, float(np.max(np.abs(values))))
        if asymmetry > SYMMETRY_TOL * scale:
            raise SectorMismatchError(
                f"Nodal values violate the {sector.value}-sector symmetry by {asymmetry:.3e}."
            )

    coeffs = fft.fft2(values) / M ** 2
    cc = np.zeros((N + 1, N + 1))
    cc[0, 0] = coeffs[0, 0].real
    ss = None
    if N > 0:
        cc[1:, 0] = 2 * coeffs[1:N + 1, 0].real
        cc[0, 1:] = 2 * coeffs[0, 1:N + 1].real
        positive = coeffs[1:N + 1, 1:N + 1]
        negative = coeffs[1:N + 1, M - np.arange(1, N + 1)]
        cc[1:, 1:] = 2 * (positive + negative).real
        if sector is SectorTag.E:
            ss = 2 * (negative - positive).real
    elif sector is SectorTag.E:
        ss = np.zeros((0, 0))

    return SpectralField(sector, cc, ss)


def laplacian_apply(f: SpectralField) -> SpectralField:
    k = np.arange(f.N + 1)
    symbol = -(k[:, None] ** 2 + k[None, :] ** 2).astype(float)
    ss = None if f.ss is None else f.ss * symbol[1:, 1:]
    return SpectralField(f.sector, f.cc * symbol, ss)


def field_map(f: SpectralField, func: Callable[[np.ndarray], np.ndarray], degree: int) -> SpectralField:
    """
    Apply a pointwise function and project back onto truncation N.

    :param f: The field.
    :param func: Nodal map preserving the sector symmetry.
    :param degree: Polynomial degree of func, used to size the grid.
    :return: The projected image.
    """
    grid = TorusGrid.for_truncation(f.N, degree)
    values = coeff_to_nodal(f, grid)
    with np.errstate(over="ignore", invalid="ignore"):
        mapped = func(values)
    if not np.all(np.isfinite(mapped)):
        raise NumericRangeError(f"Nodal values overflowed (max |f| = {np.max(np.abs(values)):.3e}).")
    return nodal_to_coeff(mapped, f.sector, f.N, check_symmetry=False)


def field_power(f: SpectralField, q: int) -> SpectralField:
    """Galerkin truncation of f**q, computed on an alias-free grid."""
    if q < 1:
        raise ConfigurationError(f"Power must be a positive integer, got {q}.")
    if q == 1:
        return f
    return field_map(f, lambda values: values ** q, q)


def field_product(f: SpectralField, h: SpectralField) -> SpectralField:
    f.check_compatible(h)
    grid = TorusGrid.for_truncation(f.N, 2)
    values = coeff_to_nodal(f, grid) * coeff_to_nodal(h, grid)
    return nodal_to_coeff(values, f.sector, f.N, check_symmetry=False)


def inner_product(f: SpectralField, h: SpectralField) -> float:
    f.check_compatible(h)
    cc_weights, ss_weight = parseval_weights(f.N)
    value = np.sum(cc_weights * f.cc * h.cc)
    if f.ss is not None:
        value += ss_weight * np.sum(f.ss * h.ss)
    return float(value)


def l2_norm(f: SpectralField) -> float:
    return float(np.sqrt(max(inner_product(f, f), 0.0)))


def quadrature(values: np.ndarray) -> float:
    """Integral over the torus of nodal values by the trapezoidal rule."""
    M = values.shape[0]
    return float(FOUR_PI_SQ / M ** 2 * np.sum(values))


def nodal_minimum(f: SpectralField, refinement: int = 4) -> float:
    """Minimum of the field on a grid ``refinement`` times finer than the truncation."""
    grid = TorusGrid(fft.next_fast_len(refinement * f.N + 1))
    return float(np.min(coeff_to_nodal(f, grid)))


def reflect_y(f: SpectralField) -> SpectralField:
    """The field evaluated at (x, -y)."""
    ss = None if f.ss is None else -f.ss
    return SpectralField(f.sector, f.cc, ss)


def shift_half_period(f: SpectralField, axis: int) -> SpectralField:
    """The field evaluated at (x + pi, y) for axis 0, or (x, y + pi) for axis 1."""
    signs = (-1.0) ** np.arange(f.N + 1)
    if axis == 0:
        cc = f.cc * signs[:, None]
        ss = None if f.ss is None else f.ss * signs[1:, None]
    else:
        cc = f.cc * signs[None, :]
        ss = None if f.ss is None else f.ss * signs[None, 1:]
    return SpectralField(f.sector, cc, ss)


def swap_axes(f: SpectralField) -> SpectralField:
    """The field evaluated at (y, x)."""
    ss = None if f.ss is None else f.ss.T
    return SpectralField(f.sector, f.cc.T, ss)


def random_field(sector: SectorTag, N: int, rng: np.random.Generator, decay: float = 2.0) -> SpectralField:
    """
    Random field with normal coefficients damped by (1 + k^2 + j^2)^(-decay/2).

    :param sector: Target sector.
    :param N: Truncation.
    :param rng: Source of randomness.
    :param decay: Damping exponent.
    :return: The field, normalized to unit L2 norm.
    """
    k = np.arange(N + 1)
    damping = (1.0 + k[:, None] ** 2 + k[None, :] ** 2) ** (-decay / 2)
    cc = rng.standard_normal((N + 1, N + 1)) * damping
    ss = None
    if SectorTag(sector) is SectorTag.E:
        ss = rng.standard_normal((N, N)) * damping[1:, 1:]
    field = SpectralField(sector, cc, ss)
    return field / l2_norm(field)


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
]
