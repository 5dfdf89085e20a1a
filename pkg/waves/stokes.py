import logging

from dataclasses import dataclass
from enum import Enum
from math import comb, factorial

import numpy as np

from errors import ConfigurationError, UnsupportedOrderError
from torus import (
    SectorTag,
    SpectralField,
    field_power,
    field_product,
    inner_product,
    l2_norm,
    nodal_minimum,
)
from .equation import residual

logger = logging.getLogger(__name__)

# Truncation used for the solvability projection; every mode involved has k, j <= 3
SOLVABILITY_TRUNCATION = 4


class BranchKind(str, Enum):
    """Mode generating a bifurcating branch."""

    SS = "ss"          # cos(x)cos(y)
    EPLUS = "eplus"    # cos(x + y)
    EMINUS = "eminus"  # cos(x - y)

    @property
    def sector(self) -> SectorTag:
        return SectorTag.S if self is BranchKind.SS else SectorTag.E


def equilibrium_level(p: int) -> float:
    return (2 / p) ** (1 / p)


def bifurcation_frequency(p: int) -> float:
    return 2 / p


def generator_field(branch: BranchKind, N: int) -> SpectralField:
    branch = BranchKind(branch)
    match branch:
        case BranchKind.SS:
            return SpectralField.from_modes(SectorTag.S, N, cc={(1, 1): 1.0})
        case BranchKind.EPLUS:
            # cos(x + y) = cos x cos y - sin x sin y
            return SpectralField.from_modes(SectorTag.E, N, cc={(1, 1): 1.0}, ss={(1, 1): -1.0})
        case BranchKind.EMINUS:
            return SpectralField.from_modes(SectorTag.E, N, cc={(1, 1): 1.0}, ss={(1, 1): 1.0})


def generator_amplitude(field: SpectralField, branch: BranchKind) -> float:
    """Coefficient of the generator mode: the L2 projection onto it divided by its norm squared."""
    generator = generator_field(branch, field.N).to_sector(field.sector)
    return inner_product(field, generator) / inner_product(generator, generator)


def _invert_shifted_laplacian(rhs: SpectralField) -> SpectralField:
    """Solve (-Delta - 2) u = rhs mode by mode, setting the kernel modes (k^2 + j^2 = 2) to zero."""
    k = np.arange(rhs.N + 1)
    symbol = (k[:, None] ** 2 + k[None, :] ** 2 - 2).astype(float)
    kernel = symbol == 0
    symbol[kernel] = 1.0

    cc = rhs.cc / symbol
    cc[kernel] = 0.0
    ss = None
    if rhs.ss is not None:
        ss = rhs.ss / symbol[1:, 1:]
        ss[kernel[1:, 1:]] = 0.0
    return SpectralField(rhs.sector, cc, ss)


def _second_order_parts(p: int, branch: BranchKind, N: int) -> tuple[SpectralField, SpectralField, SpectralField]:
    """
    Return (phi1, base, unit) with phi2 = base + c2 * unit, from
    (-Delta - 2) phi2 = -c2 phi0 + C(p+1, 2) phi0^(p-1) phi1^2.
    """
    sector = branch.sector
    phi0 = equilibrium_level(p)
    phi1 = generator_field(branch, N)

    quadratic = comb(p + 1, 2) * phi0 ** (p - 1)
    base = _invert_shifted_laplacian(quadratic * field_power(phi1, 2))
    unit = _invert_shifted_laplacian(SpectralField.constant(-phi0, sector, N))
    return phi1, base, unit


def _third_order_rhs(p: int, phi1: SpectralField, phi2: SpectralField, c2: float) -> SpectralField:
    """-c2 phi1 + p(p+1) phi0^(p-1) phi1 phi2 + C(p+1, 3) phi0^(p-2) phi1^3."""
    phi0 = equilibrium_level(p)
    rhs = -c2 * phi1 + p * (p + 1) * phi0 ** (p - 1) * field_product(phi1, phi2)
    if p >= 2:
        rhs = rhs + comb(p + 1, 3) * phi0 ** (p - 2) * field_power(phi1, 3)
    return rhs


def solvability_c2(p: int, branch: BranchKind) -> float:
    """
    Frequency correction c2 selected by orthogonality of the third-order
    right-hand side to the generator. The condition is affine in c2.

    :param p: Power of the nonlinearity.
    :param branch: Generating mode.
    :return: c2.
    """
    if p < 1:
        raise ConfigurationError(f"p must be a positive integer, got {p}.")
    branch = BranchKind(branch)

    phi1, base, unit = _second_order_parts(p, branch, SOLVABILITY_TRUNCATION)

    def projection(c2: float) -> float:
        return inner_product(_third_order_rhs(p, phi1, base + c2 * unit, c2), phi1)

    r0 = projection(0.0)
    r1 = projection(1.0)
    return -r0 / (r1 - r0)


def closed_form_c2(p: int, branch: BranchKind) -> float | None:
    """
    Published closed forms for c2, kept as cross-checks only. The S-sector
    form contains (p-2)! and is undefined for p = 1.
    """
    branch = BranchKind(branch)
    phi0_base = 2 / p
    if branch is BranchKind.SS:
        if p < 2:
            return None
        first = p * (p + 1) / 192 * phi0_base ** (2 * (p - 1) / p) * factorial(p + 1) / factorial(p - 1)
        second = 3 / 32 * phi0_base ** ((p - 2) / p) * factorial(p + 1) / factorial(p - 2)
        return -(first + second) / p

    return (5 / 48 * p * (p + 1) ** 2 * phi0_base ** (2 * (p - 1) / p)
            + (p - 1) * (p + 1) / 8 * phi0_base ** ((p - 2) / p))


def expected_inverse_form(p: int, branch: BranchKind, c: float) -> float:
    """Published leading-order value of (L1^-1 phi, phi)."""
    branch = BranchKind(branch)
    if branch is BranchKind.SS:
        return -(2 / p) ** (2 / p) * (c + 2 - 2 / p) * np.pi ** 2
    if p == 1:
        return -16 * c * np.pi ** 2
    return -(2 / p) ** (2 / p) * (c + 2) * np.pi ** 2


@dataclass(frozen=True, eq=False)
class StokesWave:
    p: int
    branch: BranchKind
    a: float
    order: int
    field: SpectralField
    c: float
    c2: float
    nodal_min: float

    @property
    def sector(self) -> SectorTag:
        return self.branch.sector

    @property
    def positive(self) -> bool:
        return self.nodal_min > 0


def stokes_wave(p: int, branch: BranchKind, a: float, order: int, N: int) -> StokesWave:
    """
    Truncated Stokes expansion phi0 + a phi1 + a^2 phi2 (+ a^3 phi3) with c = 2/p + c2 a^2.

    :param p: Power of the nonlinearity.
    :param branch: Generating mode.
    :param a: Amplitude of the generator mode.
    :param order: Highest power of a included, 2 or 3 (3 only for p = 1).
    :param N: Truncation, at least 3.
    :return: The expansion.
    """
    branch = BranchKind(branch)
    if p < 1:
        raise ConfigurationError(f"p must be a positive integer, got {p}.")
    if N < 3:
        raise ConfigurationError(f"Stokes waves need N >= 3, got N={N}.")
    if order not in (2, 3):
        raise UnsupportedOrderError(f"Order must be 2 or 3, got {order}.")
    if order == 3 and p != 1:
        raise UnsupportedOrderError(f"Third-order terms are only available for p=1, got p={p}.")

    c2 = solvability_c2(p, branch)
    phi1, base, unit = _second_order_parts(p, branch, N)
    phi2 = base + c2 * unit

    field = SpectralField.constant(equilibrium_level(p), branch.sector, N) + a * phi1 + a ** 2 * phi2
    if order == 3:
        phi3 = _invert_shifted_laplacian(_third_order_rhs(p, phi1, phi2, c2))
        field = field + a ** 3 * phi3

    minimum = nodal_minimum(field)
    if minimum <= 0:
        logger.warning(f"[Stokes p={p} {branch.value}] a={a} is beyond the positivity radius (min {minimum:.3e})")

    return StokesWave(p, branch, float(a), order, field, bifurcation_frequency(p) + c2 * a ** 2, c2, minimum)


def stokes_residual_order(p: int,
                          branch: BranchKind,
                          N: int = 8,
                          order: int = 2,
                          amplitudes: np.ndarray | None = None) -> float:
    """
    Log-log slope of the stationary residual of the expansion against a.

    :param p: Power of the nonlinearity.
    :param branch: Generating mode.
    :param N: Truncation.
    :param order: Expansion order.
    :param amplitudes: Amplitude ladder, geometric from 1e-3 to 1e-1 by default.
    :return: The fitted exponent.
    """
    if amplitudes is None:
        amplitudes = np.geomspace(1e-3, 1e-1, 7)

    norms = []
    for a in amplitudes:
        wave = stokes_wave(p, branch, a, order, N)
        norms.append(l2_norm(residual(wave.field, wave.c, p)))

    slope, _ = np.polyfit(np.log(amplitudes), np.log(norms), 1)
    return float(slope)


__all__ = [
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
]
