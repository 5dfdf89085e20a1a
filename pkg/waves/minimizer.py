import itertools
import logging

from dataclasses import dataclass

import numpy as np

from config import (
    MINIMIZER_GRAD_TOL,
    MINIMIZER_MAX_ITERATIONS,
    MINIMIZER_STAGNATION_TOL,
    MINIMIZER_STAGNATION_WINDOW,
)
from errors import ConfigurationError, DegenerateInputError
from torus import (
    FOUR_PI_SQ,
    SectorTag,
    SpectralField,
    TorusGrid,
    coeff_to_nodal,
    field_map,
    l2_norm,
    nodal_minimum,
    quadrature,
    random_field,
    shift_half_period,
    swap_axes,
    wavenumber_squares,
)
from .equation import residual
from .stokes import BranchKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinimizerSettings:
    grad_tol: float = MINIMIZER_GRAD_TOL
    stagnation_tol: float = MINIMIZER_STAGNATION_TOL
    stagnation_window: int = MINIMIZER_STAGNATION_WINDOW
    max_iterations: int = MINIMIZER_MAX_ITERATIONS


@dataclass(frozen=True, eq=False)
class MinimizerRun:
    p: int
    c: float
    constraint_level: float
    seed: int
    restriction: BranchKind | None
    iterations: int
    field: SpectralField
    B_value: float
    converged: bool
    termination: str
    gradient_norm: float
    nodal_min: float
    multiplier: float
    rescaled_field: SpectralField
    rescaled_B: float
    rescaled_constraint: float
    rescaled_residual: float
    constant_B: float


@dataclass(frozen=True, eq=False)
class PositivityReport:
    field: SpectralField
    nodal_min: float
    flipped: bool


def B_c(field: SpectralField, c: float) -> float:
    """1/2 of the integral of |grad u|^2 + c u^2, via Parseval."""
    if c <= 0:
        raise ConfigurationError(f"B_c is only coercive for c > 0, got c={c}.")
    vector = field.to_vector()
    return 0.5 * float(np.sum((wavenumber_squares(field.sector, field.N) + c) * vector ** 2))


def constraint_integral(field: SpectralField, p: int) -> float:
    """Integral of |u|^(p+2) by quadrature on an alias-free grid."""
    values = coeff_to_nodal(field, TorusGrid.for_truncation(field.N, p + 2))
    return quadrature(np.abs(values) ** (p + 2))


def _renormalize(field: SpectralField, p: int, constraint_level: float) -> SpectralField:
    return field * (constraint_level / constraint_integral(field, p)) ** (1 / (p + 2))


def restrict_to_generator(field: SpectralField, branch: BranchKind | None) -> SpectralField:
    """
    Orthogonal projection onto the closed subspace generated by a branch mode:
    modes with k + j even for SS, functions of x + y (x - y) only for EPLUS (EMINUS).
    """
    if branch is None:
        return field
    branch = BranchKind(branch)

    if branch is BranchKind.SS:
        k = np.arange(field.N + 1)
        even = (k[:, None] + k[None, :]) % 2 == 0
        return SpectralField(field.sector, field.cc * even, None if field.ss is None else field.ss * even[1:, 1:])

    field = field.to_sector(SectorTag.E)
    cc = np.zeros_like(field.cc)
    ss = np.zeros_like(field.ss)
    cc[0, 0] = field.cc[0, 0]
    sign = -1.0 if branch is BranchKind.EPLUS else 1.0
    for n in range(1, field.N + 1):
        amplitude = (field.cc[n, n] + sign * field.ss[n - 1, n - 1]) / 2
        cc[n, n] = amplitude
        ss[n - 1, n - 1] = sign * amplitude
    return SpectralField(SectorTag.E, cc, ss)


def positivity_and_phase_check(field: SpectralField) -> PositivityReport:
    """Normalize the global sign so the mean is positive and report the nodal minimum."""
    if l2_norm(field) == 0:
        raise DegenerateInputError("The zero field has no phase to normalize.")
    flipped = bool(field.cc[0, 0] < 0)
    if flipped:
        field = -field
    return PositivityReport(field, nodal_minimum(field), flipped)


def align_to_reference(field: SpectralField, reference: SpectralField) -> tuple[SpectralField, float]:
    """
    Best match of a field to a reference over half-period shifts, the x<->y swap
    and the global sign.

    :return: (aligned field, L2 distance to the reference).
    """
    best, best_distance = field, np.inf
    for shift_x, shift_y, swap, sign in itertools.product((False, True), (False, True), (False, True), (1, -1)):
        candidate = field
        if shift_x:
            candidate = shift_half_period(candidate, 0)
        if shift_y:
            candidate = shift_half_period(candidate, 1)
        if swap:
            candidate = swap_axes(candidate)
        candidate = sign * candidate
        distance = l2_norm(candidate - reference)
        if distance < best_distance:
            best, best_distance = candidate, distance
    return best, float(best_distance)


def minimize(p: int,
             c: float,
             constraint_level: float,
             N: int,
             seed: int,
             sector: SectorTag = SectorTag.S,
             restriction: BranchKind | None = None,
             settings: MinimizerSettings = MinimizerSettings()) -> MinimizerRun:
    """
    Minimize B_c over real fields with the integral of |u|^(p+2) pinned at
    constraint_level. Each step moves along the preconditioned gradient
    projected onto the constraint tangent, with P = -Delta + c as
    preconditioner, renormalizes, and halves the step whenever B_c increases.

    :param p: Power of the nonlinearity.
    :param c: Frequency, positive.
    :param constraint_level: Value of the constraint, positive.
    :param N: Truncation.
    :param seed: Seed of the random initial perturbation.
    :param sector: Sector to search in.
    :param restriction: Optional branch whose generated subspace confines the search.
    :param settings: Termination settings.
    :return: The run record.
    """
    if c <= 0:
        raise ConfigurationError(f"c must be positive, got {c}.")
    if constraint_level <= 0:
        raise ConfigurationError(f"The constraint level must be positive, got {constraint_level}.")
    if restriction is not None:
        restriction = BranchKind(restriction)
        sector = restriction.sector

    label = f"[Minimizer p={p} c={c:.6g} seed={seed}]"
    rng = np.random.default_rng(seed)
    level = c ** (1 / p)
    start = SpectralField.constant(level, sector, N) + 0.1 * level * random_field(sector, N, rng)
    field = _renormalize(restrict_to_generator(start, restriction), p, constraint_level)

    preconditioner = wavenumber_squares(sector, N) + c
    B = B_c(field, c)
    history = [B]
    step = 1.0
    termination = "iteration-cap"
    gradient_norm = np.inf

    iteration = 0
    while iteration < settings.max_iterations:
        iteration += 1
        u = field.to_vector()
        h = field_map(field, lambda v: np.abs(v) ** p * v, p + 1).to_vector()
        scaled = h / preconditioner
        beta = float(u @ h) / float(h @ scaled)
        direction = u - beta * scaled

        gradient_norm = float(np.sqrt(direction @ (preconditioner * direction) / (u @ (preconditioner * u))))
        if gradient_norm < settings.grad_tol:
            termination = "gradient"
            break

        while True:
            trial = SpectralField.from_vector(u - step * direction, sector, N)
            trial = _renormalize(restrict_to_generator(trial, restriction), p, constraint_level)
            B_trial = B_c(trial, c)
            if B_trial <= B + 1e-14 * abs(B):
                break
            step /= 2
            if step < 1e-12:
                break
        if step < 1e-12:
            termination = "step-collapse"
            break

        field, B = trial, B_trial
        step = min(1.0, 2 * step)
        history.append(B)

        if iteration % 500 == 0:
            logger.debug(f"{label} iteration {iteration}: B={B:.15g}, gradient {gradient_norm:.3e}")

        window = settings.stagnation_window
        if settings.stagnation_tol > 0 and len(history) > window:
            if (history[-window - 1] - B) <= settings.stagnation_tol * abs(B):
                termination = "stagnation"
                break

    converged = termination in ("gradient", "stagnation")
    if not converged:
        logger.warning(f"{label} stopped without converging ({termination}) after {iteration} iterations")

    report = positivity_and_phase_check(field)
    field = report.field
    multiplier = 2 * B / constraint_level
    rescaled = field * multiplier ** (1 / p)
    constant_level = (constraint_level / FOUR_PI_SQ) ** (1 / (p + 2))

    return MinimizerRun(
        p=p,
        c=c,
        constraint_level=constraint_level,
        seed=seed,
        restriction=restriction,
        iterations=iteration,
        field=field,
        B_value=B,
        converged=converged,
        termination=termination,
        gradient_norm=gradient_norm,
        nodal_min=report.nodal_min,
        multiplier=multiplier,
        rescaled_field=rescaled,
        rescaled_B=B_c(rescaled, c),
        rescaled_constraint=constraint_integral(rescaled, p),
        rescaled_residual=l2_norm(residual(rescaled, c, p)),
        constant_B=0.5 * c * constant_level ** 2 * FOUR_PI_SQ,
    )


__all__ = [
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
