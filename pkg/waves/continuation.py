import logging
import warnings

from dataclasses import dataclass

import numpy as np

from scipy import linalg

from config import NEWTON_MAX_ITERATIONS, NEWTON_TOL
from errors import (
    ConfigurationError,
    ContinuationBreakdownError,
    DerivativeUnavailableError,
    NoConvergenceError,
    ParameterOrderError,
)
from torus import SectorTag, SpectralField, inner_product, l2_norm, nodal_minimum, schrodinger_matrix
from .equation import residual
from .stokes import BranchKind, StokesWave, generator_amplitude, generator_field, stokes_wave

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WaveBranchPoint:
    """A solution (or candidate solution) of the stationary equation with its diagnostics."""

    p: int
    branch: BranchKind
    a: float
    c: float
    field: SpectralField
    residual: float
    nodal_min: float
    iterations: int = 0
    residual_history: tuple[float, ...] = ()

    @property
    def sector(self) -> SectorTag:
        return self.field.sector

    @property
    def N(self) -> int:
        return self.field.N

    @classmethod
    def from_field(cls,
                   p: int,
                   branch: BranchKind,
                   field: SpectralField,
                   c: float,
                   a: float | None = None) -> "WaveBranchPoint":
        """
        Wrap a field, measuring its amplitude, residual and nodal minimum.

        :param a: Target amplitude; measured from the field when omitted.
        """
        branch = BranchKind(branch)
        if a is None:
            a = generator_amplitude(field, branch)
        return cls(p, branch, float(a), float(c), field,
                   l2_norm(residual(field, c, p)), nodal_minimum(field))

    @classmethod
    def from_stokes(cls, wave: StokesWave) -> "WaveBranchPoint":
        return cls.from_field(wave.p, wave.branch, wave.field, wave.c, wave.a)

    def is_converged(self, tol: float = NEWTON_TOL) -> bool:
        """Residual within ``tol`` relative to max(1, ||field||), the test Newton stops on."""
        return self.residual <= tol * max(1.0, l2_norm(self.field))


@dataclass(frozen=True, eq=False)
class Branch:
    p: int
    branch: BranchKind
    N: int
    points: tuple[WaveBranchPoint, ...]
    step: float
    newton_tol: float
    status: str = "complete"
    error: str | None = None

    @property
    def sector(self) -> SectorTag:
        return self.branch.sector

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([point.a for point in self.points])

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([point.c for point in self.points])


def newton_solve_fixed_amplitude(guess: WaveBranchPoint,
                                 tol: float = NEWTON_TOL,
                                 max_iterations: int = NEWTON_MAX_ITERATIONS) -> WaveBranchPoint:
    """
    Solve the stationary equation jointly for (field, c) with the generator
    amplitude held at guess.a, through the bordered system
    [[L1, phi], [g^T, 0]] (du, dc) = -(residual, amplitude defect).

    :param guess: Starting point; its ``a`` is the amplitude to hold.
    :param tol: Residual tolerance relative to max(1, ||field||).
    :param max_iterations: Iteration cap.
    :return: The converged point.
    """
    p, branch, a = guess.p, guess.branch, guess.a
    label = f"[Newton p={p} {branch.value} a={a:.4g}]"

    field, c = guess.field, guess.c
    generator = generator_field(branch, field.N).to_sector(field.sector)
    amplitude_row = generator.to_vector() / inner_product(generator, generator)
    dim = amplitude_row.size

    history = []
    for iteration in range(max_iterations + 1):
        r = residual(field, c, p)
        r_norm = l2_norm(r)
        history.append(r_norm)
        amplitude_defect = float(amplitude_row @ field.to_vector()) - a
        logger.debug(f"{label} iteration {iteration}: residual {r_norm:.3e}, c={c:.15g}")

        if r_norm <= tol * max(1.0, l2_norm(field)) and abs(amplitude_defect) <= 1e-12 * max(1.0, abs(a)):
            return WaveBranchPoint(p, branch, a, c, field, r_norm, nodal_minimum(field),
                                   iteration, tuple(history))
        if iteration == max_iterations:
            raise NoConvergenceError(f"{label} Newton did not converge", r_norm, iteration)

        jacobian = np.zeros((dim + 1, dim + 1))
        l1 = schrodinger_matrix(field, c, p, p + 1)
        jacobian[:dim, :dim] = (l1 + l1.T) / 2
        jacobian[:dim, dim] = field.to_vector()
        jacobian[dim, :dim] = amplitude_row
        rhs = -np.append(r.to_vector(), amplitude_defect)

        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", linalg.LinAlgWarning)
                update = linalg.solve(jacobian, rhs)
        except (linalg.LinAlgError, linalg.LinAlgWarning) as e:
            raise ContinuationBreakdownError(f"{label} Bordered Jacobian is singular: {e}") from e

        field = field + SpectralField.from_vector(update[:dim], field.sector, field.N)
        c = c + float(update[dim])


def continue_branch(p: int,
                    branch: BranchKind,
                    a_start: float,
                    a_end: float,
                    steps: int,
                    N: int,
                    tol: float = NEWTON_TOL,
                    max_iterations: int = NEWTON_MAX_ITERATIONS) -> Branch:
    """
    March the amplitude in equal steps from a_start to a_end, warm-starting
    every Newton solve. The first point starts from the Stokes expansion; later
    ones from secant extrapolation of the previous two.

    :param steps: Number of points on the branch.
    :return: The branch; aborted branches keep the converged prefix and the error.
    """
    branch = BranchKind(branch)
    if steps < 1:
        raise ConfigurationError(f"Continuation needs at least one step, got {steps}.")
    if a_end < a_start:
        raise ParameterOrderError(f"a_end={a_end} lies below a_start={a_start}.")

    amplitudes = np.linspace(a_start, a_end, steps)
    step = float(amplitudes[1] - amplitudes[0]) if steps > 1 else 0.0
    label = f"[Branch p={p} {branch.value}]"

    points: list[WaveBranchPoint] = []
    for i, a in enumerate(amplitudes):
        a = float(a)
        if not points:
            guess = WaveBranchPoint.from_stokes(stokes_wave(p, branch, a, 3 if p == 1 else 2, N))
        elif len(points) == 1:
            previous = points[-1]
            field = previous.field + (a - previous.a) * generator_field(branch, N)
            guess = WaveBranchPoint.from_field(p, branch, field, previous.c, a)
        else:
            older, previous = points[-2], points[-1]
            ratio = (a - previous.a) / (previous.a - older.a)
            field = previous.field + ratio * (previous.field - older.field)
            c = previous.c + ratio * (previous.c - older.c)
            guess = WaveBranchPoint.from_field(p, branch, field, c, a)

        try:
            point = newton_solve_fixed_amplitude(guess, tol, max_iterations)
        except (NoConvergenceError, ContinuationBreakdownError) as e:
            logger.warning(f"{label} aborted at step {i + 1}/{steps} (a={a:.4g}): {e}")
            return Branch(p, branch, N, tuple(points), step, tol, "aborted",
                          f"{e}. Refine the amplitude step.")

        points.append(point)
        logger.info(f"{label} step {i + 1}/{steps} a={a:.4g} c={point.c:.12g} "
                    f"converged in {point.iterations} iterations")

    return Branch(p, branch, N, tuple(points), step, tol)


def _lagrange_derivative_weights(nodes: np.ndarray, at: float) -> np.ndarray:
    """Weights w with sum(w * f(nodes)) = f'(at) for the interpolating polynomial."""
    weights = np.zeros(nodes.size)
    for s in range(nodes.size):
        others = np.delete(nodes, s)
        denominator = np.prod(nodes[s] - others)
        total = 0.0
        for m in range(others.size):
            total += np.prod(at - np.delete(others, m))
        weights[s] = total / denominator
    return weights


def _c_derivative_stencil(branch: Branch, index: int) -> tuple[list[int], np.ndarray]:
    """Point indices and weights of d/dc along the branch at a given point."""
    n = len(branch.points)
    if n < 2:
        raise DerivativeUnavailableError("A branch derivative needs at least two points.")
    if not 0 <= index < n:
        raise ConfigurationError(f"Index {index} is outside the branch of {n} points.")

    if n == 2:
        indices = [0, 1]
    elif index == 0:
        indices = [0, 1, 2]
    elif index == n - 1:
        indices = [n - 3, n - 2, n - 1]
    else:
        indices = [index - 1, index, index + 1]

    a_nodes = np.array([branch.points[i].a for i in indices])
    c_nodes = np.array([branch.points[i].c for i in indices])
    if np.min(np.abs(np.diff(np.sort(c_nodes)))) < 1e-14:
        raise DerivativeUnavailableError(f"Frequencies around index {index} are not separated.")

    a_here, c_here = branch.points[index].a, branch.points[index].c
    if np.min(np.abs(np.diff(np.sort(a_nodes)))) > 1e-14:
        # Parameterize by a, then apply the chain rule through dc/da
        weights = _lagrange_derivative_weights(a_nodes, a_here)
        return indices, weights / float(weights @ c_nodes)

    return indices, _lagrange_derivative_weights(c_nodes, c_here)


def d_phi_dc(branch: Branch, index: int) -> SpectralField:
    """Finite-difference derivative of the profile with respect to c along the branch."""
    indices, weights = _c_derivative_stencil(branch, index)
    derivative = SpectralField.zeros(branch.points[index].sector, branch.points[index].N)
    for i, w in zip(indices, weights):
        derivative = derivative + w * branch.points[i].field
    return derivative


def mass_derivative(branch: Branch, index: int) -> float:
    """-1/2 d/dc of the integral of phi^2, differenced along the branch."""
    indices, weights = _c_derivative_stencil(branch, index)
    masses = np.array([inner_product(branch.points[i].field, branch.points[i].field) for i in indices])
    return -0.5 * float(weights @ masses)


__all__ = [
    "WaveBranchPoint",
    "Branch",
    "newton_solve_fixed_amplitude",
    "continue_branch",
    "d_phi_dc",
    "mass_derivative",
]
