import logging

from dataclasses import dataclass

import numpy as np

from scipy import fft

from config import BLOWUP_THRESHOLD, DEVIATION_BOUND_FACTOR, EVOLUTION_TRUNCATION_FACTOR
from errors import ConfigurationError
from torus import FOUR_PI_SQ, SpectralField, TorusGrid, coeff_to_nodal, random_field
from waves import WaveBranchPoint

logger = logging.getLogger(__name__)


def _wavenumbers(M: int) -> np.ndarray:
    return np.rint(fft.fftfreq(M, 1 / M)).astype(int)


@dataclass(frozen=True, eq=False)
class ComplexTorusField:
    """
    Complex field sum of F[k, j] exp(i(kx + jy)) over |k|, |j| <= N, held in FFT
    order on the odd grid M = 2N + 1.
    """

    N: int
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=complex, copy=True)
        if coefficients.shape != (2 * self.N + 1, 2 * self.N + 1):
            raise ConfigurationError(f"Expected coefficients of shape {(2 * self.N + 1,) * 2}, got {coefficients.shape}.")
        if not np.all(np.isfinite(coefficients)):
            raise ConfigurationError("Complex field coefficients must be finite.")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def M(self) -> int:
        return 2 * self.N + 1

    @classmethod
    def from_nodal(cls, values: np.ndarray) -> "ComplexTorusField":
        M = values.shape[0]
        return cls((M - 1) // 2, fft.fft2(values) / M ** 2)

    @classmethod
    def from_spectral(cls, field: SpectralField, N: int) -> "ComplexTorusField":
        """The real field truncated or padded to N, as a complex field."""
        values = coeff_to_nodal(field.resized(N), TorusGrid(2 * N + 1))
        return cls.from_nodal(values.astype(complex))

    def nodal(self) -> np.ndarray:
        return fft.ifft2(self.coefficients) * self.M ** 2

    def inner(self, other: "ComplexTorusField") -> complex:
        """Integral of conj(self) * other."""
        return complex(FOUR_PI_SQ * np.sum(np.conj(self.coefficients) * other.coefficients))

    def l2_norm(self) -> float:
        return float(np.sqrt(FOUR_PI_SQ * np.sum(np.abs(self.coefficients) ** 2)))

    def padded(self, N: int) -> "ComplexTorusField":
        """Zero-pad in frequency to a larger truncation."""
        k = _wavenumbers(self.M)
        coefficients = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        rows = k % (2 * N + 1)
        coefficients[np.ix_(rows, rows)] = self.coefficients
        return ComplexTorusField(N, coefficients)

    def __add__(self, other: "ComplexTorusField") -> "ComplexTorusField":
        return ComplexTorusField(self.N, self.coefficients + other.coefficients)

    def __mul__(self, factor: complex) -> "ComplexTorusField":
        return ComplexTorusField(self.N, factor * self.coefficients)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ConservedQuantities:
    energy: float
    mass: float
    refinement_delta: float


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    times: np.ndarray
    energy: np.ndarray
    mass: np.ndarray
    deviation: np.ndarray
    dt: float
    epsilon: float
    seed: int
    p: int
    N: int
    method: str = "strang"
    status: str = "complete"
    refinement_delta: float = 0.0

    def growth_factor(self) -> float:
        """Largest recorded deviation relative to the initial one."""
        start, largest = float(self.deviation[0]), float(np.max(self.deviation))
        if start == 0.0:
            return 1.0 if largest == 0.0 else np.inf
        return largest / start

    def within_bound(self, factor: float = DEVIATION_BOUND_FACTOR) -> bool:
        return self.status == "complete" and self.growth_factor() <= factor


def _linear_multiplier(M: int, dt: float) -> np.ndarray:
    k = _wavenumbers(M)
    return np.exp(-1j * (k[:, None] ** 2 + k[None, :] ** 2) * dt)


def _half_nonlinear(values: np.ndarray, dt: float, p: int) -> np.ndarray:
    # |u| is invariant under this sub-flow, so the rotation is exact
    return values * np.exp(0.5j * dt * np.abs(values) ** p)


def _strang_nodal(values: np.ndarray, dt: float, p: int, multiplier: np.ndarray) -> np.ndarray:
    values = _half_nonlinear(values, dt, p)
    values = fft.ifft2(fft.fft2(values) * multiplier)
    return _half_nonlinear(values, dt, p)


def strang_step(u: ComplexTorusField, dt: float, p: int) -> ComplexTorusField:
    """Half nonlinear rotation, exact linear step, half nonlinear rotation."""
    if dt <= 0:
        raise ConfigurationError(f"Time step must be positive, got {dt}.")
    return ComplexTorusField.from_nodal(_strang_nodal(u.nodal(), dt, p, _linear_multiplier(u.M, dt)))


def _potential_integral(u: ComplexTorusField, p: int) -> float:
    values = u.nodal()
    return float(FOUR_PI_SQ / u.M ** 2 * np.sum(np.abs(values) ** (p + 2)))


def conserved_quantities(u: ComplexTorusField, p: int) -> ConservedQuantities:
    """
    E = 1/2 |grad u|^2 - |u|^(p+2)/(p+2) and F = 1/2 |u|^2, both integrated.
    The potential term is integrated on a refined grid; the change from the
    base grid is reported as refinement_delta.
    """
    k = _wavenumbers(u.M)
    power = np.abs(u.coefficients) ** 2
    mass = 0.5 * FOUR_PI_SQ * float(np.sum(power))
    gradient = 0.5 * FOUR_PI_SQ * float(np.sum((k[:, None] ** 2 + k[None, :] ** 2) * power))

    refined = _potential_integral(u.padded((p + 2) * u.N // 2 + u.N), p)
    base = _potential_integral(u, p)
    return ConservedQuantities(gradient - refined / (p + 2), mass, abs(refined - base) / (p + 2))


def deviation(u: ComplexTorusField, reference: ComplexTorusField) -> float:
    """Distance from u to the phase orbit of reference, minimized over the phase in closed form."""
    value = u.l2_norm() ** 2 + reference.l2_norm() ** 2 - 2 * abs(reference.inner(u))
    return float(np.sqrt(max(0.0, value)))


def evolve_perturbed(wave: WaveBranchPoint,
                     epsilon: float,
                     T: float,
                     dt: float,
                     seed: int,
                     stride: int = 1,
                     N: int | None = None,
                     blowup_threshold: float = BLOWUP_THRESHOLD) -> EvolutionTrace:
    """
    Integrate the wave plus a random complex perturbation of L2 norm epsilon.

    :param wave: The standing wave.
    :param epsilon: Perturbation size.
    :param T: Final time.
    :param dt: Time step.
    :param seed: Seed of the perturbation.
    :param stride: Record every stride-th step (the final step is always recorded).
    :param N: Evolution truncation, a multiple of the wave truncation by default.
    :param blowup_threshold: Abort once the nodal maximum exceeds this.
    :return: The trace.
    """
    if epsilon < 0:
        raise ConfigurationError(f"Perturbation size must be non-negative, got {epsilon}.")
    if T <= 0 or dt <= 0:
        raise ConfigurationError(f"T and dt must be positive, got T={T}, dt={dt}.")
    if stride < 1:
        raise ConfigurationError(f"Stride must be at least 1, got {stride}.")

    N = N or EVOLUTION_TRUNCATION_FACTOR * wave.N
    label = f"[Evolve p={wave.p} {wave.branch.value} a={wave.a:.4g} seed={seed}]"

    reference = ComplexTorusField.from_spectral(wave.field, N)
    rng = np.random.default_rng(seed)
    real_part = ComplexTorusField.from_spectral(random_field(wave.sector, wave.N, rng), N)
    imaginary_part = ComplexTorusField.from_spectral(random_field(wave.sector, wave.N, rng), N)
    perturbation = real_part + 1j * imaginary_part
    u = reference + (epsilon / perturbation.l2_norm()) * perturbation

    steps = max(1, int(round(T / dt)))
    multiplier = _linear_multiplier(u.M, dt)
    values = u.nodal()

    times, energy, mass, deviations = [], [], [], []
    worst_delta = 0.0
    status = "complete"

    def record(step: int):
        nonlocal worst_delta
        state = ComplexTorusField.from_nodal(values)
        quantities = conserved_quantities(state, wave.p)
        times.append(step * dt)
        energy.append(quantities.energy)
        mass.append(quantities.mass)
        deviations.append(deviation(state, reference))
        worst_delta = max(worst_delta, quantities.refinement_delta)

    record(0)
    for step in range(1, steps + 1):
        values = _strang_nodal(values, dt, wave.p, multiplier)
        peak = float(np.max(np.abs(values)))
        if not np.isfinite(peak) or peak > blowup_threshold:
            logger.warning(f"{label} blow-up at t={step * dt:.6g} (max |u| = {peak:.3e})")
            status = "blow-up"
            if np.isfinite(peak):
                record(step)
            break
        if step % stride == 0 or step == steps:
            record(step)

    return EvolutionTrace(np.array(times), np.array(energy), np.array(mass), np.array(deviations),
                          dt, epsilon, seed, wave.p, N, status=status, refinement_delta=worst_delta)


__all__ = [
    "ComplexTorusField",
    "ConservedQuantities",
    "EvolutionTrace",
    "strang_step",
    "conserved_quantities",
    "deviation",
    "evolve_perturbed",
]
