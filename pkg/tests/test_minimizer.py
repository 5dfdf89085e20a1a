import os
import sys

import numpy as np
import pytest

# Add the root directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from errors import ConfigurationError, DegenerateInputError
from torus import FOUR_PI_SQ, SectorTag, SpectralField, random_field, shift_half_period, swap_axes
from waves import *

STRICT = MinimizerSettings(grad_tol=1e-11, stagnation_tol=0.0, max_iterations=20000)


@pytest.fixture(scope="module")
def constant_run() -> MinimizerRun:
    # At c < 1 the constant state is the constrained minimizer for p = 1
    return minimize(1, 0.5, 10.0, 6, seed=7, settings=STRICT)


def test_B_c_of_constant():
    field = SpectralField.constant(3.0, SectorTag.S, 4)
    assert B_c(field, 2.0) == pytest.approx(0.5 * 2.0 * 9.0 * FOUR_PI_SQ)


def test_B_c_needs_positive_frequency():
    with pytest.raises(ConfigurationError):
        B_c(SpectralField.constant(1.0, SectorTag.S, 4), 0.0)


def test_constraint_integral_of_constant():
    field = SpectralField.constant(2.0, SectorTag.S, 4)
    assert constraint_integral(field, 1) == pytest.approx(8 * FOUR_PI_SQ)
    assert constraint_integral(field, 2) == pytest.approx(16 * FOUR_PI_SQ)


def test_constant_minimizer(constant_run):
    run = constant_run
    assert run.converged
    assert run.termination == "gradient"
    assert run.B_value == pytest.approx(run.constant_B, rel=1e-8)
    assert np.allclose(run.field.cc.ravel()[1:], 0.0, atol=1e-6)
    assert run.nodal_min > 0


def test_lagrange_rescaling_recovers_the_stationary_state(constant_run):
    run = constant_run
    # For p = 1 the constant solution of -Delta phi + c phi = phi^2 is phi = c
    assert run.rescaled_field.cos_coefficient(0, 0) == pytest.approx(0.5, rel=1e-6)
    assert run.rescaled_residual < 1e-6
    assert run.multiplier == pytest.approx(2 * run.B_value / run.constraint_level)


def test_non_converged_run_is_flagged():
    settings = MinimizerSettings(grad_tol=1e-14, stagnation_tol=0.0, max_iterations=3)
    run = minimize(1, 2.5, 1.0, 6, seed=1, settings=settings)
    assert not run.converged
    assert run.termination == "iteration-cap"
    assert run.iterations == 3
    assert run.seed == 1


def test_restricted_search_stays_in_subspace():
    settings = MinimizerSettings(grad_tol=1e-14, stagnation_tol=0.0, max_iterations=20)
    run = minimize(1, 2.5, 1.0, 6, seed=2, restriction=BranchKind.EPLUS, settings=settings)
    assert run.field.sector is SectorTag.E
    projected = restrict_to_generator(run.field, BranchKind.EPLUS)
    np.testing.assert_allclose(projected.cc, run.field.cc, atol=1e-14)
    np.testing.assert_allclose(projected.ss, run.field.ss, atol=1e-14)


def test_restriction_is_a_projection():
    rng = np.random.default_rng(5)
    field = random_field(SectorTag.E, 5, rng)
    once = restrict_to_generator(field, BranchKind.EMINUS)
    twice = restrict_to_generator(once, BranchKind.EMINUS)
    np.testing.assert_allclose(twice.cc, once.cc)
    for n in range(1, 6):
        assert once.sin_coefficient(n, n) == pytest.approx(once.cos_coefficient(n, n))
    assert once.cos_coefficient(1, 2) == 0.0

    ss_part = restrict_to_generator(random_field(SectorTag.S, 5, rng), BranchKind.SS)
    assert ss_part.cos_coefficient(1, 0) == 0.0
    assert ss_part.cos_coefficient(2, 0) != 0.0


def test_minimizer_validates_input():
    with pytest.raises(ConfigurationError):
        minimize(1, -1.0, 1.0, 6, seed=0)
    with pytest.raises(ConfigurationError):
        minimize(1, 1.0, 0.0, 6, seed=0)


def test_positivity_and_phase_check():
    report = positivity_and_phase_check(SpectralField.constant(-2.0, SectorTag.S, 3))
    assert report.flipped
    assert report.field.cos_coefficient(0, 0) == pytest.approx(2.0)
    assert report.nodal_min == pytest.approx(2.0)

    with pytest.raises(DegenerateInputError):
        positivity_and_phase_check(SpectralField.zeros(SectorTag.S, 3))


def test_align_to_reference():
    reference = SpectralField.from_modes(SectorTag.S, 4, cc={(0, 0): 2.0, (1, 1): 0.1, (1, 2): 0.05})
    moved = -swap_axes(shift_half_period(reference, 0))
    aligned, distance = align_to_reference(moved, reference)
    assert distance == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(aligned.cc, reference.cc, atol=1e-14)


@pytest.fixture(scope="module")
def eplus_branch() -> Branch:
    return continue_branch(1, BranchKind.EPLUS, 0.2, 0.3, 3, 8)


def restricted_run(point: WaveBranchPoint, seed: int) -> MinimizerRun:
    return minimize(1, point.c, constraint_integral(point.field, 1), 8, seed=seed,
                    restriction=BranchKind.EPLUS,
                    settings=MinimizerSettings(grad_tol=1e-11, stagnation_tol=0.0, max_iterations=50000))


def test_wave_energy_is_half_the_constraint(eplus_branch):
    for point in eplus_branch.points:
        level = constraint_integral(point.field, 1)
        assert B_c(point.field, point.c) == pytest.approx(level / 2, rel=1e-9)


def test_restricted_minimizer_recovers_e_plus_waves(eplus_branch):
    assert eplus_branch.status == "complete"
    for point in eplus_branch.points:
        run = restricted_run(point, seed=7)
        assert run.converged
        _, distance = align_to_reference(run.field, point.field)
        assert distance <= 1e-6
        assert run.B_value == pytest.approx(constraint_integral(point.field, 1) / 2, rel=1e-8)


def test_restricted_minimizer_is_seed_independent(eplus_branch):
    point = eplus_branch.points[1]
    first = restricted_run(point, seed=7)
    second = restricted_run(point, seed=8)
    assert first.B_value == pytest.approx(second.B_value, rel=1e-9)


def test_constant_is_not_the_minimizer_above_first_mode():
    # The cos x mode of the Hessian at the constant has eigenvalue 1 - c for p = 1
    run = minimize(1, 1.5, 10.0, 6, seed=7, settings=STRICT)
    assert run.B_value < run.constant_B
    assert np.max(np.abs(run.field.cc.ravel()[1:])) > 1e-3
