import os
import sys

import numpy as np
import pytest

# Add the root directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from errors import ConfigurationError, DerivativeUnavailableError, NoConvergenceError, ParameterOrderError
from stability import assemble_L1, apply_operator, eig_sym, quadratic_form_inverse
from torus import FOUR_PI_SQ, SectorTag, SpectralField, l2_norm, reflect_y
from waves import *


@pytest.fixture(scope="module")
def ss_branch() -> Branch:
    return continue_branch(1, BranchKind.SS, 0.01, 0.05, 17, 8)


def test_branch_completes(ss_branch):
    assert ss_branch.status == "complete"
    assert ss_branch.error is None
    assert len(ss_branch.points) == 17
    np.testing.assert_allclose(ss_branch.amplitudes, np.linspace(0.01, 0.05, 17))
    assert ss_branch.step == pytest.approx(0.0025)


def test_points_solve_the_stationary_equation(ss_branch):
    for point in ss_branch.points:
        assert point.residual < 1e-9
        assert l2_norm(residual(point.field, point.c, 1)) < 1e-9
        assert generator_amplitude(point.field, BranchKind.SS) == pytest.approx(point.a, abs=1e-12)
        assert point.nodal_min > 0


def test_frequency_follows_stokes_prediction(ss_branch):
    first = ss_branch.points[0]
    assert (first.c - 2) / first.a ** 2 == pytest.approx(solvability_c2(1, BranchKind.SS), rel=0.1)
    # The SS branch bifurcates to c < 2
    assert np.all(ss_branch.frequencies < 2)
    assert np.all(np.diff(ss_branch.frequencies) < 0)


def test_newton_from_stokes_guess_converges_quickly():
    guess = WaveBranchPoint.from_stokes(stokes_wave(1, BranchKind.EPLUS, 0.03, 3, 8))
    point = newton_solve_fixed_amplitude(guess)
    assert point.iterations <= 6
    assert point.residual_history[-1] == point.residual
    assert (point.c - 2) / 0.03 ** 2 == pytest.approx(5 / 12, rel=0.1)


def test_newton_iteration_cap():
    field = SpectralField.constant(2.0, BranchKind.SS.sector, 6) + 0.3 * generator_field(BranchKind.SS, 6)
    guess = WaveBranchPoint.from_field(1, BranchKind.SS, field, 2.5, 0.3)
    with pytest.raises(NoConvergenceError) as e:
        newton_solve_fixed_amplitude(guess, max_iterations=1)
    assert e.value.iterations == 1
    assert e.value.last_residual > 0


def test_invalid_ranges():
    with pytest.raises(ParameterOrderError):
        continue_branch(1, BranchKind.SS, 0.05, 0.01, 5, 8)
    with pytest.raises(ConfigurationError):
        continue_branch(1, BranchKind.SS, 0.01, 0.05, 0, 8)


def test_d_phi_dc_inverts_L1(ss_branch):
    point = ss_branch.points[8]
    derivative = d_phi_dc(ss_branch, 8)
    image = apply_operator(assemble_L1(point), derivative)
    assert l2_norm(image + point.field) / l2_norm(point.field) < 1e-3


def test_mass_derivative_matches_inverse_form(ss_branch):
    point = ss_branch.points[8]
    L1 = assemble_L1(point)
    expected = quadratic_form_inverse(L1, point.field, eig_sym(L1))
    assert mass_derivative(ss_branch, 8) == pytest.approx(expected, rel=1e-4)


def test_derivative_needs_two_points():
    branch = continue_branch(1, BranchKind.SS, 0.02, 0.02, 1, 6)
    with pytest.raises(DerivativeUnavailableError):
        d_phi_dc(branch, 0)


def test_newton_agrees_with_stokes_to_fourth_order():
    a = 0.05
    stokes = stokes_wave(1, BranchKind.SS, a, 3, 16)
    point = newton_solve_fixed_amplitude(WaveBranchPoint.from_stokes(stokes))
    assert l2_norm(point.field - stokes.field) <= 10 * a ** 4
    assert abs(point.c - stokes.c) <= 10 * a ** 4


def test_e_sector_pair_share_frequency():
    plus = newton_solve_fixed_amplitude(WaveBranchPoint.from_stokes(stokes_wave(1, BranchKind.EPLUS, 0.05, 3, 8)))
    minus = newton_solve_fixed_amplitude(WaveBranchPoint.from_stokes(stokes_wave(1, BranchKind.EMINUS, 0.05, 3, 8)))
    assert abs(plus.c - minus.c) <= 1e-10
    assert l2_norm(reflect_y(plus.field) - minus.field) <= 1e-9


def test_derivative_along_constant_states():
    # phi = c solves the stationary equation for p = 1, so d phi / dc = 1
    frequencies = (1.9, 2.0, 2.1)
    points = tuple(WaveBranchPoint.from_field(1, BranchKind.SS, SpectralField.constant(c, SectorTag.S, 4), c, a=0.0)
                   for c in frequencies)
    branch = Branch(1, BranchKind.SS, 4, points, 0.0, 1e-11)

    derivative = d_phi_dc(branch, 1)
    assert derivative.cos_coefficient(0, 0) == pytest.approx(1.0, rel=1e-10)
    np.testing.assert_allclose(derivative.cc.ravel()[1:], 0.0, atol=1e-12)
    assert mass_derivative(branch, 1) == pytest.approx(-2.0 * FOUR_PI_SQ, rel=1e-10)
