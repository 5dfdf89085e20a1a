import os
import sys

import numpy as np
import pytest

# Add the root directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from errors import ConfigurationError, UnsupportedOrderError
from torus import SectorTag, l2_norm, reflect_y
from waves import *


def test_equilibrium_and_bifurcation_point():
    assert equilibrium_level(1) == pytest.approx(2.0)
    assert equilibrium_level(2) == pytest.approx(1.0)
    assert bifurcation_frequency(1) == pytest.approx(2.0)
    assert bifurcation_frequency(4) == pytest.approx(0.5)


def test_equilibrium_solves_the_stationary_equation():
    for p in (1, 2, 3):
        wave = stokes_wave(p, BranchKind.SS, 0.0, 2, 6)
        assert l2_norm(residual(wave.field, wave.c, p)) < 1e-12


def test_c2_ss_cubic_case():
    assert solvability_c2(1, BranchKind.SS) == pytest.approx(-1 / 48, abs=1e-12)


def test_c2_e_sector_cubic_case():
    assert solvability_c2(1, BranchKind.EPLUS) == pytest.approx(5 / 12, abs=1e-12)
    assert solvability_c2(1, BranchKind.EMINUS) == pytest.approx(5 / 12, abs=1e-12)


def test_c2_matches_closed_form_for_ss():
    for p in (2, 3):
        assert solvability_c2(p, BranchKind.SS) == pytest.approx(closed_form_c2(p, BranchKind.SS), rel=1e-10)
    assert solvability_c2(2, BranchKind.SS) == pytest.approx(-3 / 8, abs=1e-12)
    assert closed_form_c2(1, BranchKind.SS) is None


def test_stokes_wave_third_order():
    wave = stokes_wave(1, BranchKind.SS, 0.05, 3, 16)
    assert wave.field.cos_coefficient(1, 1) == pytest.approx(0.05, abs=1e-15)
    assert wave.c == pytest.approx(2 - 0.05 ** 2 / 48, abs=1e-12)
    assert wave.positive
    assert wave.sector is SectorTag.S


def test_generator_amplitude_of_e_sector_wave():
    wave = stokes_wave(1, BranchKind.EPLUS, 0.03, 3, 8)
    assert wave.sector is SectorTag.E
    assert generator_amplitude(wave.field, BranchKind.EPLUS) == pytest.approx(0.03, abs=1e-14)
    assert generator_amplitude(wave.field, BranchKind.EMINUS) == pytest.approx(0.0, abs=1e-14)


def test_ss_third_order_coefficients():
    a = 0.1
    field = stokes_wave(1, BranchKind.SS, a, 3, 6).field
    expected = np.zeros((7, 7))
    expected[0, 0] = 2 - 7 * a ** 2 / 48
    expected[1, 1] = a
    expected[2, 0] = expected[0, 2] = a ** 2 / 8
    expected[2, 2] = a ** 2 / 24
    expected[3, 1] = expected[1, 3] = 7 * a ** 3 / 384
    expected[3, 3] = a ** 3 / 768
    np.testing.assert_allclose(field.cc, expected, atol=1e-14)


def test_e_plus_third_order_coefficients():
    a = 0.1
    wave = stokes_wave(1, BranchKind.EPLUS, a, 3, 6)
    # cos(n(x + y)) = cos nx cos ny - sin nx sin ny
    cc = np.zeros((7, 7))
    ss = np.zeros((6, 6))
    cc[0, 0] = 2 + a ** 2 / 6
    for n, amplitude in ((1, a), (2, a ** 2 / 12), (3, a ** 3 / 192)):
        cc[n, n] = amplitude
        ss[n - 1, n - 1] = -amplitude
    np.testing.assert_allclose(wave.field.cc, cc, atol=1e-14)
    np.testing.assert_allclose(wave.field.ss, ss, atol=1e-14)
    assert wave.c == pytest.approx(2 + 5 * a ** 2 / 12, abs=1e-14)


def test_e_minus_is_reflection_of_e_plus():
    plus = stokes_wave(1, BranchKind.EPLUS, 0.1, 3, 6)
    minus = stokes_wave(1, BranchKind.EMINUS, 0.1, 3, 6)
    mirrored = reflect_y(plus.field)
    np.testing.assert_allclose(minus.field.cc, mirrored.cc, atol=1e-15)
    np.testing.assert_allclose(minus.field.ss, mirrored.ss, atol=1e-15)
    assert minus.c == pytest.approx(plus.c, abs=1e-15)


def test_residual_order_second_order_expansion():
    for p, branch in ((1, BranchKind.SS), (2, BranchKind.EPLUS), (3, BranchKind.SS)):
        assert stokes_residual_order(p, branch, N=8, order=2) == pytest.approx(3.0, abs=0.15)


def test_residual_order_third_order_expansion():
    amplitudes = np.geomspace(1e-2, 1e-1, 7)
    for branch in (BranchKind.SS, BranchKind.EPLUS):
        slope = stokes_residual_order(1, branch, N=8, order=3, amplitudes=amplitudes)
        assert 3.8 <= slope <= 4.3


def test_expected_inverse_form():
    assert expected_inverse_form(1, BranchKind.SS, 2.0) == pytest.approx(-8 * np.pi ** 2)
    assert expected_inverse_form(1, BranchKind.EPLUS, 2.0) == pytest.approx(-32 * np.pi ** 2)


def test_unsupported_orders():
    with pytest.raises(UnsupportedOrderError):
        stokes_wave(2, BranchKind.SS, 0.05, 3, 16)
    with pytest.raises(UnsupportedOrderError):
        stokes_wave(1, BranchKind.SS, 0.05, 4, 16)


def test_truncation_too_small():
    with pytest.raises(ConfigurationError):
        stokes_wave(1, BranchKind.SS, 0.05, 2, 2)


def test_large_amplitude_loses_positivity():
    wave = stokes_wave(1, BranchKind.SS, 3.0, 2, 8)
    assert not wave.positive
