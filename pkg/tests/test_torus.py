import os
import sys

import numpy as np
import pytest

# Add the root directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from errors import NumericRangeError, ResolutionError, SectorMismatchError
from torus import *


def cos_cos(N: int = 4) -> SpectralField:
    return SpectralField.from_modes(SectorTag.S, N, cc={(1, 1): 1.0})


def test_parseval_weights():
    cc_weights, ss_weight = parseval_weights(3)
    assert cc_weights[0, 0] == pytest.approx(4 * np.pi ** 2)
    assert cc_weights[2, 0] == pytest.approx(2 * np.pi ** 2)
    assert cc_weights[0, 1] == pytest.approx(2 * np.pi ** 2)
    assert cc_weights[1, 3] == pytest.approx(np.pi ** 2)
    assert ss_weight == pytest.approx(np.pi ** 2)


def test_basis_dimension_and_map():
    assert basis_dimension(SectorTag.S, 4) == 25
    assert basis_dimension(SectorTag.E, 4) == 25 + 16
    modes = basis_map(SectorTag.E, 2)
    assert modes[0] == ("cc", 0, 0)
    assert modes[4] == ("cc", 1, 1)
    assert modes[9] == ("ss", 1, 1)
    assert len(modes) == basis_dimension(SectorTag.E, 2)


def test_nodal_round_trip_s_sector():
    f = cos_cos()
    grid = TorusGrid(9)
    x = grid.nodes
    values = coeff_to_nodal(f, grid)
    np.testing.assert_allclose(values, np.outer(np.cos(x), np.cos(x)), atol=1e-14)

    back = nodal_to_coeff(values, SectorTag.S, 4)
    np.testing.assert_allclose(back.cc, f.cc, atol=1e-14)


def test_nodal_round_trip_e_sector():
    # cos(x + y) = cos x cos y - sin x sin y
    f = SpectralField.from_modes(SectorTag.E, 3, cc={(1, 1): 1.0}, ss={(1, 1): -1.0})
    grid = TorusGrid(8)
    x = grid.nodes
    values = coeff_to_nodal(f, grid)
    np.testing.assert_allclose(values, np.cos(x[:, None] + x[None, :]), atol=1e-14)

    back = nodal_to_coeff(values, SectorTag.E, 3)
    np.testing.assert_allclose(back.cc, f.cc, atol=1e-14)
    np.testing.assert_allclose(back.ss, f.ss, atol=1e-14)


def test_norms():
    assert l2_norm(cos_cos()) == pytest.approx(np.pi)
    assert l2_norm(SpectralField.constant(1.0, SectorTag.S, 4)) == pytest.approx(2 * np.pi)


def test_vector_coordinates_are_orthonormal():
    rng = np.random.default_rng(3)
    f = random_field(SectorTag.E, 4, rng)
    g = random_field(SectorTag.E, 4, rng)
    assert float(f.to_vector() @ g.to_vector()) == pytest.approx(inner_product(f, g), rel=1e-12)
    assert l2_norm(f) == pytest.approx(1.0)

    restored = SpectralField.from_vector(f.to_vector(), SectorTag.E, 4)
    np.testing.assert_allclose(restored.ss, f.ss, atol=1e-15)


def test_field_power_is_exact_projection():
    # (cos x cos y)^2 = (1 + cos 2x)(1 + cos 2y) / 4
    square = field_power(cos_cos(), 2)
    expected = SpectralField.from_modes(SectorTag.S, 4, cc={(0, 0): 0.25, (2, 0): 0.25, (0, 2): 0.25, (2, 2): 0.25})
    np.testing.assert_allclose(square.cc, expected.cc, atol=1e-14)


def test_field_product_truncates():
    f = SpectralField.from_modes(SectorTag.S, 2, cc={(2, 0): 1.0})
    product = field_product(f, f)
    # cos^2 2x = 1/2 + cos(4x)/2, the second mode is beyond N = 2
    assert product.cos_coefficient(0, 0) == pytest.approx(0.5)
    assert np.allclose(product.cc[1:, :], 0.0, atol=1e-14)


def test_laplacian():
    f = SpectralField.from_modes(SectorTag.E, 3, cc={(1, 2): 1.0}, ss={(2, 1): 2.0})
    lap = laplacian_apply(f)
    assert lap.cos_coefficient(1, 2) == pytest.approx(-5.0)
    assert lap.sin_coefficient(2, 1) == pytest.approx(-10.0)


def test_symmetry_violation_detected():
    grid = TorusGrid(9)
    values = np.sin(grid.nodes)[:, None] * np.ones(9)[None, :]
    with pytest.raises(SectorMismatchError):
        nodal_to_coeff(values, SectorTag.S, 4)


def test_s_sector_rejects_sine_modes():
    with pytest.raises(SectorMismatchError):
        SpectralField(SectorTag.S, np.zeros((3, 3)), np.ones((2, 2)))


def test_incompatible_fields():
    with pytest.raises(SectorMismatchError):
        inner_product(cos_cos(4), cos_cos(5))
    with pytest.raises(SectorMismatchError):
        cos_cos(4) + cos_cos(4).to_sector(SectorTag.E)


def test_grid_too_small():
    with pytest.raises(ResolutionError):
        coeff_to_nodal(cos_cos(4), TorusGrid(8))


def test_overflow_is_reported():
    with pytest.raises(NumericRangeError):
        field_map(SpectralField.constant(1.0, SectorTag.S, 2), lambda values: np.exp(1e4 * values), 1)


def test_symmetry_operations():
    f = SpectralField.from_modes(SectorTag.E, 3, cc={(1, 2): 1.0}, ss={(1, 1): 1.0})
    shifted = shift_half_period(f, 0)
    assert shifted.cos_coefficient(1, 2) == pytest.approx(-1.0)
    assert shifted.sin_coefficient(1, 1) == pytest.approx(-1.0)

    swapped = swap_axes(f)
    assert swapped.cos_coefficient(2, 1) == pytest.approx(1.0)

    reflected = reflect_y(f)
    assert reflected.sin_coefficient(1, 1) == pytest.approx(-1.0)
    assert reflected.cos_coefficient(1, 2) == pytest.approx(1.0)


def test_nodal_minimum_and_quadrature():
    f = SpectralField.constant(2.0, SectorTag.S, 4) + 0.5 * cos_cos(4)
    assert nodal_minimum(f) == pytest.approx(1.5)

    grid = TorusGrid(16)
    assert quadrature(coeff_to_nodal(f, grid)) == pytest.approx(8 * np.pi ** 2)
