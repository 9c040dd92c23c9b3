import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ALPHAS, C_GRID, brute_autocorr
from corrtransfer.density import (
    DegenerateDensityError,
    NoiseSpec,
    density_grid,
    density_peak,
    density_type_i,
    density_type_ii,
    g_function,
    normalized_inverse_g,
    stationary_density,
)
from corrtransfer.prc import PrcShape
from corrtransfer.quadrature import periodic_trapezoid

PHI64 = np.linspace(0, 2 * np.pi, 64, endpoint=False)


def test_g_function_examples():
    assert g_function(PrcShape(0.0), 0.5, 0.0) == pytest.approx(0.5)
    assert g_function(PrcShape(1.0), 0.0, 2.3) == 1.0
    h = brute_autocorr(math.pi / 2, math.pi) / brute_autocorr(math.pi / 2, 0.0)
    assert 1 - 0.6 * h == pytest.approx(0.8, abs=1e-12)
    assert g_function(PrcShape.type_i(), 0.6, math.pi) == pytest.approx(0.8, abs=1e-12)


def test_g_function_degenerate_at_full_correlation():
    with pytest.raises(DegenerateDensityError):
        g_function(PrcShape(0.3), 1.0, 0.0)
    assert g_function(PrcShape(0.3), 1.0, 1.0) > 0


def test_density_examples():
    assert stationary_density(PrcShape(0.0), 0.6, 0.0) == pytest.approx(1 / math.pi, rel=1e-14)
    assert stationary_density(PrcShape(0.7), 0.0, 1.3) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    # P_I(0; 0.8) = (sqrt3/2pi) sqrt(0.44) / 0.6
    expected = math.sqrt(3) / (2 * math.pi) * math.sqrt(0.64 - 3.2 + 3) / (3 - 1.6 - 0.8)
    assert stationary_density(PrcShape.type_i(), 0.8, 0.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.304758514, abs=1e-9)


def test_density_rejects_full_correlation():
    with pytest.raises(DegenerateDensityError):
        stationary_density(PrcShape(0.0), 1.0, 0.0)
    with pytest.raises(ValueError):
        stationary_density(PrcShape(0.0), -0.1, 0.0)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("c", C_GRID)
def test_closed_form_equals_normalized_inverse_g(alpha, c):
    shape = PrcShape(alpha)
    closed = stationary_density(shape, c, PHI64)
    recon = normalized_inverse_g(shape, c, PHI64)
    np.testing.assert_allclose(closed, recon, rtol=1e-8, atol=0)


@pytest.mark.parametrize("c", C_GRID)
def test_endpoint_closed_forms(c):
    np.testing.assert_allclose(stationary_density(PrcShape.type_i(), c, PHI64), density_type_i(c, PHI64), rtol=1e-12)
    np.testing.assert_allclose(stationary_density(PrcShape.type_ii(), c, PHI64), density_type_ii(c, PHI64), rtol=1e-12)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_peak_sharpens_with_correlation(alpha):
    peaks = [density_peak(PrcShape(alpha), c) for c in C_GRID]
    assert all(b >= a for a, b in zip(peaks, peaks[1:]))


@given(
    st.floats(min_value=0.0, max_value=math.pi / 2),
    st.floats(min_value=0.0, max_value=0.995),
    st.floats(min_value=-20.0, max_value=20.0),
)
def test_density_even_periodic_positive(alpha, c, phi):
    shape = PrcShape(alpha)
    p = stationary_density(shape, c, phi)
    assert p > 0
    assert stationary_density(shape, c, -phi) == pytest.approx(p, rel=1e-12)
    assert stationary_density(shape, c, phi + 2 * np.pi) == pytest.approx(p, rel=1e-10)


def test_density_grid_examples():
    g = density_grid(PrcShape(0.0), 0.0, 64)
    np.testing.assert_allclose(g.values, 1 / (2 * np.pi), rtol=1e-15)
    g = density_grid(PrcShape(0.0), 0.6, 256)
    assert g.values[0] == pytest.approx(1 / math.pi, rel=1e-14)
    g = density_grid(PrcShape(math.pi / 4), 0.4, 256)
    assert abs(g.total_mass() - 1) < 1e-10


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("c", C_GRID)
def test_density_grid_invariants(alpha, c):
    g = density_grid(PrcShape(alpha), c, 4096)
    assert np.all(g.values >= 0)
    assert abs(periodic_trapezoid(g.values) - 1) < 1e-10
    np.testing.assert_allclose(g.values[1:], g.values[:0:-1], rtol=0, atol=1e-12)


def test_density_grid_rejects_bad_size_and_c():
    with pytest.raises(ValueError):
        density_grid(PrcShape(0.0), 0.5, 100)
    with pytest.raises(DegenerateDensityError):
        density_grid(PrcShape(0.0), 1.0, 64)


def test_noise_spec_validation():
    NoiseSpec(1.0, 0.0)
    with pytest.raises(ValueError):
        NoiseSpec(1.2, 0.05)
    with pytest.raises(ValueError):
        NoiseSpec(0.5, -0.01)
