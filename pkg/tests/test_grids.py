"""Spectral machinery: multipliers, propagators, norms."""
import numpy as np
import pytest

from tdhfb.errors import NumericDomainError, TdhfbError
from tdhfb.grids import (Field, Grid, Kernel, field_outer, fourier_multiplier,
                         frac_sobolev_norm, free_propagator, gradient_norm_sq, plane_wave)

from .conftest import random_field_values, random_kernel


def test_grid_basic_invariants(grid):
    assert grid.h * grid.M == pytest.approx(grid.L, abs=0)
    assert grid.xi[0] == 0.0
    # standard FFT ordering: positive modes first, then negative
    assert grid.xi[1] == pytest.approx(2 * np.pi / grid.L)
    assert grid.xi[grid.M // 2] == pytest.approx(-np.pi * grid.M / grid.L)
    with pytest.raises(TdhfbError):
        Grid(d=1, M=48, L=16.0)
    with pytest.raises(TdhfbError):
        Grid(d=3, M=16, L=16.0)


def test_identity_multiplier_is_identity(grid):
    rng = np.random.default_rng(1)
    f = Field(grid, random_field_values(rng, grid))
    out = fourier_multiplier(f, lambda xi: np.ones_like(xi))
    np.testing.assert_allclose(out.values, f.values, rtol=0, atol=1e-12)


def test_plane_wave_is_multiplier_eigenfunction(grid):
    f = plane_wave(grid, 3)
    xi0 = 2 * np.pi * 3 / grid.L
    out = fourier_multiplier(f, lambda xi: xi**2)
    np.testing.assert_allclose(out.values, xi0**2 * f.values, rtol=1e-12)


def test_laplacian_multiplier_matches_finite_difference(grid):
    # smooth data: second centered difference agrees to O(h^2)
    x = grid.x
    f = Field(grid, np.exp(np.sin(2 * np.pi * x / grid.L)) + 0j)
    lap = fourier_multiplier(f, lambda xi: -(xi**2)).values
    fv = f.values
    fd = (np.roll(fv, -1) - 2 * fv + np.roll(fv, 1)) / grid.h**2
    assert np.max(np.abs(lap - fd)) < 5.0 * grid.h**2 * np.max(np.abs(lap))


def test_nonfinite_symbol_rejected(grid):
    rng = np.random.default_rng(2)
    f = Field(grid, random_field_values(rng, grid))
    with pytest.raises(NumericDomainError):
        fourier_multiplier(f, lambda xi: 1.0 / xi)  # inf at xi=0


def test_multiplier_composition(grid):
    rng = np.random.default_rng(3)
    f = Field(grid, random_field_values(rng, grid))
    m1 = lambda xi: 1.0 + 0.3 * np.cos(xi)
    m2 = lambda xi: np.exp(-0.1 * xi**2)
    once = fourier_multiplier(f, lambda xi: m1(xi) * m2(xi))
    twice = fourier_multiplier(fourier_multiplier(f, m1), m2)
    assert np.max(np.abs(once.values - twice.values)) < 1e-12 * np.max(np.abs(f.values))


def test_parseval(grid):
    rng = np.random.default_rng(4)
    f = Field(grid, random_field_values(rng, grid))
    lhs = grid.weight * np.sum(np.abs(f.values) ** 2)
    fhat = np.fft.fftn(f.values)
    rhs = (grid.weight / grid.n) * np.sum(np.abs(fhat) ** 2)
    assert abs(lhs - rhs) < 1e-12 * lhs


def test_free_propagator_identity_at_t0(grid):
    rng = np.random.default_rng(5)
    f = Field(grid, random_field_values(rng, grid))
    out = free_propagator(f, 0.0, (1,))
    np.testing.assert_allclose(out.values, f.values, atol=1e-14)


def test_free_propagator_plane_wave_phase(grid):
    f = plane_wave(grid, 2)
    xi0 = 2 * np.pi * 2 / grid.L
    t = 0.37
    out = free_propagator(f, t, (1,))
    np.testing.assert_allclose(out.values, np.exp(-1j * xi0**2 * t) * f.values, rtol=1e-12)


def test_free_propagator_kernel_mixed_signature(grid):
    # kernel e^{i(xi0 x + eta0 y)} under signature (+1,-1)
    a = plane_wave(grid, 2)
    b = plane_wave(grid, -3)
    k = field_outer(a, b)
    xi0 = 2 * np.pi * 2 / grid.L
    eta0 = -2 * np.pi * 3 / grid.L
    t = 0.21
    out = free_propagator(k, t, (1, -1))
    np.testing.assert_allclose(out.values, np.exp(-1j * t * (xi0**2 - eta0**2)) * k.values,
                               rtol=1e-11)


@pytest.mark.parametrize("signature", [(1,), (-1,)])
def test_free_propagator_unitary_field(grid, signature):
    rng = np.random.default_rng(6)
    f = Field(grid, random_field_values(rng, grid))
    out = free_propagator(f, 0.83, signature)
    assert out.l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)


def test_free_propagator_unitary_kernel(grid):
    rng = np.random.default_rng(7)
    k = random_kernel(rng, grid)
    out = free_propagator(k, 1.7, (1, 1))
    assert out.l2_norm() == pytest.approx(k.l2_norm(), rel=1e-12)


def test_frac_sobolev_norm_s0_is_l2(grid):
    rng = np.random.default_rng(8)
    f = Field(grid, random_field_values(rng, grid))
    assert frac_sobolev_norm(f, 0.0) == pytest.approx(f.l2_norm(), rel=1e-13)


def test_frac_sobolev_norm_plane_wave(grid):
    f = plane_wave(grid, 4)
    f = Field(grid, f.values / f.l2_norm())
    xi0 = 2 * np.pi * 4 / grid.L
    s = 0.5 + 0.125
    assert frac_sobolev_norm(f, s) == pytest.approx((1 + xi0**2) ** (s / 2), rel=1e-12)


def test_frac_sobolev_norm_cross_check_s1(grid):
    # ||<grad>^1 f||^2 == ||f||^2 + ||grad f||^2 via independent multipliers
    rng = np.random.default_rng(9)
    f = Field(grid, random_field_values(rng, grid))
    lhs = frac_sobolev_norm(f, 1.0)
    rhs = np.sqrt(f.l2_norm() ** 2 + gradient_norm_sq(f))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_frac_sobolev_negative_order_rejected(grid):
    f = plane_wave(grid, 1)
    with pytest.raises(TdhfbError):
        frac_sobolev_norm(f, -0.5)


def test_kernel_axis_multipliers_2d_grid():
    g = Grid(d=2, M=8, L=8.0)
    rng = np.random.default_rng(10)
    k = random_kernel(rng, g)
    # applying per-axis symbols commutes across the two kernel slots
    m = lambda x, y: 1.0 + 0.2 * np.sin(x) + 0.1 * np.cos(y)
    a = fourier_multiplier(fourier_multiplier(k, m, axes=(0,)), m, axes=(1,))
    b = fourier_multiplier(fourier_multiplier(k, m, axes=(1,)), m, axes=(0,))
    np.testing.assert_allclose(a.values, b.values, atol=1e-12)


def test_lattice_dispersion_matches_stencil(grid):
    rng = np.random.default_rng(11)
    f = Field(grid, random_field_values(rng, grid))
    lap = fourier_multiplier(f, grid.laplacian_symbol("lattice")).values
    fv = f.values
    fd = (np.roll(fv, -1) - 2 * fv + np.roll(fv, 1)) / grid.h**2
    np.testing.assert_allclose(lap, fd, atol=1e-11 * np.max(np.abs(fd)))
