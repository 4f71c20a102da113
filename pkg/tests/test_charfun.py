import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mindet.charfun import (
    MomentVector,
    autocorrelation_charfun,
    charfun_derivative_at_zero,
    charfun_from_density,
    density_from_charfun,
    moment_tolerance,
    moments_from_charfun,
    moments_from_density,
    reconciled_density,
    support_extent,
)
from mindet.errors import InvalidSpec, NoCompactSupport, NotADensity, OrderTooHigh
from mindet.generators import BumpSpec, make_bump
from mindet.grid_core import CharFn, DensityFunction, Grid, GridFunction, fourier_transform

from conftest import BUMP_M2, BUMP_M_AT_1, gaussian


@pytest.fixture(scope="module")
def M0(bump):
    return autocorrelation_charfun(bump, bump.grid)


@pytest.fixture(scope="module")
def gauss_pair():
    g = Grid(-40.0, 40.0, 4096)
    return DensityFunction.from_values(g, gaussian(g.points)), g


class TestMomentVector:
    def test_sigma_from_values(self):
        mv = MomentVector.from_values([1.0, 1.0, 5.0])
        assert mv.sigma_ref == 2.0

    def test_tolerance_formula(self):
        assert moment_tolerance(4, 2.0, 100.0) == pytest.approx(1e-8 * 16 + 1e-4)
        mv = MomentVector.from_values([1.0, 0.0, 4.0, 0.0, 48.0])
        np.testing.assert_allclose(mv.tolerances(), [1e-8 + 1e-6, 2e-8, 4e-8 + 4e-6, 8e-8, 16e-8 + 48e-6])

    def test_requires_values(self):
        with pytest.raises(InvalidSpec):
            MomentVector((), 1.0)


class TestAutocorrelation:
    def test_normalized_at_zero(self, M0):
        assert M0.at_zero() == pytest.approx(1.0, abs=1e-14)

    def test_value_at_one_matches_quadrature(self, M0):
        assert M0.at(1.0).real == pytest.approx(BUMP_M_AT_1, abs=1e-10)

    def test_hermitian_and_bounded(self, M0):
        assert M0.hermitian_residual() <= 1e-15
        assert np.max(np.abs(M0.values)) <= 1.0 + 1e-14

    def test_exact_zero_beyond_support(self, M0):
        theta = M0.grid.points
        assert np.all(M0.values[np.abs(theta) > 2.0 + M0.grid.dx] == 0)

    def test_support_extent(self, M0):
        L = support_extent(M0)
        assert abs(L - 2.0) <= 2 * M0.grid.dx

    def test_extent_raises_without_compact_support(self):
        g = Grid(-4.0, 4.0, 256)
        M = CharFn(GridFunction(g, np.exp(-0.5 * g.points**2)))
        with pytest.raises(NoCompactSupport):
            support_extent(M)
        assert support_extent(M, drop_tol=1e-3) == pytest.approx(math.sqrt(-2 * math.log(1e-3)), abs=0.05)


class TestInversion:
    def test_density_is_squared_modulus(self, bump, M0):
        r = bump.grid.reciprocal()
        P = density_from_charfun(M0, r)
        F = fourier_transform(bump, r)
        assert np.max(np.abs(P.values - np.abs(F.samples) ** 2)) <= 1e-8

    def test_gaussian_charfun_inverts_to_gaussian(self):
        th = Grid(-40.0, 40.0, 4096)
        M = CharFn(GridFunction(th, np.exp(-0.5 * th.points**2)))
        r = th.reciprocal()
        P = density_from_charfun(M, r)
        assert np.max(np.abs(P.values - gaussian(r.points))) <= 1e-12

    def test_round_trip(self, gauss_pair):
        P, g = gauss_pair
        th = g.reciprocal()
        M = charfun_from_density(P, th)
        assert np.max(np.abs(M.values - np.exp(-0.5 * th.points**2))) <= 1e-12

    def test_rejects_imaginary_residue(self):
        th = Grid(-8.0, 8.0, 256)
        # a non-Hermitian "charfun" gives a complex inverse
        vals = np.exp(-0.5 * th.points**2) * (1 + 0.5j * np.sin(th.points) + 0.3 * np.cos(th.points))
        M = CharFn(GridFunction(th, vals / vals[th.zero_index]), strict=False)
        with pytest.raises(NotADensity):
            density_from_charfun(M, th.reciprocal())

    def test_reconciled_density_detects_disagreement(self, bump, M0):
        r = bump.grid.reciprocal()
        direct = DensityFunction.from_values(r, np.abs(fourier_transform(bump, r).samples) ** 2)
        assert reconciled_density(M0, direct) is direct
        shifted = DensityFunction.from_values(r, np.roll(direct.values, 3))
        with pytest.raises(NotADensity):
            reconciled_density(M0, shifted)


class TestMoments:
    def test_gaussian_moments(self, gauss_pair):
        P, _ = gauss_pair
        m = moments_from_density(P, 8)
        np.testing.assert_allclose(m.values, [1, 0, 1, 0, 3, 0, 15, 0, 105], atol=1e-10)

    def test_bump_second_moment_matches_quadrature(self, bump):
        r = bump.grid.reciprocal()
        P = DensityFunction.from_values(r, np.abs(fourier_transform(bump, r).samples) ** 2)
        assert moments_from_density(P, 2)[2] == pytest.approx(BUMP_M2, rel=1e-10)

    def test_charfun_route_gaussian(self):
        th = Grid(-8.0, 8.0, 4096)
        M = CharFn(GridFunction(th, np.exp(-0.5 * th.points**2 + 0.3j * th.points)))
        m = moments_from_charfun(M, 4)
        # N(0.3, 1): 1, mu, mu^2 + 1, mu^3 + 3 mu, mu^4 + 6 mu^2 + 3
        mu = 0.3
        want = [1, mu, mu**2 + 1, mu**3 + 3 * mu, mu**4 + 6 * mu**2 + 3]
        np.testing.assert_allclose(m.values, want, atol=1e-7)

    def test_two_routes_agree_for_bump(self, bump, M0):
        r = bump.grid.reciprocal()
        P = DensityFunction.from_values(r, np.abs(fourier_transform(bump, r).samples) ** 2)
        a = moments_from_density(P, 4)
        b = moments_from_charfun(M0, 4)
        assert np.all(np.abs(np.subtract(a.values, b.values)) <= a.tolerances())

    def test_inverted_density_floor_spoils_odd_moments(self, bump, M0):
        # inversion leaves ~1e-17 noise in the tails; r^3 weighting lifts it above tol_3
        r = bump.grid.reciprocal()
        inverted = density_from_charfun(M0, r)
        direct = DensityFunction.from_values(r, np.abs(fourier_transform(bump, r).samples) ** 2)
        tail = np.abs(r.points) > 1000
        assert np.max(np.abs(inverted.values[tail])) > 1e-18
        assert np.max(direct.values[tail]) < 1e-25
        tol3 = moments_from_density(direct, 3).tolerances()[3]
        assert abs(moments_from_density(direct, 3)[3]) <= tol3
        assert abs(moments_from_density(inverted, 3)[3]) > tol3

    def test_order_caps(self, bump, M0):
        P = density_from_charfun(M0, bump.grid.reciprocal())
        with pytest.raises(OrderTooHigh):
            moments_from_density(P, 13)
        with pytest.raises(OrderTooHigh):
            moments_from_charfun(M0, 5)

    def test_derivative_stencil_needs_room(self):
        th = Grid(-0.05, 0.05, 16)
        M = CharFn(GridFunction(th, np.exp(-0.5 * th.points**2)))
        with pytest.raises(InvalidSpec):
            charfun_derivative_at_zero(M, 2)


@settings(max_examples=15, deadline=None)
@given(half_width=st.sampled_from([0.5, 0.75, 0.9]), theta_cells=st.integers(-511, 511))
def test_autocorrelation_is_hermitian_pointwise(half_width, theta_cells):
    g = Grid(-4.0, 4.0, 1024)
    f = make_bump(BumpSpec(0.1, half_width, amplitude_phase=1j), g)
    M = autocorrelation_charfun(f, g)
    z = g.zero_index
    assert M.values[z + theta_cells] == pytest.approx(np.conj(M.values[z - theta_cells]), abs=1e-15)
