import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mindet.errors import (
    EdgeSupport,
    FlowLeavesGrid,
    GridIncompatible,
    GridMismatch,
    InvalidCharFn,
    InvalidSpec,
    NotADensity,
    ThetaOffGrid,
)
from mindet.grid_core import (
    CharFn,
    DensityFunction,
    Grid,
    GridFunction,
    distance,
    fourier_transform,
    integrate,
    inner_product,
    inverse_fourier_transform,
    shift_samples,
    shifted_inner_products,
    spectral_derivative,
    support_components,
)

from conftest import BUMP_INTEGRAL, gaussian


class TestGrid:
    def test_spacing_and_points(self):
        g = Grid(-1.0, 1.0, 8)
        assert g.dx == 0.25
        assert g.points[0] == -1.0
        assert g.points[-1] == 0.75  # x_max excluded
        assert g.length == 2.0

    @pytest.mark.parametrize("args", [(0.0, 0.0, 8), (1.0, 0.0, 8), (0.0, 1.0, 4), (0.0, 1.0, 12)])
    def test_rejects_bad_grids(self, args):
        with pytest.raises(InvalidSpec):
            Grid(*args)

    def test_points_read_only(self):
        g = Grid(-1.0, 1.0, 8)
        with pytest.raises(ValueError):
            g.points[0] = 3.0

    def test_reciprocal(self):
        g = Grid(-4.0, 4.0, 64)
        r = g.reciprocal()
        assert r.n_points == 64
        assert math.isclose(r.dx * g.dx * g.n_points, 2 * math.pi)
        assert math.isclose(r.x_min, -32 * r.dx)

    def test_offsets(self):
        g = Grid(-1.0, 1.0, 8)
        assert g.index_of(0.5) == 6
        assert g.zero_index == 4
        with pytest.raises(ThetaOffGrid):
            g.offset_cells(0.1)


class TestGridFunction:
    def test_rejects_nonfinite(self):
        g = Grid(0.0, 1.0, 8)
        vals = np.zeros(8)
        vals[3] = np.nan
        with pytest.raises(InvalidSpec):
            GridFunction(g, vals)

    def test_rejects_wrong_length(self):
        with pytest.raises(InvalidSpec):
            GridFunction(Grid(0.0, 1.0, 8), np.zeros(7))

    def test_arithmetic_requires_same_grid(self):
        a = GridFunction.zeros(Grid(0.0, 1.0, 8))
        b = GridFunction.zeros(Grid(0.0, 2.0, 8))
        with pytest.raises(GridMismatch):
            a + b


def test_integrate_bump_matches_quadrature():
    g = Grid(-2.0, 2.0, 2048)
    f = GridFunction.from_callable(
        g, lambda x: np.where(np.abs(x) < 1, np.exp(-1 / np.maximum(1 - x**2, 1e-300)), 0.0)
    )
    assert abs(integrate(f) - BUMP_INTEGRAL) <= 1e-12


def test_integrate_odd_function_vanishing_at_ends():
    g = Grid(-1.0, 1.0, 256)
    f = GridFunction.from_callable(g, lambda x: x * (1 - x**2))
    assert abs(integrate(f)) <= 1e-14


def test_inner_product_is_conjugate_linear_in_first_argument(small_grid):
    x = small_grid.points
    f = GridFunction(small_grid, np.exp(-x**2) * (1 + 1j * x))
    g = GridFunction(small_grid, np.exp(-(x - 0.3) ** 2))
    assert inner_product(f * 2j, g) == pytest.approx(-2j * inner_product(f, g), rel=1e-14)
    assert inner_product(g, f) == pytest.approx(np.conj(inner_product(f, g)), rel=1e-14)


class TestFourier:
    def test_gaussian_on_reciprocal_grid(self):
        g = Grid(-16.0, 16.0, 1024)
        f = GridFunction(g, np.exp(-0.5 * g.points**2))
        r = g.reciprocal()
        F = fourier_transform(f, r)
        assert np.max(np.abs(F.samples - np.exp(-0.5 * r.points**2))) <= 1e-12

    def test_gaussian_on_arbitrary_grid(self):
        g = Grid(-16.0, 16.0, 1024)
        f = GridFunction(g, np.exp(-0.5 * g.points**2))
        k = Grid(-5.0, 5.0, 1024)
        F = fourier_transform(f, k)
        assert np.max(np.abs(F.samples - np.exp(-0.5 * k.points**2))) <= 1e-10

    def test_shift_theorem(self):
        g = Grid(-16.0, 16.0, 1024)
        f = GridFunction(g, np.exp(-0.5 * (g.points - 2.0) ** 2))
        r = g.reciprocal()
        F = fourier_transform(f, r)
        expected = np.exp(-0.5 * r.points**2) * np.exp(-2j * r.points)
        assert np.max(np.abs(F.samples - expected)) <= 1e-12

    def test_round_trip_and_parseval(self, bump):
        r = bump.grid.reciprocal()
        F = fourier_transform(bump, r)
        back = inverse_fourier_transform(F, bump.grid)
        assert distance(back, bump, "Linf") <= 1e-9
        assert abs(F.norm() ** 2 - bump.norm() ** 2) <= 1e-9

    def test_target_must_not_be_coarser(self):
        g = Grid(-1.0, 1.0, 64)
        with pytest.raises(GridMismatch):
            fourier_transform(GridFunction.zeros(g), Grid(-1.0, 1.0, 32))


@settings(max_examples=25, deadline=None)
@given(
    a=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    s=st.floats(min_value=0.5, max_value=2.0),
)
def test_fourier_linearity(a, s):
    g = Grid(-16.0, 16.0, 256)
    f = GridFunction(g, np.exp(-0.5 * g.points**2))
    h = GridFunction(g, np.exp(-0.5 * (g.points / s) ** 2))
    r = g.reciprocal()
    lhs = fourier_transform(f * a + h, r).samples
    rhs = a * fourier_transform(f, r).samples + fourier_transform(h, r).samples
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + abs(a))


class TestSpectralDerivative:
    @pytest.mark.filterwarnings("ignore::mindet.errors.EdgeSupport")
    def test_periodic_sine(self):
        g = Grid(0.0, 2 * math.pi, 64)
        f = GridFunction(g, np.sin(3 * g.points))
        d = spectral_derivative(f, 1)
        assert np.max(np.abs(d.samples - 3 * np.cos(3 * g.points))) <= 1e-12

    def test_bump_second_derivative_at_center(self):
        # d^2/dx^2 exp(-1/(1-x^2)) at 0 is -2/e
        g = Grid(-4.0, 4.0, 4096)
        f = GridFunction.from_callable(
            g, lambda x: np.where(np.abs(x) < 1, np.exp(-1 / np.maximum(1 - x**2, 1e-300)), 0.0)
        )
        for window in ("grid", "support"):
            d2 = spectral_derivative(f, 2, window=window)
            assert abs(d2.samples[g.zero_index] + 2 / math.e) <= 1e-9

    def test_support_window_keeps_zeros(self, pair):
        f1, f2 = pair
        f = f1 + f2
        d = spectral_derivative(f, 3, window="support")
        assert np.all(d.samples[f.samples == 0] == 0)

    def test_edge_warning(self):
        g = Grid(0.0, 1.0, 64)
        f = GridFunction(g, np.ones(64))
        with pytest.warns(EdgeSupport):
            spectral_derivative(f, 1)

    def test_no_warning_for_padded_bump(self, bump):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            spectral_derivative(bump, 1, window="grid")
            spectral_derivative(bump, 1, window="support")

    def test_order_zero_is_identity(self, bump):
        assert spectral_derivative(bump, 0) is bump


def test_support_components_splitting():
    s = np.array([0, 0, 1e-20, 1, 1e-20, 0, 0, 1e-20, 2, 1e-20, 0], dtype=float)
    assert support_components(s) == [(2, 4), (7, 9)]
    # an isolated zero between large samples does not split
    s2 = np.array([0, 0.5, 1, 0, 1, 0.5, 0], dtype=float)
    assert support_components(s2) == [(1, 5)]
    # two or more zeros split regardless of the neighbours
    s3 = np.array([0, 0.5, 1, 0, 0, 1, 0.5, 0], dtype=float)
    assert support_components(s3) == [(1, 2), (5, 6)]


class TestShifts:
    def test_shift_samples(self):
        g = Grid(0.0, 8.0, 8)
        f = GridFunction(g, np.array([0, 0, 1, 2, 3, 0, 0, 0], dtype=float))
        assert np.array_equal(shift_samples(f, 1).samples.real, [0, 1, 2, 3, 0, 0, 0, 0])
        assert np.array_equal(shift_samples(f, -2).samples.real, [0, 0, 0, 0, 1, 2, 3, 0])
        with pytest.raises(FlowLeavesGrid):
            shift_samples(f, 3)
        assert np.array_equal(shift_samples(f, 3, strict=False).samples.real, [2, 3, 0, 0, 0, 0, 0, 0])

    def test_shifted_inner_products_match_direct(self, small_grid):
        x = small_grid.points
        f = GridFunction(small_grid, np.where(np.abs(x) < 1, 1 - x**2, 0.0))
        g = GridFunction(small_grid, np.where(np.abs(x - 0.5) < 1, 1j * (1 - (x - 0.5) ** 2), 0.0))
        thetas = Grid(-2.0, 2.0, 256)
        got = shifted_inner_products(f, g, thetas)
        for m in (0, 37, 128, 200):
            cells = round(thetas.points[m] / small_grid.dx)
            want = inner_product(f, shift_samples(g, cells, strict=False))
            assert got[m] == pytest.approx(want, abs=1e-15)

    def test_spacing_must_match(self, small_grid):
        f = GridFunction.zeros(small_grid)
        with pytest.raises(GridIncompatible):
            shifted_inner_products(f, f, Grid(-1.0, 1.0, 64))


class TestDensityAndCharFn:
    def test_gaussian_density_accepted(self):
        g = Grid(-10.0, 10.0, 1024)
        P = DensityFunction.from_values(g, gaussian(g.points))
        assert P.normalization_error() <= 1e-12
        assert P.negativity() == 0.0

    def test_negative_density_rejected(self):
        g = Grid(-10.0, 10.0, 1024)
        v = gaussian(g.points)
        v[100] = -1e-3
        with pytest.raises(NotADensity):
            DensityFunction.from_values(g, v)
        P = DensityFunction.from_values(g, v, strict=False)
        assert P.negativity() < 0

    def test_unnormalized_density_rejected(self):
        g = Grid(-10.0, 10.0, 1024)
        with pytest.raises(NotADensity):
            DensityFunction.from_values(g, 2 * gaussian(g.points))

    def test_charfn_invariants(self):
        g = Grid(-8.0, 8.0, 256)
        M = CharFn(GridFunction(g, np.exp(-0.5 * g.points**2)))
        assert M.at_zero() == 1.0
        assert M.hermitian_residual() <= 1e-15
        with pytest.raises(InvalidCharFn):
            CharFn(GridFunction(g, 2 * np.exp(-0.5 * g.points**2)))
        with pytest.raises(InvalidCharFn):
            CharFn(GridFunction(g, np.exp(-0.5 * g.points**2 + 1j * g.points**2)))


def test_distance_metrics():
    g = Grid(0.0, 1.0, 8)
    p = GridFunction(g, np.zeros(8))
    q = GridFunction(g, np.r_[np.ones(4), np.zeros(4)] * 2.0)
    assert distance(p, q, "L1") == 1.0
    assert distance(p, q, "Linf") == 2.0
    with pytest.raises(ValueError):
        distance(p, q, "L2")
