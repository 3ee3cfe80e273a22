import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import awd
from awd.errors import ConfigurationError, OutOfDomainError

from conftest import random_field


class TestMakeGrid:
    def test_unit_spacing(self):
        g = awd.make_grid(2, [256, 256], [255.0, 255.0])
        assert g.spacing == (1.0, 1.0)

    def test_centered_coordinates_match_signed_probe_positions(self):
        # a 256-point axis with unit spacing spans [-127.5, 127.5], so the
        # signed positions (-64, 0) and (64, 0) are interior points
        g = awd.make_grid(2, [256, 256], [255.0, 255.0])
        x = g.axis_coordinates(0)
        assert x[0] == -127.5 and x[-1] == 127.5
        assert g.contains((-64.0, 0.0)) and g.contains((64.0, 0.0))

    def test_3d_unit_spacing(self):
        g = awd.make_grid(3, [64, 64, 64], [63.0, 63.0, 63.0])
        assert g.spacing == (1.0, 1.0, 1.0)

    def test_index_to_coordinate(self):
        g = awd.make_grid(2, [11, 11], [20.0, 20.0])
        assert g.axis_coordinates(0)[3] == pytest.approx(-10.0 + 3 * 2.0)

    @pytest.mark.parametrize("ndim,points,extent", [
        (4, [8, 8, 8, 8], [1.0] * 4),
        (2, [8, 8, 8], [1.0, 1.0]),
        (2, [8, 8], [1.0]),
        (2, [4, 8], [1.0, 1.0]),
        (2, [8, 8], [0.0, 1.0]),
        (2, [8, 8], [-3.0, 1.0]),
    ])
    def test_invalid_grids_rejected(self, ndim, points, extent):
        with pytest.raises(ConfigurationError):
            awd.make_grid(ndim, points, extent)


class TestScalarField:
    def test_shape_mismatch(self, grid32):
        with pytest.raises(ConfigurationError):
            awd.ScalarField(grid32, np.zeros((4, 4)))

    def test_non_finite_rejected(self, grid32):
        bad = np.zeros(grid32.shape)
        bad[3, 3] = np.nan
        with pytest.raises(ConfigurationError):
            awd.ScalarField(grid32, bad)

    def test_values_frozen(self, grid32):
        f = awd.constant_field(grid32, 1.0)
        with pytest.raises(ValueError):
            f.values[0, 0] = 2.0


class TestLaplacian:
    def test_constant_field_annihilated(self, grid32):
        lap = awd.laplacian(awd.constant_field(grid32, 5.0))
        assert np.all(lap.values == 0.0)

    def test_quadratic_exact_2d(self):
        g = awd.make_grid(2, [32, 32], [31.0, 31.0])
        u = awd.field_from_function(g, lambda x, y: x**2 + y**2)
        lap = awd.laplacian(u)
        assert np.abs(lap.values[1:-1, 1:-1] - 4.0).max() < 1e-10

    def test_quadratic_exact_3d(self):
        g = awd.make_grid(3, [12, 12, 12], [11.0, 11.0, 11.0])
        u = awd.field_from_function(g, lambda x, y, z: x**2)
        lap = awd.laplacian(u)
        assert np.abs(lap.values[1:-1, 1:-1, 1:-1] - 2.0).max() < 1e-10

    def test_boundary_ring_zero(self, grid32):
        lap = awd.laplacian(random_field(grid32, 3))
        assert np.all(lap.values[0, :] == 0.0)
        assert np.all(lap.values[-1, :] == 0.0)
        assert np.all(lap.values[:, 0] == 0.0)
        assert np.all(lap.values[:, -1] == 0.0)

    def test_affine_fields_zero(self, grid32):
        u = awd.field_from_function(grid32, lambda x, y: 3.0 - 2.0 * x + 0.7 * y)
        lap = awd.laplacian(u)
        assert np.abs(lap.values[1:-1, 1:-1]).max() < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1),
           a=st.floats(-10, 10), b=st.floats(-10, 10))
    def test_linearity(self, seed, a, b):
        g = awd.make_grid(2, [16, 16], [15.0, 15.0])
        u = random_field(g, seed)
        v = random_field(g, seed + 1)
        combined = awd.laplacian(awd.ScalarField(g, a * u.values + b * v.values))
        split = a * awd.laplacian(u).values + b * awd.laplacian(v).values
        scale = max(np.abs(split).max(), 1.0)
        assert np.abs(combined.values - split).max() <= 1e-12 * scale

    def test_second_order_convergence_on_sine(self):
        L = 8.0
        errors = []
        for n in (33, 65):
            g = awd.make_grid(2, [n, n], [L, L])
            u = awd.field_from_function(
                g, lambda x, y: np.sin(2 * np.pi * x / L) * np.sin(2 * np.pi * y / L)
            )
            exact = -2.0 * (2 * np.pi / L) ** 2 * u.values
            lap = awd.laplacian(u)
            errors.append(
                np.abs(lap.values[1:-1, 1:-1] - exact[1:-1, 1:-1]).max()
            )
        assert errors[0] / errors[1] >= 3.5


class TestInterpolate:
    def test_node_identity(self, grid32):
        u = random_field(grid32, 11)
        pos = (grid32.axis_coordinates(0)[7], grid32.axis_coordinates(1)[20])
        assert awd.interpolate(u, pos) == u.values[7, 20]

    def test_cell_center_average(self):
        g = awd.make_grid(2, [5, 5], [4.0, 4.0])
        vals = np.zeros((5, 5))
        vals[1, 1] = 0.0
        vals[2, 1] = 0.0
        vals[1, 2] = 0.0
        vals[2, 2] = 4.0
        u = awd.ScalarField(g, vals)
        # midpoint of the cell with corners {0, 0, 0, 4}
        assert awd.interpolate(u, (-0.5, -0.5)) == pytest.approx(1.0)

    def test_linear_field_reproduced(self, grid32):
        u = awd.field_from_function(grid32, lambda x, y: x)
        for pos in [(7.25, 0.0), (-3.3, 8.1), (12.9, -14.0)]:
            assert awd.interpolate(u, pos) == pytest.approx(pos[0], abs=1e-12)

    def test_trilinear_exact_on_multilinear(self):
        g = awd.make_grid(3, [8, 8, 8], [7.0, 7.0, 7.0])
        u = awd.field_from_function(
            g, lambda x, y, z: 2.0 + x - 3.0 * y + 0.5 * z + 0.25 * x * y * z
        )
        for pos in [(0.3, -1.7, 2.2), (-3.0, 3.0, -3.0)]:
            expected = 2.0 + pos[0] - 3.0 * pos[1] + 0.5 * pos[2] \
                + 0.25 * pos[0] * pos[1] * pos[2]
            assert awd.interpolate(u, pos) == pytest.approx(expected, rel=1e-12)

    def test_outside_domain_rejected(self, grid32):
        u = awd.constant_field(grid32, 1.0)
        with pytest.raises(OutOfDomainError):
            awd.interpolate(u, (100.0, 0.0))
        with pytest.raises(OutOfDomainError):
            awd.interpolate(u, (0.0, -15.6))

    def test_domain_corner_is_valid(self, grid32):
        u = random_field(grid32, 4)
        assert awd.interpolate(u, (15.5, 15.5)) == u.values[-1, -1]
