"""Grid, quadrature and stencil behavior, including the exact conservation identities."""
from __future__ import annotations

import math

import numpy as np
import pytest

from chemfv import (CorruptionError, DomainError, Grid, ScalarField, constant_field,
                    cosine_field, extend_neumann, field_from_function, gradient_cells,
                    gradient_faces, hessian, integrate, laplacian, lp_norm,
                    random_smooth_field, read_field, write_field)


class TestGrid:
    def test_validation(self):
        with pytest.raises(DomainError):
            Grid.line(3, 1.0)
        with pytest.raises(DomainError):
            Grid.line(8, 0.0)
        with pytest.raises(DomainError):
            Grid((4, 4, 4), (1.0, 1.0, 1.0))

    def test_geometry(self):
        g = Grid.rect(8, 4, 2.0, 1.0)
        assert g.dim == 2
        assert g.spacing == (0.25, 0.25)
        assert g.cell_volume == pytest.approx(0.0625)
        assert g.volume == 2.0
        assert g.axis_centers(0)[0] == 0.125

    def test_field_shape_mismatch(self):
        with pytest.raises(DomainError):
            ScalarField(Grid.line(8, 1.0), np.zeros(7))


class TestIntegrate:
    def test_constant(self):
        g = Grid.line(16, 2.0)
        assert integrate(constant_field(g, 3.0)) == pytest.approx(6.0, rel=1e-15)

    def test_zero(self):
        assert integrate(constant_field(Grid.line(8, 1.0), 0.0)) == 0.0

    def test_linear_exact(self):
        # midpoint quadrature is exact for linear integrands
        g = Grid.line(128, 1.0)
        f = field_from_function(g, lambda x: x)
        assert integrate(f) == 0.5

    def test_nonfinite_rejected(self):
        g = Grid.line(8, 1.0)
        f = constant_field(g, 1.0)
        f.values[3] = math.nan
        with pytest.raises(CorruptionError):
            integrate(f)


class TestLpNorm:
    def test_constant(self):
        g = Grid.line(16, 1.0)
        assert lp_norm(constant_field(g, 2.0), 2.0) == pytest.approx(2.0, rel=1e-15)
        assert lp_norm(constant_field(g, 0.0), 7.0) == 0.0

    def test_indicator(self):
        g = Grid.line(16, 1.0)
        values = np.zeros(16)
        values[:8] = 1.0
        assert lp_norm(ScalarField(g, values), 1.0) == pytest.approx(0.5, rel=1e-15)

    def test_sup_norm(self):
        g = Grid.line(8, 1.0)
        values = np.array([0.0, -3.0, 1.0, 0.5, 0.0, 0.0, 0.0, 2.0])
        assert lp_norm(ScalarField(g, values), math.inf) == 3.0

    def test_p_below_one_rejected(self):
        with pytest.raises(DomainError):
            lp_norm(constant_field(Grid.line(8, 1.0), 1.0), 0.5)


class TestNeumannExtension:
    def test_mirror_values(self):
        g = Grid.line(4, 1.0)
        f = ScalarField(g, np.array([1.0, 2.0, 3.0, 4.0]))
        padded = extend_neumann(f)
        assert padded[0] == 1.0 and padded[-1] == 4.0

    def test_constant_ghosts(self):
        g = Grid.rect(4, 4, 1.0, 1.0)
        padded = extend_neumann(constant_field(g, 5.0))
        assert np.all(padded == 5.0)

    def test_boundary_face_gradient_is_zero(self):
        g = Grid.line(32, 1.0)
        f = field_from_function(g, lambda x: x)
        gx = gradient_faces(f)[0]
        assert gx[0] == 0.0 and gx[-1] == 0.0
        assert np.allclose(gx[1:-1], 1.0, rtol=0, atol=1e-13)


class TestGradients:
    def test_constant_is_zero(self):
        g = Grid.rect(8, 8, 1.0, 1.0)
        f = constant_field(g, 2.5)
        for arr in gradient_faces(f) + gradient_cells(f):
            assert np.all(arr == 0.0)

    def test_linear_interior_exact(self):
        g = Grid.line(64, 1.0)
        f = field_from_function(g, lambda x: x)
        gc = gradient_cells(f)[0]
        assert np.allclose(gc[1:-1], 1.0, rtol=0, atol=1e-12)

    def test_quadratic_central_difference(self):
        # central differences are exact for quadratics in the interior;
        # the checked error bound is the generic 2 h^2 one
        g = Grid.line(64, 1.0)
        f = field_from_function(g, lambda x: x**2)
        gc = gradient_cells(f)[0]
        x = g.axis_centers(0)
        h = g.spacing[0]
        err = np.abs(gc[1:-1] - 2.0 * x[1:-1])
        assert err.max() < 2.0 * h**2


class TestLaplacian:
    def test_quadratic_interior(self):
        g = Grid.line(32, 1.0)
        f = field_from_function(g, lambda x: x**2)
        lap = laplacian(f).values
        assert np.allclose(lap[1:-1], 2.0, rtol=0, atol=1e-9)

    def test_constant_exact_zero(self):
        g = Grid.rect(8, 8, 1.0, 1.0)
        assert np.all(laplacian(constant_field(g, 4.0)).values == 0.0)

    def test_2d_paraboloid_interior(self):
        g = Grid.rect(16, 16, 1.0, 1.0)
        f = field_from_function(g, lambda x, y: x**2 + y**2)
        lap = laplacian(f).values
        assert np.allclose(lap[1:-1, 1:-1], 4.0, rtol=0, atol=1e-9)


class TestHessian:
    def test_bilinear_cross(self):
        g = Grid.rect(16, 16, 1.0, 1.0)
        f = field_from_function(g, lambda x, y: x * y)
        hess = hessian(f)
        assert np.allclose(hess[0, 1][1:-1, 1:-1], 1.0, rtol=0, atol=1e-12)
        assert np.array_equal(hess[0, 1], hess[1, 0])

    def test_constant_zero(self):
        g = Grid.rect(8, 8, 1.0, 1.0)
        assert np.all(hessian(constant_field(g, 3.0)) == 0.0)

    def test_pure_x_squared(self):
        g = Grid.rect(16, 16, 1.0, 1.0)
        f = field_from_function(g, lambda x, y: x**2 + 0.0 * y)
        hess = hessian(f)
        interior = (slice(1, -1), slice(1, -1))
        assert np.allclose(hess[0, 0][interior], 2.0, rtol=0, atol=1e-9)
        assert np.allclose(hess[1, 1][interior], 0.0, atol=1e-12)
        assert np.allclose(hess[0, 1][interior], 0.0, atol=1e-12)


class TestRandomSmoothField:
    def test_deterministic(self):
        g = Grid.rect(16, 16, 1.0, 1.0)
        f1 = random_smooth_field(g, 42, 8)
        f2 = random_smooth_field(g, 42, 8)
        assert np.array_equal(f1.values, f2.values)
        f3 = random_smooth_field(g, 43, 8)
        assert not np.array_equal(f1.values, f3.values)

    def test_num_modes_validated(self):
        with pytest.raises(DomainError):
            random_smooth_field(Grid.line(8, 1.0), 0, 0)

    def test_zero_coefficient_gives_zero_field(self):
        g = Grid.line(16, 1.0)
        f = cosine_field(g, [(1,)], [0.0])
        assert np.all(f.values == 0.0)

    def test_single_mode_matches_analytic_gradient(self):
        # interior face gradient of cos(pi x) vs -pi sin(pi x) at face centers
        g = Grid.line(64, 1.0)
        f = cosine_field(g, [(1,)], [1.0])
        gx = gradient_faces(f)[0]
        h = g.spacing[0]
        faces = np.arange(1, 64) * h
        analytic = -math.pi * np.sin(math.pi * faces)
        assert np.abs(gx[1:-1] - analytic).max() < 2.0 * h**2 * math.pi**3
        # the analytic normal derivative vanishes at both walls, as does the
        # discrete boundary face value
        assert gx[0] == 0.0 and gx[-1] == 0.0

    def test_random_field_boundary_faces(self):
        g = Grid.rect(32, 32, 1.0, 2.0)
        f = random_smooth_field(g, 5, 6)
        gx, gy = gradient_faces(f)
        assert np.all(gx[0, :] == 0.0) and np.all(gx[-1, :] == 0.0)
        assert np.all(gy[:, 0] == 0.0) and np.all(gy[:, -1] == 0.0)


class TestOperatorIdentities:
    @pytest.mark.parametrize("grid", [Grid.line(64, 1.5), Grid.rect(24, 16, 1.0, 2.0)])
    def test_laplacian_integrates_to_zero(self, grid):
        for seed in range(20):
            f = random_smooth_field(grid, seed, 8)
            total = integrate(laplacian(f))
            assert abs(total) <= 1e-12 * max(1.0, lp_norm(f, 2.0))

    @pytest.mark.parametrize("grid", [Grid.line(32, 1.0), Grid.rect(16, 12, 1.0, 0.5)])
    def test_trace_of_hessian_is_laplacian(self, grid):
        for seed in range(10):
            f = random_smooth_field(grid, seed, 6)
            hess = hessian(f)
            trace = sum(hess[a, a] for a in range(grid.dim))
            lap = laplacian(f).values
            assert np.abs(trace - lap).max() <= 1e-12 * max(1.0, np.abs(lap).max())

    def test_second_order_convergence(self):
        errors = []
        for nx in (32, 64, 128):
            g = Grid.line(nx, 1.0)
            f = cosine_field(g, [(1,)], [1.0])
            lap = laplacian(f).values
            exact = -math.pi**2 * f.values
            errors.append(np.abs(lap - exact)[1:-1].max())
        assert errors[0] / errors[1] >= 3.5
        assert errors[1] / errors[2] >= 3.5


class TestFieldDump:
    def test_roundtrip_1d(self, tmp_path):
        g = Grid.line(8, 2.0)
        f = random_smooth_field(g, 1, 4)
        path = tmp_path / "field.csv"
        write_field(f, path)
        header = path.read_text().splitlines()[0]
        assert header == "1,8,2.0"
        back = read_field(path)
        assert back.grid == g
        assert np.array_equal(back.values, f.values)

    def test_roundtrip_2d(self, tmp_path):
        g = Grid.rect(6, 4, 1.0, 0.5)
        f = random_smooth_field(g, 2, 4)
        path = tmp_path / "field.csv"
        write_field(f, path)
        assert path.read_text().splitlines()[0] == "2,6,4,1.0,0.5"
        back = read_field(path)
        assert back.grid == g
        assert np.array_equal(back.values, f.values)
