import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minksym.geometry import (
    DimensionMismatchError,
    Direction,
    GeometryError,
    random_direction,
    reflect,
    sphere_quadrature,
)
from minksym.geometry.core import SphereQuadrature, reflect_many


class TestDirection:
    def test_rejects_non_unit(self):
        with pytest.raises(GeometryError):
            Direction(np.array([1.0, 1.0]))

    def test_rejects_one_dimensional(self):
        with pytest.raises(GeometryError):
            Direction(np.array([1.0]))

    def test_normalized(self):
        u = Direction.normalized([3.0, 4.0])
        np.testing.assert_allclose(u.coords, [0.6, 0.8])

    def test_zero_vector(self):
        with pytest.raises(GeometryError):
            Direction.normalized([0.0, 0.0])

    def test_angle_round_trip(self):
        assert Direction.from_angle(1.25).angle == pytest.approx(1.25)

    def test_angle_requires_planar(self):
        with pytest.raises(DimensionMismatchError):
            _ = Direction.basis(3, 1).angle

    def test_coords_read_only(self):
        u = Direction.basis(2)
        with pytest.raises(ValueError):
            u.coords[0] = 2.0


class TestReflect:
    def test_fixes_hyperplane(self):
        u = Direction.basis(3, 0)
        np.testing.assert_allclose(reflect([0.0, 2.0, -1.0], u), [0.0, 2.0, -1.0])

    def test_negates_normal(self):
        u = Direction.normalized([1.0, 2.0, 2.0])
        np.testing.assert_allclose(reflect(u.coords, u), -u.coords, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            reflect([1.0, 2.0, 3.0], Direction.basis(2))

    @settings(max_examples=50, deadline=None)
    @given(
        st.integers(min_value=2, max_value=6),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_involution_and_isometry(self, n, seed):
        rng = np.random.default_rng(seed)
        u = random_direction(n, rng)
        x = rng.standard_normal(n)
        y = reflect(x, u)
        assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x))
        np.testing.assert_allclose(reflect(y, u), x, atol=1e-12)

    def test_many_matches_single(self, rng):
        u = random_direction(4, rng)
        pts = rng.standard_normal((5, 4))
        expected = np.array([reflect(p, u) for p in pts])
        np.testing.assert_allclose(reflect_many(pts, u), expected)


class TestRandomDirection:
    def test_deterministic(self):
        a = random_direction(5, np.random.default_rng(3))
        b = random_direction(5, np.random.default_rng(3))
        np.testing.assert_array_equal(a.coords, b.coords)

    def test_unit_norm(self):
        u = random_direction(2, np.random.default_rng(8))
        assert np.linalg.norm(u.coords) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_dimension_one(self, rng):
        with pytest.raises(GeometryError):
            random_direction(1, rng)

    def test_uniform_on_two_sphere(self):
        rng = np.random.default_rng(2024)
        x1 = np.array([random_direction(3, rng).coords[0] for _ in range(100_000)])
        assert abs(x1.mean()) <= 0.02
        assert abs(np.abs(x1).mean() - 0.5) <= 0.02


class TestSphereQuadrature:
    def test_planar_grid(self):
        q = sphere_quadrature(2, 8)
        assert q.is_uniform_grid
        assert q.weights.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(q.nodes[2], [0.0, 1.0], atol=1e-15)
        assert q.spacing == pytest.approx(math.pi / 8)

    def test_four_nodes(self):
        q = sphere_quadrature(2, 4)
        angles = np.mod(np.arctan2(q.nodes[:, 1], q.nodes[:, 0]), 2 * math.pi)
        np.testing.assert_allclose(angles, [0.0, math.pi / 2, math.pi, 3 * math.pi / 2], atol=1e-15)
        np.testing.assert_array_equal(q.weights, np.full(4, 0.25))
        assert q.integrate(np.ones(4)) == 1.0

    def test_abs_cos_on_fine_grid(self):
        M = 720
        q = sphere_quadrature(2, M)
        value = q.integrate_fn(lambda x: np.abs(x[:, 0]))
        # rectangle rule with the kinks of |cos| on nodes: (2/M)·cot(π/M) = 2/π - 2π/(3M²) + O(M⁻⁴)
        assert value == pytest.approx(2.0 / (M * math.tan(math.pi / M)), abs=1e-12)
        assert abs(value - 2.0 / math.pi) <= 2 * math.pi / (3 * M * M) + 1e-9

    def test_spacing_is_covering_radius(self):
        grid = sphere_quadrature(2, 72)
        cloud = SphereQuadrature(nodes=grid.nodes, weights=grid.weights, kind="random")
        assert grid.spacing == pytest.approx(math.pi / 72)
        assert cloud.spacing == pytest.approx(grid.spacing, rel=0.02)
        assert cloud.spacing <= grid.spacing + 1e-12

    def test_fibonacci_spacing(self):
        q = sphere_quadrature(3, 1000)
        # hexagonal cells of area 4π/1000 have circumradius ≈ 0.07
        assert 0.045 < q.spacing < 0.12

    def test_too_few_nodes(self):
        with pytest.raises(GeometryError):
            sphere_quadrature(2, 2)
        with pytest.raises(GeometryError):
            sphere_quadrature(3, 4)

    def test_planar_second_moment_exact(self):
        q = sphere_quadrature(2, 16)
        assert q.integrate_fn(lambda x: x[:, 0] ** 2) == pytest.approx(0.5, abs=1e-14)

    def test_fibonacci_second_moment(self):
        q = sphere_quadrature(3, 2048)
        assert q.kind == "fibonacci"
        assert q.integrate_fn(lambda x: x[:, 2] ** 2) == pytest.approx(1.0 / 3.0, abs=1e-3)

    def test_random_cloud_reproducible(self):
        a = sphere_quadrature(5, 64, seed=4)
        b = sphere_quadrature(5, 64, seed=4)
        np.testing.assert_array_equal(a.nodes, b.nodes)
        assert a.seed == 4

    def test_random_second_moment(self):
        q = sphere_quadrature(5, 20000, seed=1)
        assert q.integrate_fn(lambda x: x[:, 0] ** 2) == pytest.approx(0.2, abs=0.01)

    def test_integrate_shape_mismatch(self):
        q = sphere_quadrature(2, 8)
        with pytest.raises(DimensionMismatchError):
            q.integrate(np.ones(7))
