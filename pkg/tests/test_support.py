import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minksym.geometry import (
    DimensionMismatchError,
    Direction,
    GeometryError,
    GridAngle,
    IntervalBody,
    InvalidBodyError,
    OriginOutsideError,
    SupportBody,
    gen_disc,
    gen_random_star,
    random_direction,
    sphere_quadrature,
)
from minksym.geometry.star2d import support_values
from minksym.geometry.support import (
    grid_reflection_permutation,
    interpolate_support,
    interval_support,
    sandwich_radii,
    support_body_from_star,
    symmetral_support,
)


@pytest.fixture
def cloud3():
    return sphere_quadrature(3, 2048)


class TestSupportBody:
    def test_ball(self, cloud3):
        B = SupportBody.ball(0.5, cloud3)
        assert B.exact
        assert B.inner_radius() == B.outer_radius() == 0.5
        assert B.mean_width() == pytest.approx(0.5)

    def test_misaligned_values(self, cloud3):
        with pytest.raises(InvalidBodyError):
            SupportBody(cloud3, np.ones(10))

    def test_origin_outside(self):
        cloud = sphere_quadrature(2, 8)
        h = np.ones(8)
        h[4] = -0.5
        with pytest.raises(OriginOutsideError):
            sandwich_radii(SupportBody(cloud, h))

    def test_scaled(self, cloud3):
        B = SupportBody.ball(1.0, cloud3).scaled(3.0)
        assert B.outer_radius() == 3.0

    def test_ball_net(self, cloud3):
        assert SupportBody.ball(1.0, cloud3).net_distance(0.04) == 0.0

    def test_interval_net_distance(self):
        H = IntervalBody(1.0, Direction.basis(2)).to_support(sphere_quadrature(2, 72))
        # (1-ε)·(-e₁) is 0.96 from the segment
        assert H.net_distance(0.04) == pytest.approx(0.96)

    def test_longest_ray(self):
        cloud = sphere_quadrature(2, 16)
        R, u = IntervalBody(2.0, Direction.basis(2, 1)).to_support(cloud).longest_ray()
        assert R == 2.0
        np.testing.assert_allclose(u.coords, [0.0, 1.0], atol=1e-15)


class TestInterval:
    def test_support(self):
        I = IntervalBody(2.0, Direction.basis(3, 0))  # noqa: E741
        assert interval_support(I, Direction.basis(3, 0)) == 2.0
        assert interval_support(I, Direction.basis(3, 1)) == 0.0
        assert interval_support(I, Direction.normalized([-1.0, 1.0, 0.0])) == 0.0

    def test_invalid_length(self):
        with pytest.raises(GeometryError):
            IntervalBody(0.0, Direction.basis(2))

    def test_planar_mean_width(self):
        H = IntervalBody(1.0, Direction.basis(2)).to_support(sphere_quadrature(2, 720))
        assert H.mean_width() == pytest.approx(1.0 / math.pi, abs=1e-5)

    def test_dimension_mismatch(self, cloud3):
        with pytest.raises(DimensionMismatchError):
            IntervalBody(1.0, Direction.basis(2)).to_support(cloud3)


class TestGridPermutation:
    def test_grid_angle_is_exact(self):
        cloud = sphere_quadrature(2, 72)
        perm = grid_reflection_permutation(cloud, GridAngle(5, 72).direction)
        assert perm is not None
        assert sorted(perm.tolist()) == list(range(72))

    def test_half_grid_angle_is_exact(self):
        # R_u permutes the grid whenever 2θ_u is a grid angle
        cloud = sphere_quadrature(2, 72)
        u = Direction.from_angle(math.pi / 72)
        assert grid_reflection_permutation(cloud, u) is not None

    def test_generic_angle(self):
        cloud = sphere_quadrature(2, 72)
        assert grid_reflection_permutation(cloud, Direction.from_angle(0.3)) is None

    def test_scattered_cloud(self, cloud3):
        assert grid_reflection_permutation(cloud3, Direction.basis(3)) is None

    def test_permutation_reflects_nodes(self):
        cloud = sphere_quadrature(2, 72)
        u = GridAngle(11, 72).direction
        perm = grid_reflection_permutation(cloud, u)
        reflected = cloud.nodes - 2.0 * np.outer(cloud.nodes @ u.coords, u.coords)
        np.testing.assert_allclose(cloud.nodes[perm], reflected, atol=1e-12)


class TestInterpolation:
    def test_at_nodes(self, cloud3):
        H = IntervalBody(1.0, Direction.basis(3)).to_support(cloud3)
        values, err = interpolate_support(H, cloud3.nodes[:50])
        np.testing.assert_array_equal(values, H.h[:50])
        assert err == 0.0

    def test_constant_is_reproduced(self, cloud3, rng):
        B = SupportBody.ball(0.7, cloud3)
        pts = np.array([random_direction(3, rng).coords for _ in range(20)])
        values, err = interpolate_support(B, pts)
        np.testing.assert_allclose(values, 0.7)
        assert err == 0.0

    def test_dimension(self, cloud3):
        with pytest.raises(DimensionMismatchError):
            interpolate_support(SupportBody.ball(1.0, cloud3), np.ones((2, 2)))


class TestSymmetralSupport:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=71), st.integers(min_value=0, max_value=1000))
    def test_exact_mode_conserves_mean_width(self, k, seed):
        H = support_body_from_star(gen_random_star(seed, 72))
        S = symmetral_support(H, GridAngle(k, 72).direction)
        assert S.exact
        assert abs(S.mean_width() - H.mean_width()) <= 1e-12

    def test_result_is_symmetric(self):
        H = support_body_from_star(gen_random_star(3, 72))
        u = GridAngle(7, 72).direction
        S = symmetral_support(H, u)
        perm = grid_reflection_permutation(H.cloud, u)
        np.testing.assert_allclose(S.h[perm], S.h, atol=1e-15)

    def test_radii_monotone(self):
        H = support_body_from_star(gen_random_star(4, 72))
        S = symmetral_support(H, GridAngle(20, 72).direction)
        assert S.inner_radius() >= H.inner_radius()
        assert S.outer_radius() <= H.outer_radius()

    def test_interpolated_mode_tracks_error(self, cloud3, rng):
        H = IntervalBody(1.0, Direction.basis(3)).to_support(cloud3)
        step = H.symmetral(random_direction(3, rng))
        assert not step.body.exact
        assert step.tolerance > 0.0
        assert abs(step.body.mean_width() - H.mean_width()) <= step.tolerance
        assert step.body.inner_radius() >= H.inner_radius()
        assert step.body.outer_radius() <= H.outer_radius()

    def test_ball_is_fixed(self, cloud3, rng):
        B = SupportBody.ball(1.0, cloud3)
        S = symmetral_support(B, random_direction(3, rng))
        np.testing.assert_allclose(S.h, 1.0)

    def test_dimension_mismatch(self, cloud3):
        with pytest.raises(DimensionMismatchError):
            symmetral_support(SupportBody.ball(1.0, cloud3), Direction.basis(2))

    def test_commutes_with_star_symmetral(self):
        K = gen_random_star(9, 72)
        u = GridAngle(13, 72).direction
        step = K.symmetral(u, 256)
        exact = symmetral_support(support_body_from_star(K), u)
        np.testing.assert_allclose(support_values(step.body), exact.h, atol=step.tolerance)


def test_star_support_body_of_disc():
    H = support_body_from_star(gen_disc(0.4, 72))
    np.testing.assert_allclose(H.h, 0.4)
    assert H.cloud.is_uniform_grid
    assert H.support_body() is H


def test_star_support_body_method():
    K = gen_random_star(4, 72)
    H = K.support_body()
    assert isinstance(H, SupportBody)
    np.testing.assert_array_equal(H.h, support_body_from_star(K).h)
    assert H.mean_width() == pytest.approx(K.mean_width(), abs=1e-12)
