"""Convex bodies in R^n as support values on a direction cloud."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import structlog
from numpy.typing import NDArray

from minksym.geometry.base import (
    Body,
    DimensionMismatchError,
    GeometryError,
    InvalidBodyError,
    OriginOutsideError,
    SymmetralStep,
)
from minksym.geometry.core import Direction, SphereQuadrature, reflect_many, sphere_quadrature
from minksym.geometry.star2d import StarBody2D, support_values

logger = structlog.get_logger(__name__)

EXACT_SNAP_TOLERANCE = 1e-9  # radians
COINCIDENT_NODE = 1e-12


@dataclass(frozen=True, eq=False)
class SupportBody(Body):
    """Support function h of a convex body, sampled on ``cloud``.

    ``interp_error`` accumulates the interpolation error estimates of every
    non-exact symmetral that produced this body.
    """

    cloud: SphereQuadrature
    h: NDArray[np.float64]
    interp_error: float = 0.0

    def __post_init__(self) -> None:
        values = np.array(self.h, dtype=np.float64)
        if values.shape != (self.cloud.size,):
            raise InvalidBodyError(
                f"Support values must align with {self.cloud.size} cloud nodes, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidBodyError("Support values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "h", values)

    @classmethod
    def ball(cls, rho: float, cloud: SphereQuadrature) -> SupportBody:
        """Centred ball of radius ρ."""
        if rho < 0:
            raise GeometryError(f"Ball radius must be nonnegative, got {rho}")
        return cls(cloud=cloud, h=np.full(cloud.size, float(rho)))

    @property
    def dim(self) -> int:
        return self.cloud.dim

    @property
    def exact(self) -> bool:
        return self.interp_error == 0.0

    def inner_radius(self) -> float:
        return sandwich_radii(self)[0]

    def outer_radius(self) -> float:
        return sandwich_radii(self)[1]

    def mean_width(self) -> float:
        return mean_width(self)

    def radial_distance(self, rho: float) -> float:
        """sup_d |h(d) - ρ| over the cloud: the Hausdorff distance to ρD for convex bodies."""
        return float(np.max(np.abs(self.h - rho)))

    def scaled(self, factor: float) -> SupportBody:
        if not np.isfinite(factor) or factor < 0:
            raise GeometryError(f"Scale factor must be finite and nonnegative, got {factor}")
        return SupportBody(self.cloud, self.h * factor, self.interp_error * factor)

    def symmetral(self, direction: Direction, raster_size: int = 0) -> SymmetralStep:
        result = symmetral_support(self, direction)
        return SymmetralStep(body=result, tolerance=result.interp_error - self.interp_error)

    def support_body(self) -> SupportBody:
        return self

    def net_distance(self, eps: float, chunk: int = 1024) -> float:
        """max_x dist((1-ε)x, K) over cloud nodes x, by the dual formula.

        dist(p, K) = max_v (⟨p, v⟩ - h(v))⁺ with v ranging over the cloud.
        """
        if not 0.0 < eps < 1.0:
            raise GeometryError(f"eps must lie in (0, 1), got {eps}")
        nodes = self.cloud.nodes
        worst = 0.0
        for start in range(0, nodes.shape[0], chunk):
            gram = (1.0 - eps) * nodes[start : start + chunk] @ nodes.T
            gap = np.max(gram - self.h[None, :], axis=1)
            worst = max(worst, float(np.max(gap)))
        return max(worst, 0.0)

    def longest_ray(self) -> tuple[float, Direction]:
        i = int(np.argmax(self.h))
        return float(self.h[i]), Direction.normalized(self.cloud.nodes[i])

    def support_at(self, directions: NDArray[np.float64]) -> NDArray[np.float64]:
        values, _ = interpolate_support(self, np.asarray(directions, dtype=np.float64))
        return values

    def __repr__(self) -> str:
        return (
            f"SupportBody(n={self.dim}, M={self.cloud.size}, "
            f"h=[{self.h.min():.6g}, {self.h.max():.6g}], interp_error={self.interp_error:.3g})"
        )


@dataclass(frozen=True)
class IntervalBody:
    """Segment [0, R·u]."""

    R: float
    u: Direction

    def __post_init__(self) -> None:
        if not np.isfinite(self.R) or self.R <= 0:
            raise GeometryError(f"Interval length must be positive, got {self.R}")

    @property
    def dim(self) -> int:
        return self.u.dim

    def to_support(self, cloud: SphereQuadrature) -> SupportBody:
        if cloud.dim != self.dim:
            raise DimensionMismatchError(self.dim, cloud.dim)
        return SupportBody(cloud=cloud, h=self.R * np.maximum(0.0, cloud.nodes @ self.u.coords))


def interval_support(I: IntervalBody, d: Direction) -> float:  # noqa: E741
    """h_I(d) = R·max(0, ⟨u, d⟩)."""
    if d.dim != I.dim:
        raise DimensionMismatchError(I.dim, d.dim)
    return I.R * max(0.0, float(np.dot(I.u.coords, d.coords)))


def grid_reflection_permutation(cloud: SphereQuadrature, u: Direction) -> NDArray[np.int64] | None:
    """Index map i -> j with R_u(node_i) = node_j, if R_u permutes the planar grid."""
    if not cloud.is_uniform_grid or u.dim != 2:
        return None
    M = cloud.size
    if M % 2 != 0:
        return None
    # R_u e(θ) = e(2θ_u + π - θ); closed on the grid iff 2θ_u·M/2π is an integer
    doubled = 2.0 * u.angle * M / (2.0 * np.pi)
    s = int(np.rint(doubled))
    if abs(doubled - s) * np.pi / M > EXACT_SNAP_TOLERANCE:
        return None
    return (s + M // 2 - np.arange(M)) % M


def interpolate_support(
    H: SupportBody, points: NDArray[np.float64]
) -> tuple[NDArray[np.float64], float]:
    """h at arbitrary unit vectors from the n+1 nearest cloud nodes.

    Weights are inverse geodesic distances; a point coinciding with a node takes
    that node's value. The error estimate is half the largest spread of the
    neighbour values.
    """
    if points.ndim != 2 or points.shape[1] != H.dim:
        raise DimensionMismatchError(H.dim, points.shape[-1])
    k = min(H.dim + 1, H.cloud.size)
    chord, idx = H.cloud.tree.query(points, k=k)
    geodesic = 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))

    neighbour_h = H.h[idx]
    coincident = geodesic[:, 0] < COINCIDENT_NODE
    weights = 1.0 / np.maximum(geodesic, COINCIDENT_NODE)
    weights /= weights.sum(axis=1, keepdims=True)
    values = np.sum(weights * neighbour_h, axis=1)
    values[coincident] = neighbour_h[coincident, 0]

    spread = neighbour_h.max(axis=1) - neighbour_h.min(axis=1)
    spread[coincident] = 0.0
    return values, 0.5 * float(spread.max(initial=0.0))


def symmetral_support(H: SupportBody, u: Direction) -> SupportBody:
    """Support values of M_u conv K: h'(d) = (h(d) + h(R_u d)) / 2.

    Exact on the planar grid when R_u permutes it; otherwise h(R_u d) is
    interpolated and the estimate (interpolation plus the cloud's asymmetry
    under R_u) is added to ``interp_error``.
    """
    if u.dim != H.dim:
        raise DimensionMismatchError(H.dim, u.dim)

    perm = grid_reflection_permutation(H.cloud, u)
    if perm is not None:
        return SupportBody(H.cloud, 0.5 * (H.h + H.h[perm]), H.interp_error)

    reflected = reflect_many(H.cloud.nodes, u)
    values, err = interpolate_support(H, reflected)
    # R_u does not preserve a scattered cloud; bound the quadrature asymmetry at 3σ
    asymmetry = 3.0 * float(np.std(H.h)) * np.sqrt(2.0 / H.cloud.size)
    return SupportBody(H.cloud, 0.5 * (H.h + values), H.interp_error + err + asymmetry)


def mean_width(H: SupportBody) -> float:
    """Σ w_i h_i."""
    return H.cloud.integrate(H.h)


def sandwich_radii(H: SupportBody) -> tuple[float, float]:
    """(min h, max h) over the cloud.

    The outer value is exact only up to the cloud's covering radius.
    """
    low = float(H.h.min())
    if low < -COINCIDENT_NODE:
        raise OriginOutsideError(f"Support value {low:.6g} < 0: origin lies outside the body")
    return max(low, 0.0), float(H.h.max())


def support_body_from_star(K: StarBody2D) -> SupportBody:
    """Support values of conv K on the star's own angle grid (exact)."""
    return SupportBody(cloud=sphere_quadrature(2, K.m), h=support_values(K))
