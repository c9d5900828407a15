"""Planar star-shaped bodies on an exact angle grid.

A body is its radial function sampled at θ_i = 2πi/m, linearly interpolated
in angle. Reflections in grid-aligned hyperplanes are index permutations;
Minkowski sums go through a raster and an FFT indicator convolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from typing import TYPE_CHECKING

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from scipy.signal import fftconvolve

from minksym.geometry.base import (
    Body,
    DimensionMismatchError,
    GeometryError,
    GridAlignmentError,
    InvalidBodyError,
    ResolutionError,
    SymmetralStep,
)
from minksym.geometry.core import Direction

if TYPE_CHECKING:
    from minksym.geometry.support import SupportBody

logger = structlog.get_logger(__name__)

DEFAULT_GRID_M = 720
DEFAULT_RASTER_SIZE = 1024
MIN_RASTER_SIZE = 32
GRID_ALIGNMENT_TOLERANCE = 1e-9  # radians
RASTER_MARGIN_CELLS = 4

TWO_PI = 2.0 * np.pi


# =============================================================================
# Grid tables
# =============================================================================


@cache
def grid_angles(m: int) -> NDArray[np.float64]:
    """θ_i = 2πi/m (read-only, cached per m)."""
    theta = TWO_PI * np.arange(m) / m
    theta.setflags(write=False)
    return theta


@cache
def grid_units(m: int) -> NDArray[np.float64]:
    """(m, 2) array of e(θ_i)."""
    theta = grid_angles(m)
    units = np.column_stack([np.cos(theta), np.sin(theta)])
    units.setflags(write=False)
    return units


@cache
def _cos_table(m: int) -> NDArray[np.float64]:
    """C[j, i] = cos(θ_i - θ_j) = ⟨e(θ_i), e(θ_j)⟩."""
    offsets = (np.arange(m)[None, :] - np.arange(m)[:, None]) % m
    table = np.cos(TWO_PI * offsets / m)
    table.setflags(write=False)
    return table


# =============================================================================
# Domain types
# =============================================================================


@dataclass(frozen=True, eq=False)
class GridAngle:
    """Grid direction e(2πk/m)."""

    k: int
    m: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise GeometryError(f"Grid size must be >= 2, got {self.m}")
        if not 0 <= self.k < self.m:
            raise GeometryError(f"Grid index {self.k} outside [0, {self.m})")

    @property
    def theta(self) -> float:
        return TWO_PI * self.k / self.m

    @property
    def direction(self) -> Direction:
        return Direction(grid_units(self.m)[self.k].copy())


@dataclass(frozen=True, eq=False)
class StarBody2D(Body):
    """Planar star body given by its radial function on a uniform angle grid."""

    r: NDArray[np.float64]

    def __post_init__(self) -> None:
        values = np.array(self.r, dtype=np.float64)
        if values.ndim != 1:
            raise InvalidBodyError(f"Radial values must be 1-D, got shape {values.shape}")
        m = values.shape[0]
        if m < 8 or m % 2 != 0:
            raise InvalidBodyError(f"Grid size must be even and >= 8, got {m}")
        if not np.all(np.isfinite(values)):
            raise InvalidBodyError("Radial values must be finite")
        if np.any(values < 0):
            raise InvalidBodyError("Radial values must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "r", values)

    @classmethod
    def zero(cls, m: int) -> StarBody2D:
        """The body {0}."""
        return cls(np.zeros(m))

    @property
    def m(self) -> int:
        return int(self.r.shape[0])

    @property
    def dim(self) -> int:
        return 2

    def inner_radius(self) -> float:
        return inner_radius(self)

    def outer_radius(self) -> float:
        return outer_radius(self)

    def mean_width(self) -> float:
        return mean_width(self)

    def radial_distance(self, rho: float) -> float:
        return radial_distance(self, rho)

    def scaled(self, factor: float) -> StarBody2D:
        return scale(self, factor)

    def symmetral(self, direction: Direction, raster_size: int = DEFAULT_RASTER_SIZE) -> SymmetralStep:
        a = grid_angle_of(direction, self.m)
        reflected = reflect_body(self, a)
        tolerance = raster_tolerance(self, reflected, raster_size)
        summed = minkowski_sum(self, reflected, raster_size)
        return SymmetralStep(body=scale(summed, 0.5), tolerance=tolerance)

    def support_body(self) -> SupportBody:
        from minksym.geometry.support import support_body_from_star

        return support_body_from_star(self)

    def net_distance(self, eps: float) -> float:
        return net_distance(self, eps)

    def longest_ray(self) -> tuple[float, Direction]:
        i = int(np.argmax(self.r))
        return float(self.r[i]), GridAngle(i, self.m).direction

    def support_at(self, directions: NDArray[np.float64]) -> NDArray[np.float64]:
        return support_at(self, directions)

    def __repr__(self) -> str:
        return (
            f"StarBody2D(m={self.m}, inner={inner_radius(self):.6g}, "
            f"outer={outer_radius(self):.6g})"
        )


@dataclass(frozen=True, eq=False)
class Raster:
    """Binary occupancy grid centred at the origin.

    Cell (i, j) has centre ((i - G//2)·h, (j - G//2)·h).
    """

    G: int
    h: float
    occ: NDArray[np.bool_]

    def __post_init__(self) -> None:
        if self.G < MIN_RASTER_SIZE:
            raise ResolutionError(f"Raster side must be >= {MIN_RASTER_SIZE}", self.G)
        if self.occ.shape != (self.G, self.G):
            raise GeometryError(f"Occupancy must be {self.G}x{self.G}, got {self.occ.shape}")
        if self.h <= 0:
            raise GeometryError(f"Cell width must be positive, got {self.h}")

    @property
    def origin_index(self) -> int:
        return self.G // 2

    @property
    def cell_count(self) -> int:
        return int(self.occ.sum())


# =============================================================================
# Accessors
# =============================================================================


def radial_eval(K: StarBody2D, theta: ArrayLike) -> NDArray[np.float64] | float:
    """Radial function at arbitrary angles; linear in angle between grid values."""
    t = np.asarray(theta, dtype=np.float64)
    m = K.m
    pos = np.mod(t, TWO_PI) * (m / TWO_PI)
    lower = np.floor(pos)
    frac = pos - lower
    i = lower.astype(np.int64) % m
    j = (i + 1) % m
    values = K.r[i] * (1.0 - frac) + K.r[j] * frac
    if values.ndim == 0:
        return float(values)
    return values


def grid_angle_of(direction: Direction, m: int) -> GridAngle:
    """Snap a planar direction to the grid, or raise if it is not grid-aligned."""
    if direction.dim != 2:
        raise DimensionMismatchError(2, direction.dim)
    pos = direction.angle * m / TWO_PI
    k = int(np.rint(pos))
    if abs(pos - k) * TWO_PI / m > GRID_ALIGNMENT_TOLERANCE:
        raise GridAlignmentError(f"Direction at angle {direction.angle!r} is not on the {m}-grid", m)
    return GridAngle(k % m, m)


def inner_radius(K: StarBody2D) -> float:
    """Largest ρ with ρD ⊆ K."""
    return float(K.r.min())


def outer_radius(K: StarBody2D) -> float:
    """Smallest ρ with K ⊆ ρD."""
    return float(K.r.max())


def radial_distance(K: StarBody2D, rho: float) -> float:
    """max_i |r_i - ρ|; an upper bound for the Hausdorff distance to ρD."""
    return float(np.max(np.abs(K.r - rho)))


def scale(K: StarBody2D, factor: float) -> StarBody2D:
    """Exact dilation: multiply every radial value by ``factor``."""
    if not np.isfinite(factor) or factor < 0:
        raise GeometryError(f"Scale factor must be finite and nonnegative, got {factor}")
    return StarBody2D(K.r * factor)


# =============================================================================
# Reflection
# =============================================================================


def reflect_body(K: StarBody2D, a: GridAngle) -> StarBody2D:
    """R_u K for u = e(2πa/m), as an exact index permutation.

    r'[i] = r[(2a + m/2 - i) mod m].
    """
    m = K.m
    if a.m != m:
        raise GridAlignmentError(f"GridAngle on {a.m}-grid used with body on {m}-grid", m)
    if m % 2 != 0:
        raise GridAlignmentError("Reflection needs an even grid size", m)
    idx = (2 * a.k + m // 2 - np.arange(m)) % m
    return StarBody2D(K.r[idx])


# =============================================================================
# Rasterization and Minkowski sums
# =============================================================================


def _check_raster_size(G: int) -> None:
    if G < MIN_RASTER_SIZE:
        raise ResolutionError(f"Raster size must be >= {MIN_RASTER_SIZE}, got {G}", G)
    if G & (G - 1) != 0:
        raise ResolutionError(f"Raster size must be a power of two, got {G}", G)


def sum_half_extent(A: StarBody2D, B: StarBody2D, G: int) -> float:
    """Half side of the square both rasters of a sum are drawn on."""
    reach = outer_radius(A) + outer_radius(B)
    return reach * (1.0 + 2.0 * RASTER_MARGIN_CELLS / G)


def raster_tolerance(A: StarBody2D, B: StarBody2D, G: int) -> float:
    """τ = 4 cell widths of the raster used for A + B."""
    return 4.0 * 2.0 * sum_half_extent(A, B, G) / G


def rasterize(K: StarBody2D, G: int, half_extent: float) -> Raster:
    """Occupancy of K on a G×G grid covering [-half_extent, half_extent)².

    A cell is occupied if its centre lies in K or if one of the grid spokes
    [0, r_i e(θ_i)] passes through it, so spikes thinner than a cell survive.
    """
    if half_extent <= 0:
        raise GeometryError(f"Raster half extent must be positive, got {half_extent}")
    h = 2.0 * half_extent / G
    c = G // 2
    coords = (np.arange(G) - c) * h
    x, y = np.meshgrid(coords, coords, indexing="ij")
    rho = np.hypot(x, y)
    theta = np.arctan2(y, x)
    occ = rho <= np.asarray(radial_eval(K, theta)) + 1e-12

    units = grid_units(K.m)
    steps = int(np.ceil(outer_radius(K) / (0.5 * h))) + 1
    t = np.minimum(np.arange(steps + 1)[None, :] * (0.5 * h), K.r[:, None])
    px = np.rint(t * units[:, 0:1] / h).astype(np.int64) + c
    py = np.rint(t * units[:, 1:2] / h).astype(np.int64) + c
    np.clip(px, 0, G - 1, out=px)
    np.clip(py, 0, G - 1, out=py)
    occ[px.ravel(), py.ravel()] = True

    occ[c, c] = True
    return Raster(G=G, h=h, occ=occ)


def extract_radial(
    occ: NDArray[np.bool_],
    h: float,
    origin: int,
    m: int,
    reach: float,
    chunk: int = 48,
) -> NDArray[np.float64]:
    """Radial function of an occupancy grid along the m grid rays.

    For each ray, the farthest occupied cell whose centre lies within one cell
    width of the ray, measured by its projection onto the ray. No hole
    detection: sums of star bodies are star-shaped.
    """
    nx, ny = occ.shape
    units = grid_units(m)
    t = np.arange(0.0, reach + 2.0 * h, 0.5 * h)
    offsets = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)]
    radial = np.zeros(m)

    for start in range(0, m, chunk):
        e = units[start : start + chunk]
        px = t[:, None] * e[None, :, 0]
        py = t[:, None] * e[None, :, 1]
        bi = np.rint(px / h).astype(np.int64) + origin
        bj = np.rint(py / h).astype(np.int64) + origin
        best = np.zeros(e.shape[0])
        for di, dj in offsets:
            ii = bi + di
            jj = bj + dj
            inside = (ii >= 0) & (ii < nx) & (jj >= 0) & (jj < ny)
            ii_c = np.clip(ii, 0, nx - 1)
            jj_c = np.clip(jj, 0, ny - 1)
            hit = occ[ii_c, jj_c] & inside
            cx = (ii_c - origin) * h
            cy = (jj_c - origin) * h
            proj = cx * e[None, :, 0] + cy * e[None, :, 1]
            perp = np.abs(cx * e[None, :, 1] - cy * e[None, :, 0])
            ok = hit & (perp <= h * (1.0 + 1e-9)) & (proj >= 0.0)
            best = np.maximum(best, np.where(ok, proj, 0.0).max(axis=0))
        radial[start : start + chunk] = best
    return radial


def minkowski_sum(A: StarBody2D, B: StarBody2D, G: int = DEFAULT_RASTER_SIZE) -> StarBody2D:
    """A + B through rasterization and FFT indicator convolution.

    Both rasters share cell width h; the full convolution of their indicators
    counts representations c = a + b, thresholded at half a cell's mass.
    """
    if A.m != B.m:
        raise DimensionMismatchError(A.m, B.m)
    _check_raster_size(G)
    reach = outer_radius(A) + outer_radius(B)
    if reach == 0.0:
        return StarBody2D.zero(A.m)

    half_extent = sum_half_extent(A, B, G)
    ra = rasterize(A, G, half_extent)
    rb = rasterize(B, G, half_extent)
    counts = fftconvolve(ra.occ.astype(np.float64), rb.occ.astype(np.float64), mode="full")
    occ_sum = counts > 0.5

    # full-convolution index p = i + j has centre (p - G)·h
    radial = extract_radial(occ_sum, ra.h, origin=2 * (G // 2), m=A.m, reach=reach)
    logger.debug(
        "minkowski_sum",
        G=G,
        h=ra.h,
        cells_a=ra.cell_count,
        cells_b=rb.cell_count,
        cells_sum=int(occ_sum.sum()),
    )
    return StarBody2D(radial)


def symmetral(K: StarBody2D, a: GridAngle, G: int = DEFAULT_RASTER_SIZE) -> StarBody2D:
    """M_u K = (K + R_u K) / 2 for the grid direction u = e(2πa/m)."""
    return scale(minkowski_sum(K, reflect_body(K, a), G), 0.5)


# =============================================================================
# Support function, mean width, nets
# =============================================================================


def support_eval(K: StarBody2D, d: Direction) -> float:
    """h_K(d) = max_i r_i ⟨e(θ_i), d⟩, exact for the fan realization."""
    if d.dim != 2:
        raise DimensionMismatchError(2, d.dim)
    return float(np.max(K.r * (grid_units(K.m) @ d.coords)))


def support_values(K: StarBody2D) -> NDArray[np.float64]:
    """h_K on all m grid directions."""
    return np.max(_cos_table(K.m) * K.r[None, :], axis=1)


def support_at(K: StarBody2D, directions: NDArray[np.float64], chunk: int = 8192) -> NDArray[np.float64]:
    """h_K at each row of an (N, 2) direction array."""
    dirs = np.asarray(directions, dtype=np.float64)
    if dirs.ndim != 2 or dirs.shape[1] != 2:
        raise DimensionMismatchError(2, dirs.shape[-1])
    units = grid_units(K.m)
    out = np.empty(dirs.shape[0])
    for start in range(0, dirs.shape[0], chunk):
        block = dirs[start : start + chunk] @ units.T
        out[start : start + chunk] = np.max(block * K.r[None, :], axis=1)
    return out


def mean_width(K: StarBody2D) -> float:
    """M*(K): average of h_K over the m-node uniform grid."""
    return float(np.mean(support_values(K)))


def fan_distances(K: StarBody2D, points: NDArray[np.float64]) -> NDArray[np.float64]:
    """Distance from each point to the fan ∪_j [0, r_j e(θ_j)]."""
    units = grid_units(K.m)
    along = points @ units.T
    proj = np.clip(along, 0.0, K.r[None, :])
    sq = np.sum(points * points, axis=1)[:, None] - 2.0 * proj * along + proj * proj
    return np.sqrt(np.maximum(sq.min(axis=1), 0.0))


def net_distance(K: StarBody2D, eps: float) -> float:
    """max over grid angles of dist((1-ε)e(θ_i), K)."""
    if not 0.0 < eps < 1.0:
        raise GeometryError(f"eps must lie in (0, 1), got {eps}")
    points = (1.0 - eps) * grid_units(K.m)
    return float(fan_distances(K, points).max())


def net_contained(K: StarBody2D, eps: float, slack: float = 0.0) -> bool:
    """(1-ε)S^1 ⊆ K + 2√ε D, checked at every grid angle."""
    return K.net_contained(eps, slack)


# =============================================================================
# Hausdorff distance
# =============================================================================


def _boundary_points(K: StarBody2D, oversample: int) -> NDArray[np.float64]:
    theta = TWO_PI * np.arange(K.m * oversample) / (K.m * oversample)
    rad = np.asarray(radial_eval(K, theta))
    return np.column_stack([rad * np.cos(theta), rad * np.sin(theta)])


def _one_sided(
    source: StarBody2D, target: StarBody2D, oversample: int, chunk: int = 2048
) -> float:
    pts = _boundary_points(source, oversample)
    rho = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    outside = rho > np.asarray(radial_eval(target, theta)) + 1e-12
    if not np.any(outside):
        return 0.0
    tb = _boundary_points(target, oversample)
    worst = 0.0
    candidates = pts[outside]
    for start in range(0, candidates.shape[0], chunk):
        block = candidates[start : start + chunk]
        d2 = (
            np.sum(block * block, axis=1)[:, None]
            - 2.0 * block @ tb.T
            + np.sum(tb * tb, axis=1)[None, :]
        )
        worst = max(worst, float(np.sqrt(np.maximum(d2.min(axis=1), 0.0)).max()))
    return worst


def hausdorff_distance(A: StarBody2D, B: StarBody2D, oversample: int = 4) -> float:
    """Two-sided Hausdorff distance between the (solid) bodies.

    Boundaries are sampled ``oversample`` times per grid step; points of one
    body inside the other contribute 0.
    """
    if A.m != B.m:
        raise DimensionMismatchError(A.m, B.m)
    return max(_one_sided(A, B, oversample), _one_sided(B, A, oversample))


def hausdorff_to_ball(K: StarBody2D, rho: float, oversample: int = 4) -> float:
    """Hausdorff distance from K to the centred disc of radius ρ."""
    return hausdorff_distance(K, StarBody2D(np.full(K.m, float(rho))), oversample)

