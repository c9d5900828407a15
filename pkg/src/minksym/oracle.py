"""Brute-force references for sums, mean widths and containment.

Nothing here goes through the FFT path: the naive sum ORs shifted copies of
one raster, cell by cell. Costs are deliberately unoptimized and guarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import structlog
from numpy.typing import NDArray
from scipy.integrate import quad

from minksym.geometry.base import (
    Body,
    DimensionMismatchError,
    EmptyBodyError,
    GeometryError,
    ResolutionError,
)
from minksym.geometry.core import random_directions
from minksym.geometry.star2d import (
    StarBody2D,
    extract_radial,
    fan_distances,
    grid_units,
    outer_radius,
    radial_eval,
    rasterize,
    sum_half_extent,
)

logger = structlog.get_logger(__name__)

MAX_ORACLE_SIZE = 160
MIN_MC_SAMPLES = 1000
MC_CHUNK = 65536


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Points sampled from a planar body, one per row."""

    points: NDArray[np.float64]

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DimensionMismatchError(2, pts.shape[-1] if pts.ndim else 0)
        if pts.shape[0] == 0:
            raise EmptyBodyError("Point cloud is empty")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])


def naive_minkowski_occupancy(A: StarBody2D, B: StarBody2D, G: int) -> tuple[NDArray[np.bool_], float]:
    """Cell set of A + B as the union of B's raster shifted to every cell of A.

    Returns the (2G-1)² occupancy, origin at index 2·(G//2), and the cell width.
    """
    if G > MAX_ORACLE_SIZE:
        raise ResolutionError(f"Oracle raster is O(G^4); G must be <= {MAX_ORACLE_SIZE}", G)
    if A.m != B.m:
        raise DimensionMismatchError(A.m, B.m)
    half_extent = sum_half_extent(A, B, G)
    ra = rasterize(A, G, half_extent)
    rb = rasterize(B, G, half_extent)
    out = np.zeros((2 * G - 1, 2 * G - 1), dtype=bool)
    for i, j in zip(*np.nonzero(ra.occ), strict=True):
        out[i : i + G, j : j + G] |= rb.occ
    return out, ra.h


def naive_minkowski_sum(A: StarBody2D, B: StarBody2D, G: int = 128) -> StarBody2D:
    """Reference A + B on a small raster."""
    reach = outer_radius(A) + outer_radius(B)
    if reach == 0.0:
        return StarBody2D.zero(A.m)
    occ, h = naive_minkowski_occupancy(A, B, G)
    logger.debug("naive_minkowski_sum", G=G, cells=int(occ.sum()))
    return StarBody2D(extract_radial(occ, h, origin=2 * (G // 2), m=A.m, reach=reach))


def interval_mean_width(n: int) -> float:
    """M*([0, e₁]) in dimension n, i.e. ½·E|x₁| over S^{n-1}.

    x₁ has density ∝ (1-t²)^((n-3)/2) on [-1, 1]; both integrals use the
    algebraic endpoint weight so the n = 2 singularity is handled exactly.
    """
    if n < 2:
        raise GeometryError(f"Dimension must be >= 2, got {n}")
    a = (n - 3) / 2.0
    # weight (t+1)^a (1-t)^a on [-1, 1]
    mass, _ = quad(lambda t: 1.0, -1.0, 1.0, weight="alg", wvar=(a, a), epsabs=1e-13, epsrel=1e-13)
    # weight t^0 (1-t)^a on [0, 1], remaining factor t (1+t)^a
    half, _ = quad(
        lambda t: t * (1.0 + t) ** a, 0.0, 1.0, weight="alg", wvar=(0.0, a), epsabs=1e-13, epsrel=1e-13
    )
    return 0.5 * (2.0 * half) / mass


def mc_mean_width(K: Body, samples: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo M*(K) over Haar-random directions; returns (estimate, stderr)."""
    if samples < MIN_MC_SAMPLES:
        raise GeometryError(f"Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {samples}")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    remaining = samples
    while remaining > 0:
        count = min(remaining, MC_CHUNK)
        h = K.support_at(random_directions(K.dim, count, rng))
        total += float(h.sum())
        total_sq += float(np.dot(h, h))
        remaining -= count
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(var / samples)


def sample_points(K: StarBody2D, count: int, seed: int = 0) -> PointCloud:
    """Points of K: half on its boundary, half on grid spokes and interior rays."""
    if count < 1:
        raise EmptyBodyError("Point cloud is empty")
    rng = np.random.default_rng(seed)
    n_boundary = count // 2
    n_spoke = (count - n_boundary) // 2
    n_interior = count - n_boundary - n_spoke

    theta = rng.uniform(0.0, 2.0 * np.pi, n_boundary + n_interior)
    rad = np.asarray(radial_eval(K, theta), dtype=np.float64)
    rad[n_boundary:] *= np.sqrt(rng.uniform(0.0, 1.0, n_interior))
    curve = np.column_stack([rad * np.cos(theta), rad * np.sin(theta)])

    idx = rng.integers(0, K.m, n_spoke)
    t = rng.uniform(0.0, 1.0, n_spoke) * K.r[idx]
    spokes = t[:, None] * grid_units(K.m)[idx]
    return PointCloud(np.vstack([curve, spokes]))


def contains(K: StarBody2D, points: NDArray[np.float64] | PointCloud, tol: float = 0.0) -> NDArray[np.bool_]:
    """Whether each point lies in K, or within ``tol`` of its radial boundary or spokes."""
    pts = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=np.float64)
    rho = np.hypot(pts[:, 0], pts[:, 1])
    bound = np.asarray(radial_eval(K, np.arctan2(pts[:, 1], pts[:, 0])), dtype=np.float64)
    radial_ok = rho <= bound + tol + 1e-12
    if tol <= 0.0 or np.all(radial_ok):
        return radial_ok
    near = fan_distances(K, pts[~radial_ok]) <= tol
    radial_ok[~radial_ok] = near
    return radial_ok
