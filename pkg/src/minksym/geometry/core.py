"""Vectors, reflections, directions and spherical quadrature."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from minksym.geometry.base import DimensionMismatchError, GeometryError

Vec = NDArray[np.float64]

UNIT_TOLERANCE = 1e-12
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
COVERING_SAMPLES = 16384
COVERING_SAMPLE_SEED = 0

QuadratureKind = Literal["grid", "fibonacci", "random"]


def as_vec(x: ArrayLike, n: int | None = None) -> Vec:
    """Validate and convert ``x`` to a finite float vector of length n >= 2."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] < 2:
        raise GeometryError(f"Expected a vector of length >= 2, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatchError(n, v.shape[0])
    if not np.all(np.isfinite(v)):
        raise GeometryError("Vector coordinates must be finite")
    return v


@dataclass(frozen=True, eq=False)
class Direction:
    """Unit vector u ∈ S^{n-1}."""

    coords: Vec

    def __post_init__(self) -> None:
        v = as_vec(self.coords)
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > UNIT_TOLERANCE:
            raise GeometryError(f"Direction must have unit norm, got {norm!r}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "coords", v)

    @classmethod
    def normalized(cls, x: ArrayLike) -> Direction:
        """Direction of a nonzero vector."""
        v = as_vec(x)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise GeometryError("Cannot normalize the zero vector")
        return cls(v / norm)

    @classmethod
    def from_angle(cls, theta: float) -> Direction:
        """Planar direction e(θ) = (cos θ, sin θ)."""
        return cls(np.array([np.cos(theta), np.sin(theta)]))

    @classmethod
    def basis(cls, n: int, i: int = 0) -> Direction:
        """Standard basis vector e_{i+1} in R^n."""
        v = np.zeros(n)
        v[i] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])

    @property
    def angle(self) -> float:
        """Polar angle in [0, 2π); planar directions only."""
        if self.dim != 2:
            raise DimensionMismatchError(2, self.dim)
        return float(np.arctan2(self.coords[1], self.coords[0]) % (2.0 * np.pi))

    def __neg__(self) -> Direction:
        return Direction(-self.coords)

    def __repr__(self) -> str:
        return f"Direction({np.array2string(self.coords, precision=6)})"


def reflect(x: ArrayLike, u: Direction) -> Vec:
    """R_u x = x - 2⟨x,u⟩u, the reflection in the hyperplane u^⊥."""
    v = as_vec(x)
    if v.shape[0] != u.dim:
        raise DimensionMismatchError(u.dim, v.shape[0])
    return v - 2.0 * float(np.dot(v, u.coords)) * u.coords


def reflect_many(points: NDArray[np.float64], u: Direction) -> NDArray[np.float64]:
    """Row-wise reflection of an (N, n) array."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != u.dim:
        raise DimensionMismatchError(u.dim, pts.shape[-1])
    return pts - 2.0 * np.outer(pts @ u.coords, u.coords)


def random_direction(n: int, rng: np.random.Generator) -> Direction:
    """Uniform direction on S^{n-1} from a normalized standard Gaussian.

    Deterministic given the state of ``rng``.
    """
    if n < 2:
        raise GeometryError(f"Dimension must be >= 2, got {n}")
    while True:
        g = rng.standard_normal(n)
        norm = float(np.linalg.norm(g))
        if norm > 1e-300:
            return Direction(g / norm)


def random_directions(n: int, count: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """(count, n) array of uniform directions; vectorized form of random_direction."""
    if n < 2:
        raise GeometryError(f"Dimension must be >= 2, got {n}")
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    """Nodes and weights approximating the normalized Haar measure σ."""

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    kind: QuadratureKind = "random"
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.nodes.ndim != 2 or self.nodes.shape[1] < 2:
            raise GeometryError(f"Nodes must be an (M, n) array, got {self.nodes.shape}")
        if self.weights.shape != (self.nodes.shape[0],):
            raise GeometryError("Weights must align with nodes")
        if np.any(self.weights < 0):
            raise GeometryError("Weights must be nonnegative")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise GeometryError("Weights must sum to 1")

    @property
    def dim(self) -> int:
        return int(self.nodes.shape[1])

    @property
    def size(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def is_uniform_grid(self) -> bool:
        """True for the planar m-th roots of unity grid (exact mode)."""
        return self.kind == "grid"

    def direction(self, i: int) -> Direction:
        return Direction(self.nodes[i])

    def integrate(self, values: ArrayLike) -> float:
        """Σ w_i f(x_i) for precomputed samples."""
        vals = np.asarray(values, dtype=np.float64)
        if vals.shape != self.weights.shape:
            raise DimensionMismatchError(self.size, int(vals.shape[0]))
        return float(self.weights @ vals)

    def integrate_fn(self, f: Callable[[NDArray[np.float64]], NDArray[np.float64]]) -> float:
        """Quadrature of a vectorized integrand taking the (M, n) node array."""
        return self.integrate(f(self.nodes))

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.nodes)

    @cached_property
    def spacing(self) -> float:
        """Covering radius: largest geodesic distance from a point of the sphere to its nearest node.

        Exactly π/M for the planar grid. For clouds it is estimated from a fixed set of
        sample directions, so it can fall slightly short of the true value.
        """
        if self.is_uniform_grid:
            return float(np.pi / self.size)
        count = max(COVERING_SAMPLES, 4 * self.size)
        samples = random_directions(self.dim, count, np.random.default_rng(COVERING_SAMPLE_SEED))
        chord, _ = self.tree.query(samples)
        nearest = np.clip(chord, 0.0, 2.0)
        return float(np.max(2.0 * np.arcsin(nearest / 2.0)))


def sphere_quadrature(n: int, M: int, seed: int = 0) -> SphereQuadrature:
    """Equal-weight quadrature on S^{n-1}.

    n = 2: the M-th roots of unity, exact for trigonometric polynomials of degree < M.
    n = 3: Fibonacci spiral nodes (quasi-uniform).
    n >= 4: Monte Carlo nodes from normalized Gaussians, reproducible from ``seed``.
    """
    if n < 2:
        raise GeometryError(f"Dimension must be >= 2, got {n}")
    min_nodes = 4 if n == 2 else 8
    if M < min_nodes:
        raise GeometryError(f"Quadrature in dimension {n} needs at least {min_nodes} nodes, got {M}")

    weights = np.full(M, 1.0 / M)

    if n == 2:
        theta = 2.0 * np.pi * np.arange(M) / M
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        return SphereQuadrature(nodes=nodes, weights=weights, kind="grid")

    if n == 3:
        k = np.arange(M)
        z = 1.0 - (2.0 * k + 1.0) / M
        radius = np.sqrt(1.0 - z * z)
        longitude = k * GOLDEN_ANGLE
        nodes = np.column_stack([np.cos(longitude) * radius, np.sin(longitude) * radius, z])
        return SphereQuadrature(nodes=nodes, weights=weights, kind="fibonacci")

    rng = np.random.default_rng(seed)
    nodes = random_directions(n, M, rng)
    return SphereQuadrature(nodes=nodes, weights=weights, kind="random", seed=seed)
