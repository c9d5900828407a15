"""Base classes and errors shared by all body representations."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

if TYPE_CHECKING:
    from minksym.geometry.core import Direction
    from minksym.geometry.support import SupportBody


class GeometryError(ValueError):
    """Base exception for invalid geometric input."""


class DimensionMismatchError(GeometryError):
    """Operands live in different dimensions."""

    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"Dimension mismatch: expected {expected}, got {got}")


class GridAlignmentError(GeometryError):
    """A direction or reflection does not map the angle grid to itself."""

    def __init__(self, message: str, m: int):
        self.m = m
        super().__init__(message)


class EmptyBodyError(GeometryError):
    """Operation requires a nonempty body."""


class ResolutionError(GeometryError):
    """Raster resolution outside the supported range."""

    def __init__(self, message: str, resolution: int):
        self.resolution = resolution
        super().__init__(message)


class OriginOutsideError(GeometryError):
    """Support values are negative, i.e. the origin is outside the body."""


class InvalidBodyError(GeometryError):
    """Body data violates its representation invariants."""


@dataclass(frozen=True)
class SymmetralStep:
    """Result of one Minkowski symmetrization.

    ``tolerance`` is the error bound (length units) attributable to the
    discretization of this single step; 0 for exact operations.
    """

    body: Body
    tolerance: float = 0.0


class Body(ABC):
    """Abstract body the symmetrization pipeline operates on.

    Implementations:
    - StarBody2D: planar star-shaped set, exact radial grid, raster sums
    - SupportBody: convex body in R^n given by support values on a cloud
    """

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension n."""

    @abstractmethod
    def inner_radius(self) -> float:
        """Largest ρ with ρD ⊆ K."""

    @abstractmethod
    def outer_radius(self) -> float:
        """Smallest ρ with K ⊆ ρD."""

    @abstractmethod
    def mean_width(self) -> float:
        """M*(K), the sphere average of the support function."""

    @abstractmethod
    def radial_distance(self, rho: float) -> float:
        """Sup-distance of the body's boundary description to the ball ρD."""

    @abstractmethod
    def scaled(self, factor: float) -> Body:
        """Dilate the body by ``factor`` about the origin."""

    @abstractmethod
    def symmetral(self, direction: Direction, raster_size: int) -> SymmetralStep:
        """Minkowski symmetral (K + R_u K) / 2."""

    @abstractmethod
    def support_body(self) -> SupportBody:
        """Support values of conv K on the body's natural cloud."""

    @abstractmethod
    def net_distance(self, eps: float) -> float:
        """Largest distance from a sample of (1-ε)S^{n-1} to the body."""

    @abstractmethod
    def longest_ray(self) -> tuple[float, Direction]:
        """(R, u) with [0, Ru] ⊆ K and R the outer radius."""

    @abstractmethod
    def support_at(self, directions: NDArray[np.float64]) -> NDArray[np.float64]:
        """Support function evaluated at each row of ``directions``."""

    def net_contained(self, eps: float, slack: float = 0.0) -> bool:
        """(1-ε)S^{n-1} ⊆ K + (2√ε + slack)D on the body's sample points."""
        if not 0.0 < eps < 1.0:
            raise GeometryError(f"eps must lie in (0, 1), got {eps}")
        return self.net_distance(eps) <= 2.0 * np.sqrt(eps) + slack + 1e-12
