"""Direction-selection strategies."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, model_validator

from minksym.geometry.core import Direction, random_direction
from minksym.geometry.star2d import GridAngle
from minksym.schedule.stopping import ScheduleError


class StrategyExhaustedError(ScheduleError):
    """A finite strategy has no directions left."""

    def __init__(self, message: str, emitted: int):
        self.emitted = emitted
        super().__init__(message)


class StrategyKind(str, Enum):
    """Available direction sources."""

    UNIFORM_RANDOM = "uniform"
    GRID_RANDOM_2D = "grid"
    FIXED_LIST = "fixed"
    HALVING_ANGLES_2D = "halving"


class Strategy(ABC):
    """Stateful source of symmetrization directions."""

    def __init__(self) -> None:
        self._emitted = 0

    @property
    @abstractmethod
    def kind(self) -> StrategyKind:
        """Strategy kind."""

    @property
    def position(self) -> int:
        """Number of directions emitted so far."""
        return self._emitted

    def next_direction(self, n: int) -> Direction:
        """Next direction in R^n; advances the strategy."""
        u = self._next(n)
        self._emitted += 1
        return u

    @abstractmethod
    def _next(self, n: int) -> Direction:
        ...

    @staticmethod
    def _require_planar(n: int, kind: StrategyKind) -> None:
        if n != 2:
            raise ScheduleError(f"Strategy '{kind.value}' emits planar directions, asked for n={n}")


class UniformRandom(Strategy):
    """Haar-uniform directions on S^{n-1}."""

    def __init__(self, seed: int):
        super().__init__()
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    @property
    def kind(self) -> StrategyKind:
        return StrategyKind.UNIFORM_RANDOM

    def _next(self, n: int) -> Direction:
        return random_direction(n, self._rng)


class GridRandom2D(Strategy):
    """Uniformly random grid angle e(2πk/m)."""

    def __init__(self, seed: int, m: int):
        super().__init__()
        self.seed = seed
        self.m = m
        self._rng = np.random.default_rng(seed)

    @property
    def kind(self) -> StrategyKind:
        return StrategyKind.GRID_RANDOM_2D

    def _next(self, n: int) -> Direction:
        self._require_planar(n, self.kind)
        return GridAngle(int(self._rng.integers(self.m)), self.m).direction


class FixedList(Strategy):
    """Replays a given list once."""

    def __init__(self, directions: Sequence[Direction]):
        super().__init__()
        self.directions = list(directions)

    @property
    def kind(self) -> StrategyKind:
        return StrategyKind.FIXED_LIST

    def _next(self, n: int) -> Direction:
        if self._emitted >= len(self.directions):
            raise StrategyExhaustedError(
                f"Fixed list of {len(self.directions)} directions exhausted", self._emitted
            )
        u = self.directions[self._emitted]
        if u.dim != n:
            raise ScheduleError(f"Fixed direction has dimension {u.dim}, asked for n={n}")
        return u


def halving_order(m: int) -> list[int]:
    """Grid indices in van der Corput order.

    Fractions j/2^P in bit-reversed order are mapped to floor(f·m); repeats are
    skipped. For m = 8 this is 0, 4, 2, 6, 1, 5, 3, 7.
    """
    bits = max(1, int(np.ceil(np.log2(m))))
    size = 1 << bits
    seen: set[int] = set()
    order: list[int] = []
    for j in range(size):
        rev = int(format(j, f"0{bits}b")[::-1], 2)
        k = (rev * m) // size
        if k not in seen:
            seen.add(k)
            order.append(k)
    return order


class HalvingAngles2D(Strategy):
    """Deterministic grid angles, each bisecting the largest gap so far; cycles."""

    def __init__(self, m: int):
        super().__init__()
        self.m = m
        self._order = halving_order(m)

    @property
    def kind(self) -> StrategyKind:
        return StrategyKind.HALVING_ANGLES_2D

    def _next(self, n: int) -> Direction:
        self._require_planar(n, self.kind)
        k = self._order[self._emitted % len(self._order)]
        return GridAngle(k, self.m).direction


class StrategySpec(BaseModel):
    """Serializable description of a strategy."""

    kind: StrategyKind = StrategyKind.GRID_RANDOM_2D
    seed: int = 0
    m: int = Field(default=720, ge=8)
    angles: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_fixed(self) -> StrategySpec:
        if self.kind == StrategyKind.FIXED_LIST and not self.angles:
            raise ValueError("Fixed strategy needs at least one angle")
        return self

    def build(self) -> Strategy:
        if self.kind == StrategyKind.UNIFORM_RANDOM:
            return UniformRandom(self.seed)
        if self.kind == StrategyKind.GRID_RANDOM_2D:
            return GridRandom2D(self.seed, self.m)
        if self.kind == StrategyKind.HALVING_ANGLES_2D:
            return HalvingAngles2D(self.m)
        return FixedList([Direction.from_angle(theta) for theta in self.angles])


def default_strategy(n: int, seed: int, m: int = 720) -> StrategySpec:
    """Grid angles for planar star runs, Haar directions otherwise."""
    kind = StrategyKind.GRID_RANDOM_2D if n == 2 else StrategyKind.UNIFORM_RANDOM
    return StrategySpec(kind=kind, seed=seed, m=m)


def next_direction(s: Strategy, n: int) -> Direction:
    return s.next_direction(n)
