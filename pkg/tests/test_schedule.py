from dataclasses import dataclass

import numpy as np
import pytest
from pydantic import ValidationError

from minksym.geometry import Direction, GridAngle
from minksym.schedule import (
    FixedList,
    GridRandom2D,
    HalvingAngles2D,
    InnerRadiusAtLeast,
    MaxSteps,
    NonTerminatingRuleError,
    SandwichWithin,
    ScheduleError,
    StrategyExhaustedError,
    StrategyKind,
    StrategySpec,
    UniformRandom,
    default_strategy,
    ensure_terminates,
    next_direction,
    should_stop,
)
from minksym.schedule.strategies import halving_order


@dataclass
class Metrics:
    phase_step: int = 0
    rho_in: float = 0.0
    rho_out: float = 2.0
    hull_rho_in: float = 0.0
    hull_rho_out: float = 2.0
    interval_rho_in: float | None = None


class TestStopRules:
    def test_inner_radius(self):
        rule = InnerRadiusAtLeast(0.5)
        assert not should_stop(rule, Metrics(rho_in=0.49))
        assert should_stop(rule, Metrics(rho_in=0.5))

    def test_sandwich_reads_hull(self):
        rule = SandwichWithin(0.1, source="hull")
        assert should_stop(rule, Metrics(hull_rho_in=0.95, hull_rho_out=1.05))
        assert not should_stop(rule, Metrics(hull_rho_in=0.95, hull_rho_out=1.2))
        assert not should_stop(SandwichWithin(0.1), Metrics(hull_rho_in=0.95, hull_rho_out=1.05))

    def test_sandwich_target(self):
        rule = SandwichWithin(0.1, target=2.0)
        assert should_stop(rule, Metrics(rho_in=1.9, rho_out=2.1))

    def test_interval_source(self):
        rule = InnerRadiusAtLeast(0.3, source="interval")
        assert should_stop(rule, Metrics(interval_rho_in=0.31))
        with pytest.raises(ScheduleError):
            should_stop(rule, Metrics())

    def test_combinators(self):
        rule = InnerRadiusAtLeast(0.5) | MaxSteps(10)
        assert not should_stop(rule, Metrics(phase_step=3))
        assert should_stop(rule, Metrics(phase_step=10))
        assert should_stop(rule, Metrics(rho_in=0.6))

        both = InnerRadiusAtLeast(0.5) & SandwichWithin(0.5)
        assert should_stop(both, Metrics(rho_in=0.6, rho_out=1.4))
        assert not should_stop(both, Metrics(rho_in=0.6, rho_out=1.6))

    def test_termination(self):
        assert ensure_terminates(InnerRadiusAtLeast(0.5) | MaxSteps(3)).terminates
        assert (MaxSteps(3) & MaxSteps(5)).terminates
        with pytest.raises(NonTerminatingRuleError):
            ensure_terminates(InnerRadiusAtLeast(0.5))
        with pytest.raises(NonTerminatingRuleError):
            ensure_terminates(InnerRadiusAtLeast(0.5) & MaxSteps(3))


class TestStrategies:
    def test_halving_order(self):
        assert halving_order(8) == [0, 4, 2, 6, 1, 5, 3, 7]

    @pytest.mark.parametrize("m", [6, 72, 720])
    def test_halving_covers_grid(self, m):
        assert sorted(halving_order(m)) == list(range(m))

    def test_halving_cycles(self):
        s = HalvingAngles2D(8)
        angles = [next_direction(s, 2).angle for _ in range(16)]
        assert angles[:8] == angles[8:]
        assert s.position == 16

    def test_grid_random_is_reproducible(self):
        a, b = GridRandom2D(5, 72), GridRandom2D(5, 72)
        for _ in range(20):
            u, v = a.next_direction(2), b.next_direction(2)
            assert np.array_equal(u.coords, v.coords)

    def test_grid_random_stays_on_grid(self):
        s = GridRandom2D(1, 72)
        for _ in range(50):
            u = s.next_direction(2)
            k = round(u.angle * 72 / (2 * np.pi)) % 72
            assert np.allclose(u.coords, GridAngle(k, 72).direction.coords, atol=1e-12)

    def test_uniform_random(self):
        s = UniformRandom(3)
        u = s.next_direction(5)
        assert u.dim == 5
        assert np.linalg.norm(u.coords) == pytest.approx(1.0)
        assert s.kind == StrategyKind.UNIFORM_RANDOM

    def test_planar_strategies_reject_higher_dims(self):
        with pytest.raises(ScheduleError):
            GridRandom2D(0, 72).next_direction(3)
        with pytest.raises(ScheduleError):
            HalvingAngles2D(72).next_direction(3)

    def test_fixed_list(self):
        s = FixedList([Direction.basis(2, 0), Direction.basis(2, 1)])
        assert s.next_direction(2).coords[0] == 1.0
        assert s.next_direction(2).coords[1] == 1.0
        with pytest.raises(StrategyExhaustedError) as excinfo:
            s.next_direction(2)
        assert excinfo.value.emitted == 2

    def test_fixed_list_dimension(self):
        with pytest.raises(ScheduleError):
            FixedList([Direction.basis(2)]).next_direction(3)


class TestStrategySpec:
    def test_fixed_needs_angles(self):
        with pytest.raises(ValidationError):
            StrategySpec(kind=StrategyKind.FIXED_LIST)

    def test_small_grid(self):
        with pytest.raises(ValidationError):
            StrategySpec(m=4)

    def test_build(self):
        spec = StrategySpec(kind=StrategyKind.FIXED_LIST, angles=[0.0, np.pi / 2])
        s = spec.build()
        assert isinstance(s, FixedList)
        assert len(s.directions) == 2
        assert isinstance(StrategySpec(kind=StrategyKind.HALVING_ANGLES_2D, m=72).build(), HalvingAngles2D)

    def test_default_strategy(self):
        assert default_strategy(2, 4, m=72).kind == StrategyKind.GRID_RANDOM_2D
        assert default_strategy(2, 4, m=72).m == 72
        assert default_strategy(3, 4).kind == StrategyKind.UNIFORM_RANDOM

    def test_json_roundtrip(self):
        spec = default_strategy(2, 9, m=360)
        assert StrategySpec.model_validate_json(spec.model_dump_json()) == spec
