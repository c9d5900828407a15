"""Direction schedules and stopping rules."""

from minksym.schedule.stopping import (
    AllOf,
    AnyOf,
    InnerRadiusAtLeast,
    MaxSteps,
    NonTerminatingRuleError,
    SandwichWithin,
    ScheduleError,
    StopRule,
    ensure_terminates,
    should_stop,
)
from minksym.schedule.strategies import (
    FixedList,
    GridRandom2D,
    HalvingAngles2D,
    Strategy,
    StrategyExhaustedError,
    StrategyKind,
    StrategySpec,
    UniformRandom,
    default_strategy,
    next_direction,
)

__all__ = [
    "AllOf",
    "AnyOf",
    "FixedList",
    "GridRandom2D",
    "HalvingAngles2D",
    "InnerRadiusAtLeast",
    "MaxSteps",
    "NonTerminatingRuleError",
    "SandwichWithin",
    "ScheduleError",
    "StopRule",
    "Strategy",
    "StrategyExhaustedError",
    "StrategyKind",
    "StrategySpec",
    "UniformRandom",
    "default_strategy",
    "ensure_terminates",
    "next_direction",
    "should_stop",
]
