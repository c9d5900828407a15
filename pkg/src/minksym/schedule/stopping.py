"""Composable stopping rules."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Literal, Protocol

RadiusSource = Literal["body", "hull", "interval"]


class ScheduleError(Exception):
    """Base exception for strategies and stopping rules."""


class NonTerminatingRuleError(ScheduleError):
    """A composed rule has no MaxSteps bound on some branch."""

    def __init__(self, rule: StopRule):
        self.rule = rule
        super().__init__(f"Stopping rule {rule!r} is not guaranteed to terminate")


class StepMetrics(Protocol):
    """What a stopping rule reads from a step record."""

    @property
    def phase_step(self) -> int: ...

    @property
    def rho_in(self) -> float: ...

    @property
    def rho_out(self) -> float: ...

    @property
    def hull_rho_in(self) -> float: ...

    @property
    def hull_rho_out(self) -> float: ...

    @property
    def interval_rho_in(self) -> float | None: ...


def _radii(metrics: StepMetrics, source: RadiusSource) -> tuple[float, float]:
    if source == "hull":
        return metrics.hull_rho_in, metrics.hull_rho_out
    if source == "interval":
        if metrics.interval_rho_in is None:
            raise ScheduleError("Rule reads the interval body but no interval is tracked")
        return metrics.interval_rho_in, float("inf")
    return metrics.rho_in, metrics.rho_out


class StopRule(ABC):
    """Predicate over the latest step metrics. Combine with ``&`` and ``|``."""

    @abstractmethod
    def should_stop(self, metrics: StepMetrics) -> bool:
        """True when the loop should end."""

    @property
    def terminates(self) -> bool:
        """Whether a MaxSteps bound is reached on every path."""
        return False

    def __and__(self, other: StopRule) -> AllOf:
        return AllOf((self, other))

    def __or__(self, other: StopRule) -> AnyOf:
        return AnyOf((self, other))


@dataclass(frozen=True)
class InnerRadiusAtLeast(StopRule):
    rho: float
    source: RadiusSource = "body"

    def should_stop(self, metrics: StepMetrics) -> bool:
        return _radii(metrics, self.source)[0] >= self.rho


@dataclass(frozen=True)
class SandwichWithin(StopRule):
    """(1-ε)·target ≤ ρ_in and ρ_out ≤ (1+ε)·target."""

    eps: float
    target: float = 1.0
    source: RadiusSource = "body"

    def should_stop(self, metrics: StepMetrics) -> bool:
        rho_in, rho_out = _radii(metrics, self.source)
        return rho_in >= (1.0 - self.eps) * self.target and rho_out <= (1.0 + self.eps) * self.target


@dataclass(frozen=True)
class MaxSteps(StopRule):
    n: int

    def should_stop(self, metrics: StepMetrics) -> bool:
        return metrics.phase_step >= self.n

    @property
    def terminates(self) -> bool:
        return True


@dataclass(frozen=True)
class AllOf(StopRule):
    rules: tuple[StopRule, ...]

    def should_stop(self, metrics: StepMetrics) -> bool:
        return all(rule.should_stop(metrics) for rule in self.rules)

    @property
    def terminates(self) -> bool:
        return all(rule.terminates for rule in self.rules)


@dataclass(frozen=True)
class AnyOf(StopRule):
    rules: tuple[StopRule, ...]

    def should_stop(self, metrics: StepMetrics) -> bool:
        return any(rule.should_stop(metrics) for rule in self.rules)

    @property
    def terminates(self) -> bool:
        return any(rule.terminates for rule in self.rules)


def ensure_terminates(rule: StopRule) -> StopRule:
    if not rule.terminates:
        raise NonTerminatingRuleError(rule)
    return rule


def should_stop(rule: StopRule, metrics: StepMetrics) -> bool:
    return rule.should_stop(metrics)
