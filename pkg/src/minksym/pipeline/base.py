"""Errors and enums shared by the pipeline."""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from minksym.geometry.base import Body
    from minksym.pipeline.models import RunReport


class Phase(str, Enum):
    """Pipeline phases, in execution order."""

    INITIAL = "initial"
    SEED_BALL = "seed_ball"
    ROUND_HULL = "round_hull"
    GROW_BALL_A = "grow_ball_a"
    GROW_BALL_B = "grow_ball_b"


class PipelineStatus(str, Enum):
    """Run outcome."""

    COMPLETED = "completed"
    INVARIANT_VIOLATION = "invariant_violation"
    BUDGET_EXHAUSTED = "budget_exhausted"


class PipelineError(Exception):
    """Base exception for pipeline runs.

    The driver attaches the partial ``report`` before re-raising.
    """

    report: RunReport | None = None


class InvariantViolationError(PipelineError):
    """A per-step inequality or runtime oracle failed beyond tolerance."""

    def __init__(self, inequality: str, phase: Phase, step: int, lhs: float, rhs: float):
        self.inequality = inequality
        self.phase = phase
        self.step = step
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"{inequality} violated in {phase.value} at step {step}: {lhs!r} vs {rhs!r}"
        )


class BudgetExhaustedError(PipelineError):
    """A phase hit its step cap before reaching its target."""

    def __init__(self, phase: Phase, steps: int, best_so_far: Body):
        self.phase = phase
        self.steps = steps
        self.best_so_far = best_so_far
        super().__init__(f"{phase.value} exhausted its budget of {steps} steps")
