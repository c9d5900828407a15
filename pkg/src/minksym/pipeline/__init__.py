"""Three-phase symmetrization pipeline."""

from minksym.pipeline.base import (
    BudgetExhaustedError,
    InvariantViolationError,
    Phase,
    PipelineError,
    PipelineStatus,
)
from minksym.pipeline.budgets import (
    EPS0,
    BudgetParameterError,
    budget_bounds,
    internal_epsilon,
    q_factor,
    scaling_form,
)
from minksym.pipeline.constants import fit_constants
from minksym.pipeline.driver import TheoremDriver, run_theorem
from minksym.pipeline.models import (
    FittedConstants,
    IntervalReport,
    LemmaParams,
    PipelineConfig,
    RunReport,
    StepRecord,
)
from minksym.pipeline.phases import (
    Trajectory,
    phase1_seed_ball,
    phase2_round_hull,
    phase3_grow_ball,
)

__all__ = [
    "EPS0",
    "BudgetExhaustedError",
    "BudgetParameterError",
    "FittedConstants",
    "IntervalReport",
    "InvariantViolationError",
    "LemmaParams",
    "Phase",
    "PipelineConfig",
    "PipelineError",
    "PipelineStatus",
    "RunReport",
    "StepRecord",
    "TheoremDriver",
    "Trajectory",
    "budget_bounds",
    "fit_constants",
    "internal_epsilon",
    "phase1_seed_ball",
    "phase2_round_hull",
    "phase3_grow_ball",
    "q_factor",
    "run_theorem",
    "scaling_form",
]
