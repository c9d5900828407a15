"""Data models for pipeline runs."""

from __future__ import annotations

import math
from typing import Any

from pydantic import BaseModel, Field, field_validator, model_validator

from minksym.config import Settings, get_settings
from minksym.pipeline.base import Phase, PipelineStatus
from minksym.pipeline.budgets import EPS0, budget_bounds, internal_epsilon, q_factor
from minksym.schedule.strategies import StrategySpec


class StepRecord(BaseModel):
    """Metrics after one symmetrization (or the initial state at step 0)."""

    step: int = Field(ge=0)
    phase: Phase
    phase_step: int = Field(default=0, ge=0)
    angle: float | None = None
    direction: list[float] = Field(default_factory=list)

    rho_in: float
    rho_out: float
    mean_width: float
    radial_distance: float

    hull_rho_in: float
    hull_rho_out: float
    interval_rho_in: float | None = None

    net: bool | None = None
    net_radius: float | None = None
    tau: float = Field(default=0.0, ge=0.0)
    drift: float = 0.0

    @field_validator("rho_in", "rho_out", "mean_width", "radial_distance", "drift")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("metric must be finite")
        return v


class LemmaParams(BaseModel):
    """Parameters of the ball-growing phase."""

    eps: float = Field(gt=0.0, lt=1.0)
    eps_internal: float = Field(gt=0.0)
    eps0: float = float(EPS0)
    r: float = Field(gt=0.0)
    n: int = Field(ge=2)

    @model_validator(mode="after")
    def _check_internal(self) -> LemmaParams:
        if not self.eps_internal < self.eps0:
            raise ValueError(
                f"internal accuracy {self.eps_internal} must be below ε₀ = {self.eps0}"
            )
        return self

    @classmethod
    def from_target(cls, eps: float, r: float, n: int) -> LemmaParams:
        return cls(eps=eps, eps_internal=internal_epsilon(eps), r=r, n=n)

    @property
    def q(self) -> float:
        return float(q_factor(self.eps_internal))

    @property
    def net_radius(self) -> float:
        """2√ε_int."""
        return 2.0 * math.sqrt(self.eps_internal)

    @property
    def target_radius(self) -> float:
        """1 - 4√ε_int."""
        return 1.0 - 4.0 * math.sqrt(self.eps_internal)

    def budgets(self) -> tuple[int, int]:
        return budget_bounds(self.eps_internal, min(self.r, 1.0 - 1e-12))


class PipelineConfig(BaseModel):
    """Configuration for a single run."""

    eps: float = Field(gt=0.0, lt=1.0)
    c2: float = Field(default=0.2, gt=0.0, lt=1.0)
    raster_size: int = Field(default=1024, ge=32)
    strategy: StrategySpec = Field(default_factory=StrategySpec)

    phase1_max_steps: int = Field(default=400, ge=0)
    phase2_max_steps: int = Field(default=600, ge=0)
    phase3_max_steps: int = Field(default=200, ge=0)

    renormalize_mean_width: bool = True
    via_interval: bool = False
    seed_ball_only: bool = False
    allow_large_eps: bool = False

    @classmethod
    def from_settings(
        cls, eps: float, strategy: StrategySpec, settings: Settings | None = None, **overrides: Any
    ) -> PipelineConfig:
        """Config with resolutions and step caps taken from the environment."""
        settings = settings or get_settings()
        exp = settings.experiment
        values: dict[str, Any] = {
            "eps": eps,
            "strategy": strategy,
            "c2": exp.c2,
            "raster_size": settings.geometry.raster_size,
            "phase1_max_steps": exp.phase1_max_steps,
            "phase2_max_steps": exp.phase2_max_steps,
            "phase3_max_steps": exp.phase3_max_steps,
            "renormalize_mean_width": exp.renormalize_mean_width,
        }
        values.update(overrides)
        return cls(**values)

    @model_validator(mode="after")
    def _check_eps(self) -> PipelineConfig:
        if self.eps >= 0.5 and not self.allow_large_eps:
            raise ValueError(f"eps = {self.eps} >= 1/2 needs allow_large_eps")
        return self


class IntervalReport(BaseModel):
    """Inscribed-interval sub-experiment of the seed-ball phase."""

    R: float
    mean_width: float
    goal: float
    final_rho_in: float
    steps: int


class RunReport(BaseModel):
    """Result of a full three-phase run."""

    status: PipelineStatus = PipelineStatus.COMPLETED
    n: int
    eps: float
    eps_internal: float
    seed: int
    M0: float

    n1: int = 0
    n2: int = 0
    n3a: int = 0
    n3b: int = 0

    budget_a: int | None = None
    budget_b: int | None = None
    scaling_form: float = 0.0

    final_rho_in: float | None = None
    final_rho_out: float | None = None
    final_hull_rho_in: float | None = None
    final_hull_rho_out: float | None = None

    tau_max: float = 0.0
    tau_total: float = 0.0
    mean_width_drift: float = 0.0
    net_radius_certified: float | None = None

    interval: IntervalReport | None = None
    steps: list[StepRecord] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    error: str | None = None
    wall_time: float = 0.0

    @property
    def total(self) -> int:
        return self.n1 + self.n2 + self.n3a + self.n3b

    @property
    def success(self) -> bool:
        return self.status == PipelineStatus.COMPLETED


class FittedConstants(BaseModel):
    """Empirical counterparts of the step-count constants."""

    runs: int
    C: float | None = None
    C_intercept: float | None = None
    C_r2: float | None = None
    c1: float | None = None
    c1_intercept: float | None = None
