"""Three-phase driver: seed ball, round hull, grow ball."""

from __future__ import annotations

import math
import time
from datetime import datetime, timezone
from typing import Any

import structlog

from minksym.geometry.base import Body, EmptyBodyError
from minksym.pipeline.base import (
    BudgetExhaustedError,
    InvariantViolationError,
    Phase,
    PipelineError,
    PipelineStatus,
)
from minksym.pipeline.budgets import internal_epsilon, scaling_form
from minksym.pipeline.models import (
    IntervalReport,
    LemmaParams,
    PipelineConfig,
    RunReport,
)
from minksym.pipeline.phases import (
    ABS_TOL,
    INTERVAL_GOAL,
    Trajectory,
    phase1_seed_ball,
    phase2_round_hull,
    phase3_grow_ball,
)
from minksym.schedule.strategies import Strategy, StrategySpec, default_strategy

logger = structlog.get_logger(__name__)


class TheoremDriver:
    """Drives a body to a near-ball by Minkowski symmetrizations.

    The run:
    - rescales K to mean width 1
    - grows a centred ball of radius c₂/√n inside it
    - rounds the convex hull to within 1 ± ε_int and certifies the net
    - grows the inner ball to 1 - 4√ε_int, checking every step

    Each step is checked against the inequalities it must satisfy; a
    violation beyond the step's tolerance stops the run.
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.status: PipelineStatus | None = None
        self._operation_log: list[dict[str, Any]] = []

    def run(self, K: Body, *, raise_on_failure: bool = False) -> RunReport:
        """Execute all three phases on K.

        Args:
            K: Nonempty body; for planar star bodies the strategy must emit
                directions on the body's angle grid.
            raise_on_failure: Re-raise pipeline errors (with ``report``
                attached) instead of returning a failed report.

        Returns:
            RunReport with per-step records, phase counts and budgets
        """
        cfg = self.config
        started = time.perf_counter()
        M0 = K.mean_width()
        if not M0 > 0.0:
            raise EmptyBodyError("Body has zero mean width")

        n = K.dim
        eps_int = internal_epsilon(cfg.eps)
        traj = Trajectory(K.scaled(1.0 / M0), raster_size=cfg.raster_size, renormalize=cfg.renormalize_mean_width)
        strategy = cfg.strategy.build()
        report = RunReport(
            n=n,
            eps=cfg.eps,
            eps_internal=eps_int,
            seed=cfg.strategy.seed,
            M0=M0,
            scaling_form=scaling_form(n, cfg.eps),
        )
        log = logger.bind(n=n, eps=cfg.eps, seed=cfg.strategy.seed)
        log.info("run_start", M0=M0, eps_internal=eps_int, strategy=cfg.strategy.kind.value)

        try:
            target = cfg.c2 / math.sqrt(n)
            self._log_operation("phase_start", {"phase": Phase.SEED_BALL.value, "target": target})
            _, n1 = phase1_seed_ball(
                traj,
                strategy,
                target,
                max_steps=cfg.phase1_max_steps,
                via_interval=cfg.via_interval,
            )
            if traj.interval is not None:
                report.interval = IntervalReport(
                    R=K.scaled(1.0 / M0).outer_radius(),
                    mean_width=traj.interval.mean_width(),
                    goal=INTERVAL_GOAL * traj.interval.mean_width(),
                    final_rho_in=traj.interval_rho_in or 0.0,
                    steps=n1,
                )
            self._log_operation("phase_complete", {"phase": Phase.SEED_BALL.value, "steps": n1})

            if not cfg.seed_ball_only:
                self._round_and_grow(traj, strategy, report)
            self.status = PipelineStatus.COMPLETED
            report.status = PipelineStatus.COMPLETED

        except PipelineError as exc:
            status = (
                PipelineStatus.BUDGET_EXHAUSTED
                if isinstance(exc, BudgetExhaustedError)
                else PipelineStatus.INVARIANT_VIOLATION
            )
            self.status = status
            report.status = status
            report.error = str(exc)
            self._log_operation("run_failed", {"status": status.value, "error": str(exc)})
            log.warning("run_failed", status=status.value, error=str(exc))
            self._finish(report, traj, started)
            exc.report = report
            if raise_on_failure:
                raise
            return report

        self._finish(report, traj, started)
        log.info(
            "run_complete",
            total=report.total,
            rho_in=report.final_rho_in,
            rho_out=report.final_rho_out,
            wall_time=report.wall_time,
        )
        return report

    def _round_and_grow(self, traj: Trajectory, strategy: Strategy, report: RunReport) -> None:
        cfg = self.config
        eps_int = report.eps_internal
        self._log_operation("phase_start", {"phase": Phase.ROUND_HULL.value, "eps": eps_int})
        _, n2 = phase2_round_hull(traj, strategy, eps_int, max_steps=cfg.phase2_max_steps)
        self._log_operation(
            "phase_complete",
            {"phase": Phase.ROUND_HULL.value, "steps": n2, "net": traj.net_certified},
        )

        r = traj.body.inner_radius()
        if not r > 0.0:
            raise InvariantViolationError(
                "inner_radius_positive", Phase.ROUND_HULL, len(traj.records) - 1, r, 0.0
            )
        params = LemmaParams.from_target(cfg.eps, r, report.n)
        report.budget_a, report.budget_b = params.budgets()

        self._log_operation("phase_start", {"phase": "grow_ball", "r": r, "q": params.q})
        _, n3a, n3b = phase3_grow_ball(traj, strategy, params, max_steps=cfg.phase3_max_steps)
        self._log_operation("phase_complete", {"phase": "grow_ball", "case_a": n3a, "case_b": n3b})

        self._check_final(traj)
        self._check_budgets(traj, report, n3a, n3b)

    def _check_final(self, traj: Trajectory) -> None:
        eps = self.config.eps
        rho_in, rho_out = traj.body.inner_radius(), traj.body.outer_radius()
        step = len(traj.records) - 1
        lower = 1.0 - eps - traj.tau_max - ABS_TOL
        upper = 1.0 + eps + traj.tau_max + ABS_TOL
        if rho_in < lower:
            raise InvariantViolationError("final_inner_radius", traj.latest.phase, step, rho_in, lower)
        if rho_out > upper:
            raise InvariantViolationError("final_outer_radius", traj.latest.phase, step, rho_out, upper)

    def _check_budgets(self, traj: Trajectory, report: RunReport, n3a: int, n3b: int) -> None:
        if report.budget_a is not None and n3a > 2 * report.budget_a:
            traj.warnings.append(f"case a took {n3a} steps, more than twice the budget {report.budget_a}")
        if report.budget_b is not None and n3b > 2 * report.budget_b:
            traj.warnings.append(f"case b took {n3b} steps, more than twice the budget {report.budget_b}")

    def _finish(self, report: RunReport, traj: Trajectory, started: float) -> None:
        counts = {phase: 0 for phase in Phase}
        for record in traj.records[1:]:
            counts[record.phase] += 1
        report.n1 = counts[Phase.SEED_BALL]
        report.n2 = counts[Phase.ROUND_HULL]
        report.n3a = counts[Phase.GROW_BALL_A]
        report.n3b = counts[Phase.GROW_BALL_B]

        report.final_rho_in = traj.body.inner_radius()
        report.final_rho_out = traj.body.outer_radius()
        report.final_hull_rho_in = traj.latest.hull_rho_in
        report.final_hull_rho_out = traj.latest.hull_rho_out
        report.tau_max = traj.tau_max
        report.tau_total = traj.tau_total
        report.mean_width_drift = traj.drift_total
        report.net_radius_certified = traj.net_radius
        report.steps = list(traj.records)
        report.warnings = list(traj.warnings)
        for warning in report.warnings:
            logger.warning("run_warning", detail=warning)
        report.wall_time = time.perf_counter() - started

    def _log_operation(self, operation: str, details: dict[str, Any]) -> None:
        self._operation_log.append(
            {
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "operation": operation,
                "details": details,
            }
        )

    def get_operation_log(self) -> list[dict[str, Any]]:
        """Get the operation log."""
        return self._operation_log.copy()


def run_theorem(
    K: Body,
    eps: float,
    strategy: StrategySpec | None = None,
    seed: int = 0,
    **overrides: Any,
) -> RunReport:
    """Run the three-phase procedure on K; pipeline errors propagate.

    Without an explicit strategy, planar star bodies use random grid angles on
    their own grid and support bodies use Haar-random directions.
    """
    if strategy is None:
        strategy = default_strategy(K.dim, seed, m=getattr(K, "m", 720))
    config = PipelineConfig(eps=eps, strategy=strategy, **overrides)
    return TheoremDriver(config).run(K, raise_on_failure=True)
