"""The three symmetrization phases and the per-step bookkeeping they share.

Every step is checked as it is taken: mean width conservation, inner and
outer radius monotonicity and, once established, net preservation, each
within the step's reported tolerance. The ball-growing phase additionally
checks the case a / case b growth inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import structlog

from minksym.geometry.base import Body
from minksym.geometry.core import Direction
from minksym.geometry.star2d import StarBody2D
from minksym.geometry.support import (
    IntervalBody,
    SupportBody,
    sandwich_radii,
    symmetral_support,
)
from minksym.pipeline.base import (
    BudgetExhaustedError,
    InvariantViolationError,
    Phase,
)
from minksym.pipeline.budgets import case_a_bound, case_b_bound
from minksym.pipeline.models import LemmaParams, StepRecord
from minksym.schedule.stopping import (
    InnerRadiusAtLeast,
    MaxSteps,
    SandwichWithin,
    StopRule,
    ensure_terminates,
)
from minksym.schedule.strategies import Strategy

logger = structlog.get_logger(__name__)

ABS_TOL = 1e-12
REALIZED_NET_TOL = 1e-9
NET_CLOUD_LIMIT = 4096  # per-step net checks on support clouds up to this size
INTERVAL_GOAL = 1.0 - 1.0 / math.e


def _require(ok: bool, inequality: str, phase: Phase, step: int, lhs: float, rhs: float) -> None:
    if not ok:
        logger.error(
            "invariant_violation", inequality=inequality, phase=phase.value, step=step, lhs=lhs, rhs=rhs
        )
        raise InvariantViolationError(inequality, phase, step, lhs, rhs)


@dataclass(frozen=True)
class StepOutcome:
    record: StepRecord
    pre_rho_in: float
    raw_rho_in: float
    tolerance: float


class Trajectory:
    """A body under repeated symmetrization, with its tracked hull and records.

    For star bodies the hull is tracked exactly through ``symmetral_support``
    with the same directions, so it follows the exact symmetrals rather than
    their raster realizations.
    """

    def __init__(self, body: Body, *, raster_size: int, renormalize: bool = True):
        self.body = body
        self.raster_size = raster_size
        self.renormalize = renormalize
        self.mean_width_target = body.mean_width()
        self.hull: SupportBody = body.support_body()
        self.interval: SupportBody | None = None

        self.net_eps: float | None = None
        self.net_radius: float | None = None
        self.net_certified: float | None = None

        self.tau_total = 0.0
        self.tau_max = 0.0
        self.drift_total = 0.0
        self.warnings: list[str] = []
        self.records: list[StepRecord] = []
        self.records.append(self._record(Phase.INITIAL, 0, None, 0.0, 0.0))

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def latest(self) -> StepRecord:
        return self.records[-1]

    def snapshot(self, phase_step: int = 0) -> StepRecord:
        """Latest metrics, re-based to a phase-local step count."""
        return self.latest.model_copy(
            update={"phase_step": phase_step, "interval_rho_in": self.interval_rho_in}
        )

    def track_interval(self, interval: IntervalBody) -> SupportBody:
        self.interval = interval.to_support(self.hull.cloud)
        return self.interval

    def covering_gap(self, eps: float) -> float:
        """Largest distance from a point of (1-ε)S to the nearest sampled one."""
        return 2.0 * (1.0 - eps) * math.sin(self.hull.cloud.spacing / 2.0)

    def certify_net(self, eps: float) -> float:
        """Net radius δ ≥ 2√ε with (1-ε)S ⊆ K + δD on the whole sphere."""
        d = self.body.net_distance(eps)
        return max(2.0 * math.sqrt(eps), d + self.covering_gap(eps))

    def establish_net(self, eps: float, certified: float) -> None:
        self.net_eps = eps
        self.net_certified = certified
        self.net_radius = max(2.0 * math.sqrt(eps), certified + self.covering_gap(eps))
        if self.net_radius > 2.0 * math.sqrt(eps):
            self.warnings.append(
                f"certified net radius {self.net_radius:.6g} exceeds 2√ε = "
                f"{2.0 * math.sqrt(eps):.6g}; growth bounds use the certified radius"
            )
        self.records[-1] = self.latest.model_copy(
            update={
                "net": certified <= 2.0 * math.sqrt(eps) + self.tau_total + ABS_TOL,
                "net_radius": certified,
            }
        )

    def step(self, u: Direction, phase: Phase, phase_step: int) -> StepOutcome:
        """Symmetrize once in direction ``u`` and check the per-step invariants."""
        index = len(self.records)
        pre = self.body
        pre_in, pre_out, pre_mw = pre.inner_radius(), pre.outer_radius(), pre.mean_width()

        result = pre.symmetral(u, self.raster_size)
        raw = result.body
        tau = result.tolerance
        raw_in, raw_out, raw_mw = raw.inner_radius(), raw.outer_radius(), raw.mean_width()
        slack = tau + ABS_TOL
        drift = raw_mw - pre_mw

        _require(abs(drift) <= slack, "mean_width_conserved", phase, index, abs(drift), slack)
        _require(raw_in >= pre_in - slack, "inner_radius_monotone", phase, index, raw_in, pre_in - slack)
        _require(raw_out <= pre_out + slack, "outer_radius_monotone", phase, index, raw_out, pre_out + slack)

        body = raw
        if self.renormalize and tau > 0 and raw_mw > 0:
            body = raw.scaled(self.mean_width_target / raw_mw)
        self.body = body

        if isinstance(body, SupportBody):
            self.hull = body
        else:
            self.hull = symmetral_support(self.hull, u)
        if self.interval is not None:
            self.interval = symmetral_support(self.interval, u)

        self.tau_total += tau
        self.tau_max = max(self.tau_max, tau)
        self.drift_total += drift

        record = self._record(phase, phase_step, u, tau, drift)
        if self.net_eps is not None and record.net is not None:
            _require(
                record.net,
                "net_preserved",
                phase,
                index,
                record.net_radius or 0.0,
                2.0 * math.sqrt(self.net_eps) + self.tau_total,
            )
        self.records.append(record)
        logger.debug(
            "symmetral_step",
            step=index,
            phase=phase.value,
            rho_in=record.rho_in,
            rho_out=record.rho_out,
            tau=tau,
            drift=drift,
        )
        return StepOutcome(record=record, pre_rho_in=pre_in, raw_rho_in=raw_in, tolerance=tau)

    @property
    def interval_rho_in(self) -> float | None:
        if self.interval is None:
            return None
        return sandwich_radii(self.interval)[0]

    def _net_affordable(self) -> bool:
        if isinstance(self.body, SupportBody):
            return self.body.cloud.size <= NET_CLOUD_LIMIT
        return True

    def _record(
        self,
        phase: Phase,
        phase_step: int,
        u: Direction | None,
        tau: float,
        drift: float,
    ) -> StepRecord:
        body = self.body
        hull_in, hull_out = sandwich_radii(self.hull)
        net: bool | None = None
        net_radius: float | None = None
        if self.net_eps is not None and self._net_affordable():
            net_radius = body.net_distance(self.net_eps)
            net = bool(net_radius <= 2.0 * math.sqrt(self.net_eps) + self.tau_total + ABS_TOL)
        angle: float | None = None
        direction: list[float] = []
        if u is not None:
            direction = [float(c) for c in u.coords]
            angle = u.angle if u.dim == 2 else None
        return StepRecord(
            step=len(self.records),
            phase=phase,
            phase_step=phase_step,
            angle=angle,
            direction=direction,
            rho_in=body.inner_radius(),
            rho_out=body.outer_radius(),
            mean_width=body.mean_width(),
            radial_distance=body.radial_distance(self.mean_width_target),
            hull_rho_in=hull_in,
            hull_rho_out=hull_out,
            interval_rho_in=self.interval_rho_in,
            net=net,
            net_radius=net_radius,
            tau=tau,
            drift=drift,
        )


def _run_until(
    traj: Trajectory,
    strategy: Strategy,
    goal: StopRule,
    phase: Phase,
    max_steps: int,
) -> int:
    rule = ensure_terminates(goal | MaxSteps(max_steps))
    steps = 0
    metrics = traj.snapshot(0)
    while not rule.should_stop(metrics):
        u = strategy.next_direction(traj.dim)
        steps += 1
        traj.step(u, phase, steps)
        metrics = traj.snapshot(steps)
    if not goal.should_stop(metrics):
        logger.warning("budget_exhausted", phase=phase.value, steps=steps)
        raise BudgetExhaustedError(phase, steps, traj.body)
    logger.info("phase_complete", phase=phase.value, steps=steps)
    return steps


def phase1_seed_ball(
    traj: Trajectory,
    strategy: Strategy,
    target: float,
    *,
    max_steps: int,
    via_interval: bool = False,
) -> tuple[Body, int]:
    """Symmetrize until the body contains ``target``·D.

    With ``via_interval`` the inscribed interval I₀ = [0, R u] of the longest
    ray is symmetrized in lockstep, the phase runs until ρ_in(I) reaches
    (1-1/e)·M*(I₀), and the containment chain ρ_in(K) ≥ ρ_in(I) is checked.
    """
    goal: StopRule = InnerRadiusAtLeast(target)
    if via_interval:
        R, u = traj.body.longest_ray()
        interval = traj.track_interval(IntervalBody(R, u))
        goal = InnerRadiusAtLeast(INTERVAL_GOAL * interval.mean_width(), source="interval")

    steps = _run_until(traj, strategy, goal, Phase.SEED_BALL, max_steps)

    if via_interval:
        interval_in = traj.interval_rho_in or 0.0
        body_in = traj.body.inner_radius()
        bound = interval_in - traj.tau_total - ABS_TOL
        _require(body_in >= bound, "interval_chain", Phase.SEED_BALL, len(traj.records) - 1, body_in, bound)
    return traj.body, steps


def _realized_net_oracle(traj: Trajectory, step: int) -> None:
    """The hull sandwich of the realized planar body must give its net containment."""
    body = traj.body
    if not isinstance(body, StarBody2D):
        return
    lo, hi = sandwich_radii(body.support_body())
    t = traj.mean_width_target
    eps_r = max(1.0 - lo / t, hi / t - 1.0)
    if not 0.0 < eps_r < 1.0:
        return
    d = body.scaled(1.0 / t).net_distance(eps_r)
    bound = 2.0 * math.sqrt(eps_r) + REALIZED_NET_TOL
    _require(d <= bound, "hull_sandwich_gives_net", Phase.ROUND_HULL, step, d, bound)


def phase2_round_hull(
    traj: Trajectory,
    strategy: Strategy,
    eps_internal: float,
    *,
    max_steps: int,
) -> tuple[Body, int]:
    """Symmetrize until conv K is sandwiched in (1 ± ε_int)·M*·D, then certify the net."""
    goal = SandwichWithin(eps_internal, target=traj.mean_width_target, source="hull")
    steps = _run_until(traj, strategy, goal, Phase.ROUND_HULL, max_steps)

    step = len(traj.records) - 1
    _realized_net_oracle(traj, step)

    certified = traj.body.net_distance(eps_internal)
    bound = 2.0 * math.sqrt(eps_internal) + traj.tau_total + ABS_TOL
    _require(certified <= bound, "net_contained", Phase.ROUND_HULL, step, certified, bound)
    traj.establish_net(eps_internal, certified)
    logger.info("net_certified", eps=eps_internal, distance=certified, radius=traj.net_radius)
    return traj.body, steps


def phase3_grow_ball(
    traj: Trajectory,
    strategy: Strategy,
    params: LemmaParams,
    *,
    max_steps: int,
) -> tuple[Body, int, int]:
    """Grow the inner ball to 1 - 4√ε_int; returns (body, case a steps, case b steps).

    Expects a body normalized to M* = 1 with an established net. Before each
    step the net radius δ is recertified on the current body; case a applies
    while ρ_in < δ.
    """
    eps = params.eps_internal
    target = params.target_radius
    steps_a = steps_b = 0

    while traj.body.inner_radius() < target:
        delta = traj.certify_net(eps)
        rho = traj.body.inner_radius()
        if steps_a + steps_b >= max_steps:
            phase = Phase.GROW_BALL_A if rho < delta else Phase.GROW_BALL_B
            logger.warning("budget_exhausted", phase=phase.value, steps=steps_a + steps_b)
            raise BudgetExhaustedError(phase, steps_a + steps_b, traj.body)

        u = strategy.next_direction(traj.dim)
        if rho < delta:
            steps_a += 1
            outcome = traj.step(u, Phase.GROW_BALL_A, steps_a)
            bound = case_a_bound(rho, eps, delta) - outcome.tolerance - ABS_TOL
            name = "case_a_growth"
        else:
            steps_b += 1
            outcome = traj.step(u, Phase.GROW_BALL_B, steps_b)
            bound = case_b_bound(rho, eps, delta) - outcome.tolerance - ABS_TOL
            name = "case_b_halving"
        _require(outcome.raw_rho_in >= bound, name, outcome.record.phase, outcome.record.step, outcome.raw_rho_in, bound)

    logger.info("phase_complete", phase="grow_ball", case_a=steps_a, case_b=steps_b)
    return traj.body, steps_a, steps_b
