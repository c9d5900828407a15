import math

import numpy as np
import pytest
from pydantic import ValidationError

from minksym.config import Settings
from minksym.experiments.verify import grow_ball_start
from minksym.geometry import (
    Direction,
    EmptyBodyError,
    IntervalBody,
    StarBody2D,
    gen_cross,
    gen_disc,
    gen_segment,
    sphere_quadrature,
)
from minksym.pipeline import (
    BudgetExhaustedError,
    InvariantViolationError,
    LemmaParams,
    Phase,
    PipelineConfig,
    PipelineStatus,
    TheoremDriver,
    Trajectory,
    budget_bounds,
    phase3_grow_ball,
    run_theorem,
)
from minksym.pipeline import phases
from minksym.pipeline.phases import INTERVAL_GOAL
from minksym.schedule import StrategyKind, StrategySpec, default_strategy


def _config(eps: float = 0.3, m: int = 72, **overrides) -> PipelineConfig:
    return PipelineConfig(eps=eps, strategy=default_strategy(2, 0, m=m), raster_size=256, **overrides)


class TestConfig:
    def test_large_eps_needs_flag(self):
        with pytest.raises(ValidationError):
            _config(eps=0.6)
        assert _config(eps=0.6, allow_large_eps=True).eps == 0.6

    def test_from_settings(self, monkeypatch):
        monkeypatch.setenv("MINKSYM_C2", "0.3")
        cfg = PipelineConfig.from_settings(0.2, default_strategy(2, 0), Settings(), phase2_max_steps=17)
        assert cfg.phase2_max_steps == 17
        assert cfg.c2 == 0.3
        assert cfg.phase1_max_steps == 400


class TestTrajectory:
    def test_initial_record(self, smooth_star):
        traj = Trajectory(smooth_star, raster_size=256)
        rec = traj.latest
        assert rec.step == 0
        assert rec.phase == Phase.INITIAL
        assert rec.mean_width == pytest.approx(smooth_star.mean_width())
        assert rec.net is None

    def test_step_keeps_hull_exact(self, smooth_star):
        traj = Trajectory(smooth_star.scaled(1.0 / smooth_star.mean_width()), raster_size=256)
        strategy = default_strategy(2, 3, m=72).build()
        for i in range(5):
            traj.step(strategy.next_direction(2), Phase.ROUND_HULL, i + 1)
        assert len(traj.records) == 6
        assert traj.hull.exact
        assert traj.hull.mean_width() == pytest.approx(1.0, abs=1e-12)
        assert abs(traj.body.mean_width() - 1.0) <= 1e-12  # renormalized
        assert traj.tau_max > 0.0
        assert traj.tau_total >= traj.tau_max

    def test_without_renormalization(self, smooth_star):
        traj = Trajectory(smooth_star, raster_size=256, renormalize=False)
        outcome = traj.step(Direction.from_angle(0.0), Phase.SEED_BALL, 1)
        assert outcome.record.drift == pytest.approx(traj.body.mean_width() - smooth_star.mean_width())
        assert abs(outcome.record.drift) <= outcome.tolerance

    def test_certify_net_floor(self):
        traj = Trajectory(gen_disc(1.0, 72), raster_size=256)
        assert traj.certify_net(0.01) == pytest.approx(0.2)


class TestDriver:
    def test_disc_needs_no_steps(self):
        driver = TheoremDriver(_config())
        report = driver.run(gen_disc(0.5, 72))
        assert report.success
        assert report.total == 0
        assert report.M0 == pytest.approx(0.5)
        assert report.final_rho_in == pytest.approx(1.0)
        assert driver.status == PipelineStatus.COMPLETED
        ops = [entry["operation"] for entry in driver.get_operation_log()]
        assert ops.count("phase_start") == 3
        assert ops.count("phase_complete") == 3

    def test_operation_log_is_a_copy(self):
        driver = TheoremDriver(_config())
        driver.run(gen_disc(1.0, 72))
        driver.get_operation_log().clear()
        assert driver.get_operation_log()

    def test_full_run(self, smooth_star):
        report = TheoremDriver(_config(eps=0.3)).run(smooth_star)
        assert report.success, report.error
        assert report.total == len(report.steps) - 1
        assert report.n2 + report.n3a + report.n3b >= 1
        assert report.eps_internal == pytest.approx(0.005625)
        assert report.final_rho_in >= 1.0 - 0.3 - report.tau_max
        assert report.final_rho_out <= 1.0 + 0.3 + report.tau_max
        assert report.budget_a is not None and report.budget_b is not None
        assert report.net_radius_certified is not None
        assert report.scaling_form == pytest.approx(2 * abs(math.log(0.3)))

        phases = [rec.phase for rec in report.steps[1:]]
        order = [Phase.SEED_BALL, Phase.ROUND_HULL, Phase.GROW_BALL_A, Phase.GROW_BALL_B]
        # phases never go back, except case a / case b which may interleave
        ranks = [min(order.index(p), 2) for p in phases]
        assert ranks == sorted(ranks)

    def test_full_run_is_deterministic(self, smooth_star):
        a = TheoremDriver(_config(eps=0.3)).run(smooth_star)
        b = TheoremDriver(_config(eps=0.3)).run(smooth_star)
        assert [r.rho_in for r in a.steps] == [r.rho_in for r in b.steps]
        assert a.total == b.total

    def test_budget_exhaustion(self, smooth_star):
        driver = TheoremDriver(_config(eps=0.3, phase2_max_steps=1))
        report = driver.run(smooth_star)
        assert report.status == PipelineStatus.BUDGET_EXHAUSTED
        assert driver.status == PipelineStatus.BUDGET_EXHAUSTED
        assert report.n2 == 1
        assert "round_hull" in report.error

    def test_budget_exhaustion_raises_with_report(self, smooth_star):
        with pytest.raises(BudgetExhaustedError) as excinfo:
            TheoremDriver(_config(eps=0.3, phase2_max_steps=1)).run(smooth_star, raise_on_failure=True)
        assert excinfo.value.report is not None
        assert excinfo.value.report.n2 == 1
        assert excinfo.value.phase == Phase.ROUND_HULL

    def test_empty_body(self):
        with pytest.raises(EmptyBodyError):
            run_theorem(StarBody2D.zero(72), 0.2)

    def test_seed_ball_via_interval(self):
        cfg = _config(via_interval=True, seed_ball_only=True)
        report = TheoremDriver(cfg).run(gen_segment(1.0, 0, 72))
        assert report.success
        assert report.interval is not None
        assert report.interval.steps == report.n1 > 0
        assert report.interval.final_rho_in >= INTERVAL_GOAL * report.interval.mean_width
        assert report.n2 == report.n3a == report.n3b == 0

    def test_seed_ball_on_support_body(self):
        cloud = sphere_quadrature(3, 1024, seed=1)
        body = IntervalBody(1.0, Direction.basis(3)).to_support(cloud)
        cfg = PipelineConfig(
            eps=0.2,
            strategy=StrategySpec(kind=StrategyKind.UNIFORM_RANDOM, seed=2),
            seed_ball_only=True,
        )
        report = TheoremDriver(cfg).run(body)
        assert report.success
        assert report.n1 > 0
        assert report.steps[-1].rho_in >= cfg.c2 / math.sqrt(3)
        assert np.isclose(report.M0, 0.25, atol=0.01)


def _grow(K: StarBody2D, eps: float, seed: int = 0) -> tuple[StarBody2D, int, int]:
    traj = Trajectory(K, raster_size=1024)
    traj.establish_net(eps, K.net_distance(eps))
    params = LemmaParams(eps=eps, eps_internal=eps, r=K.inner_radius(), n=2)
    strategy = default_strategy(2, seed, m=K.m).build()
    return phase3_grow_ball(traj, strategy, params, max_steps=60)


class TestGrowBall:
    def test_ball_past_case_a(self):
        eps = 0.01
        body, steps_a, steps_b = _grow(gen_disc(1.0 - eps, 720), eps)
        assert (steps_a, steps_b) == (0, 0)
        assert body.inner_radius() == pytest.approx(1.0 - eps)

    @pytest.mark.parametrize("seed", range(3))
    def test_case_a_from_a_tenth(self, seed):
        eps = 0.01
        K = grow_ball_start(eps, "a", 720, np.random.default_rng(seed))
        assert K.inner_radius() < 2 * math.sqrt(eps)
        body, steps_a, _ = _grow(K, eps, seed)
        assert 1 <= steps_a <= 4
        assert steps_a <= budget_bounds(eps, K.inner_radius())[0]
        assert body.inner_radius() >= 1 - 4 * math.sqrt(eps)

    @pytest.mark.parametrize("eps", [1 / 36, 1 / 64, 1 / 100])
    def test_case_b_count(self, eps):
        K = grow_ball_start(eps, "a", 720, np.random.default_rng(11))
        body, _, steps_b = _grow(K, eps, 11)
        assert steps_b <= math.ceil(abs(math.log2(math.sqrt(eps)))) + 1
        assert body.inner_radius() >= 1 - 4 * math.sqrt(eps)

    @pytest.mark.parametrize("eps", [1 / 64, 1 / 100])
    def test_case_b_start(self, eps):
        K = grow_ball_start(eps, "b", 720, np.random.default_rng(5))
        _, steps_a, steps_b = _grow(K, eps, 5)
        assert steps_a == 0
        assert steps_b >= 1

    def test_case_b_bound_checked_every_step(self, monkeypatch):
        monkeypatch.setattr(phases, "case_b_bound", lambda rho, eps, delta: 2.0)
        K = grow_ball_start(1 / 64, "b", 720, np.random.default_rng(5))
        with pytest.raises(InvariantViolationError) as excinfo:
            _grow(K, 1 / 64, 5)
        assert excinfo.value.phase == Phase.GROW_BALL_B
        assert excinfo.value.inequality == "case_b_halving"

    def test_cross_end_to_end(self):
        report = run_theorem(gen_cross(1.0, 0.1, 720), 0.1)
        assert report.success
        assert report.final_rho_in >= 0.9 - report.tau_max
        assert report.final_rho_out <= 1.1 + report.tau_max
