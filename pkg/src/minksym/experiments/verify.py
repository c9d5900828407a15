"""Property batteries behind ``minksym verify``.

Each suite runs a seeded battery and reports pass/fail per property, with
the seed and inputs of every counterexample.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from fractions import Fraction
from typing import Any, Literal

import numpy as np
import structlog
from pydantic import BaseModel, Field

from minksym.geometry.generators import gen_random_star, gen_spiky
from minksym.geometry.star2d import (
    GridAngle,
    StarBody2D,
    minkowski_sum,
    sum_half_extent,
    support_values,
)
from minksym.geometry.support import support_body_from_star, symmetral_support
from minksym.oracle import naive_minkowski_occupancy, naive_minkowski_sum
from minksym.pipeline.base import BudgetExhaustedError, InvariantViolationError
from minksym.pipeline.budgets import EPS0, budget_case_a, budget_case_b, q_factor
from minksym.pipeline.models import LemmaParams
from minksym.pipeline.phases import Trajectory, phase3_grow_ball
from minksym.schedule.strategies import default_strategy

logger = structlog.get_logger(__name__)

Suite = Literal["lemma2", "lemma4", "conservation", "oracle"]
SUITES: tuple[Suite, ...] = ("lemma2", "lemma4", "conservation", "oracle")

GrowthCase = Literal["a", "b"]
# 1 - 4√ε sits exactly at 2√ε for ε = 1/36, so case b starts need ε ≤ 1/64
GROWTH_CASES: tuple[tuple[float, GrowthCase], ...] = (
    (1 / 36, "a"),
    (1 / 64, "a"),
    (1 / 100, "a"),
    (1 / 64, "b"),
    (1 / 100, "b"),
)
CASE_A_BASE = 0.1
GROWTH_MAX_STEPS = 60

EXACT_DRIFT_TOL = 1e-12
NET_TOL = 1e-9


class Counterexample(BaseModel):
    seed: int
    inputs: dict[str, Any] = Field(default_factory=dict)
    detail: str


class PropertyResult(BaseModel):
    name: str
    cases: int = 0
    skipped: int = 0
    failures: list[Counterexample] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, seed: int, detail: str, **inputs: Any) -> None:
        self.cases += 1
        if not ok:
            self.failures.append(Counterexample(seed=seed, inputs=inputs, detail=detail))


class SuiteReport(BaseModel):
    suite: Suite
    properties: list[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def summary(self) -> dict[str, Any]:
        """Machine-readable pass/fail per property."""
        return {
            "suite": self.suite,
            "passed": self.passed,
            "properties": [
                {
                    "name": p.name,
                    "passed": p.passed,
                    "cases": p.cases,
                    "skipped": p.skipped,
                    "failures": [f.model_dump() for f in p.failures],
                }
                for p in self.properties
            ],
        }


class VerifyOptions(BaseModel):
    """Battery sizes; defaults are the acceptance sizes."""

    cases: int | None = Field(default=None, ge=1)
    seed: int = 0
    grid_m: int = Field(default=720, ge=8)
    raster_size: int = Field(default=1024, ge=32)
    oracle_size: int = Field(default=128, ge=32, le=160)


def _radial_sup(A: StarBody2D, B: StarBody2D) -> float:
    return float(np.max(np.abs(A.r - B.r)))


def sandwiched_spiky(
    eps: float, m: int, rng: np.random.Generator, *, base: float | None = None
) -> StarBody2D:
    """Random spikes with lengths in [1 - ε/2, 1 + ε] dense enough that conv K ⊇ (1-ε)D.

    Consecutive spikes are at most g apart with (1-ε/2)·cos(g/2) ≥ 1-ε. The
    radius between spikes is ``base``, drawn from [0, 1/2) when not given.
    """
    gap = 2.0 * math.acos((1.0 - eps) / (1.0 - eps / 2.0))
    max_steps = max(1, int(gap * m / (2.0 * np.pi)))
    if base is None:
        base = rng.uniform(0.0, 0.5)
    r = np.full(m, base)
    start = int(rng.integers(m))
    i = start
    while i < start + m:
        r[i % m] = rng.uniform(1.0 - eps / 2.0, 1.0 + eps)
        i += int(rng.integers(1, max_steps + 1))
    return StarBody2D(r)


def grow_ball_start(eps: float, case: GrowthCase, m: int, rng: np.random.Generator) -> StarBody2D:
    """A netted body with M* = 1 whose inner radius starts in case a or case b.

    Case a starts at ρ_in ≈ 0.1 < 2√ε, case b halfway between 2√ε and 1 - 4√ε.
    """
    root = math.sqrt(eps)
    base = CASE_A_BASE if case == "a" else (1.0 - 2.0 * root) / 2.0
    K = sandwiched_spiky(eps, m, rng, base=base)
    return K.scaled(1.0 / K.mean_width())


def grow_ball_run(K: StarBody2D, eps: float, seed: int, opts: VerifyOptions) -> tuple[int, int]:
    """Ball-growing phase on ``K`` at accuracy ``eps``; returns the case a and case b counts."""
    traj = Trajectory(K, raster_size=opts.raster_size)
    traj.establish_net(eps, K.net_distance(eps))
    params = LemmaParams(eps=eps, eps_internal=eps, r=K.inner_radius(), n=2)
    strategy = default_strategy(2, seed, m=opts.grid_m).build()
    _, steps_a, steps_b = phase3_grow_ball(traj, strategy, params, max_steps=GROWTH_MAX_STEPS)
    return steps_a, steps_b


def suite_lemma2(opts: VerifyOptions) -> SuiteReport:
    """Hull sandwich (1±ε) implies (1-ε)S ⊆ K + 2√ε D."""
    count = opts.cases or 50
    sandwich = PropertyResult(name="hull_sandwich_constructed")
    net = PropertyResult(name="net_contained")
    for k in range(count):
        seed = opts.seed + k
        eps = 0.04 if k % 2 == 0 else 0.01
        K = sandwiched_spiky(eps, opts.grid_m, np.random.default_rng(seed))
        h = support_values(K)
        sandwich.check(
            bool(h.min() >= 1.0 - eps and h.max() <= 1.0 + eps),
            seed,
            f"hull radii [{h.min():.6g}, {h.max():.6g}]",
            eps=eps,
        )
        d = K.net_distance(eps)
        net.check(
            K.net_contained(eps, slack=NET_TOL),
            seed,
            f"net distance {d:.12g} > 2√ε = {2 * math.sqrt(eps):.12g}",
            eps=eps,
            rho_in=K.inner_radius(),
        )
    return SuiteReport(suite="lemma2", properties=[sandwich, net])


def suite_lemma4(opts: VerifyOptions) -> SuiteReport:
    """Case a and case b inequalities hold at every step of direct ball-growing runs.

    Runs cycle through ``GROWTH_CASES``; each starts from a netted body placed
    in the named case, so both loops execute. A battery where either case never
    took a step fails its ``*_exercised`` property.
    """
    count = opts.cases or 20
    q_exact = PropertyResult(name="q_eps0_is_six_fifths")
    q_exact.check(q_factor(EPS0) == Fraction(6, 5), opts.seed, f"q(1/25) = {q_factor(EPS0)!r}")

    steps = PropertyResult(name="growth_inequalities")
    within_a = PropertyResult(name="case_a_within_budget")
    within_b = PropertyResult(name="case_b_within_budget")
    total_a = total_b = 0
    for k in range(count):
        seed = opts.seed + k
        eps, case = GROWTH_CASES[k % len(GROWTH_CASES)]
        K = grow_ball_start(eps, case, opts.grid_m, np.random.default_rng(seed))
        r = K.inner_radius()
        inputs = {"eps": eps, "start": case, "rho_in": r}
        if K.net_distance(eps) > 2.0 * math.sqrt(eps) + NET_TOL:
            steps.skipped += 1
            logger.warning("verify_start_not_netted", seed=seed, **inputs)
            continue
        try:
            steps_a, steps_b = grow_ball_run(K, eps, seed, opts)
        except InvariantViolationError as exc:
            steps.check(False, seed, str(exc), **inputs)
            continue
        except BudgetExhaustedError as exc:
            steps.skipped += 1
            logger.warning("verify_run_exhausted", seed=seed, error=str(exc), **inputs)
            continue
        steps.check(True, seed, "", **inputs)
        total_a += steps_a
        total_b += steps_b
        n_a, n_b = budget_case_a(eps, r), budget_case_b(eps)
        within_a.check(steps_a <= n_a, seed, f"{steps_a} case a steps > N_a = {n_a}", **inputs)
        within_b.check(steps_b <= n_b + 1, seed, f"{steps_b} case b steps > N_b + 1 = {n_b + 1}", **inputs)

    exercised_a = PropertyResult(name="case_a_exercised")
    exercised_a.check(total_a > 0, opts.seed, "no case a step was executed", runs=steps.cases)
    exercised_b = PropertyResult(name="case_b_exercised")
    exercised_b.check(total_b > 0, opts.seed, "no case b step was executed", runs=steps.cases)
    return SuiteReport(
        suite="lemma4",
        properties=[q_exact, steps, within_a, within_b, exercised_a, exercised_b],
    )


def suite_conservation(opts: VerifyOptions) -> SuiteReport:
    """Mean width, monotone radii and hull commutation over random single steps."""
    count = opts.cases or 200
    m, G = opts.grid_m, opts.raster_size
    drift = PropertyResult(name="mean_width_conserved")
    inner = PropertyResult(name="inner_radius_monotone")
    outer = PropertyResult(name="outer_radius_monotone")
    exact = PropertyResult(name="exact_support_drift")
    commute = PropertyResult(name="hull_commutes")

    for k in range(count):
        seed = opts.seed + k
        rng = np.random.default_rng(seed)
        K = gen_random_star(seed, m) if k % 2 == 0 else gen_spiky(8, 1.0, 0.3, m, seed=seed)
        a = GridAngle(int(rng.integers(m)), m)
        result = K.symmetral(a.direction, G)
        S, tau = result.body, result.tolerance
        inputs = {"angle_index": a.k, "m": m, "G": G}

        dm = abs(S.mean_width() - K.mean_width())
        drift.check(dm <= tau, seed, f"|ΔM*| = {dm:.6g} > τ = {tau:.6g}", **inputs)
        inner.check(S.inner_radius() >= K.inner_radius() - tau, seed, "ρ_in decreased", **inputs)
        outer.check(S.outer_radius() <= K.outer_radius() + tau, seed, "ρ_out increased", **inputs)

        H = support_body_from_star(K)
        H2 = symmetral_support(H, a.direction)
        de = abs(H2.mean_width() - H.mean_width())
        exact.check(de <= EXACT_DRIFT_TOL, seed, f"exact drift {de:.3g}", **inputs)

        if k < max(1, count // 4):
            gap = float(np.max(np.abs(support_values(S) - H2.h)))
            commute.check(gap <= tau, seed, f"hull gap {gap:.6g} > τ = {tau:.6g}", **inputs)
    return SuiteReport(suite="conservation", properties=[drift, inner, outer, exact, commute])


def suite_oracle(opts: VerifyOptions) -> SuiteReport:
    """FFT sums against the brute-force raster sum."""
    count = opts.cases or 50
    Gc = opts.oracle_size
    agree = PropertyResult(name="fft_matches_naive")
    symmetric = PropertyResult(name="naive_sum_symmetric")
    for k in range(count):
        seed = opts.seed + k
        A = gen_random_star(2 * seed, opts.grid_m)
        B = gen_random_star(2 * seed + 1, opts.grid_m)
        fast = minkowski_sum(A, B, opts.raster_size)
        slow = naive_minkowski_sum(A, B, Gc)
        coarse = 2.0 * sum_half_extent(A, B, Gc) / Gc
        d = _radial_sup(fast, slow)
        agree.check(d <= 4.0 * coarse, seed, f"radial sup {d:.6g} > 4 cells = {4 * coarse:.6g}", G=opts.raster_size, oracle_G=Gc)
        if k < 5:
            ab, _ = naive_minkowski_occupancy(A, B, Gc)
            ba, _ = naive_minkowski_occupancy(B, A, Gc)
            symmetric.check(bool(np.array_equal(ab, ba)), seed, "cell sets differ", oracle_G=Gc)
    return SuiteReport(suite="oracle", properties=[agree, symmetric])


_RUNNERS: dict[Suite, Callable[[VerifyOptions], SuiteReport]] = {
    "lemma2": suite_lemma2,
    "lemma4": suite_lemma4,
    "conservation": suite_conservation,
    "oracle": suite_oracle,
}


def run_suite(suite: Suite, opts: VerifyOptions | None = None) -> SuiteReport:
    opts = opts or VerifyOptions()
    logger.info("verify_start", suite=suite, cases=opts.cases)
    report = _RUNNERS[suite](opts)
    for prop in report.properties:
        log = logger.info if prop.passed else logger.error
        log("verify_property", suite=suite, name=prop.name, cases=prop.cases, failures=len(prop.failures))
    return report
