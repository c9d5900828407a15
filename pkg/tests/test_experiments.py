import math
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from minksym.config import Settings
from minksym.experiments import SweepSpec, SweepTask, VerifyOptions, run_suite, run_sweep
from minksym.experiments.sweep import build_body, run_task
from minksym.experiments.verify import GROWTH_CASES, grow_ball_start, sandwiched_spiky
from minksym.geometry import SupportBody
from minksym.geometry.star2d import support_values
from minksym.pipeline import q_factor

SMALL = {"grid_m": 72, "raster_size": 256, "oracle_size": 48}


class TestSweepSpec:
    def test_empty_grid(self):
        with pytest.raises(ValidationError):
            SweepSpec(eps=[])

    def test_star_sweeps_are_planar(self):
        with pytest.raises(ValidationError):
            SweepSpec(dims=[3])

    def test_unknown_shape(self):
        with pytest.raises(ValidationError):
            SweepSpec(shapes=["cross", "blob"])

    def test_tasks(self):
        spec = SweepSpec(shapes=["cross", "random"], eps=[0.2, 0.1], seeds=[0, 1, 2], grid_m=72)
        tasks = spec.tasks(Settings())
        assert len(tasks) == 12
        assert {t.grid_m for t in tasks} == {72}
        assert {t.cloud_size for t in tasks} == {72}

    def test_interval_tasks_use_dimension_clouds(self):
        spec = SweepSpec(mode="interval", dims=[3, 4], eps=[0.2], seeds=[0])
        sizes = {t.n: t.cloud_size for t in spec.tasks(Settings())}
        assert sizes == {3: 2048, 4: 4 * 4096}


def _task(**overrides) -> SweepTask:
    values = {
        "mode": "interval",
        "shape": "interval",
        "n": 3,
        "eps": 0.2,
        "seed": 0,
        "grid_m": 72,
        "raster_size": 256,
        "cloud_size": 256,
        "c2": 0.2,
        "phase1_max_steps": 400,
        "phase2_max_steps": 600,
        "phase3_max_steps": 200,
    }
    values.update(overrides)
    return SweepTask(**values)


class TestSweep:
    def test_interval_body(self):
        body = build_body(_task())
        assert isinstance(body, SupportBody)
        assert body.cloud.size == 256

    def test_interval_task(self):
        row = run_task(_task())
        assert row["status"].value == "completed"
        assert row["n1"] > 0
        assert row["n2"] == 0

    def test_failing_task_becomes_row(self):
        row = run_task(_task(phase1_max_steps=0))
        assert row["status"].value == "budget_exhausted"
        assert row["error"]

    def test_interval_sweep(self):
        spec = SweepSpec(mode="interval", dims=[3, 4], eps=[0.2], seeds=[1, 0], cloud_size=256)
        result = run_sweep(spec, Settings())
        assert [(r["seed"], r["n"]) for r in result.rows] == [(0, 3), (0, 4), (1, 3), (1, 4)]
        assert result.failures == 0
        assert result.fitted.runs == 4
        assert result.fitted.c1 is not None


def _medians(rows, key, by):
    groups = {}
    for row in rows:
        groups.setdefault(row[by], []).append(row[key])
    return {k: float(np.median(v)) for k, v in sorted(groups.items())}


@pytest.mark.slow
class TestScaling:
    def test_total_steps_grow_with_log_eps(self):
        spec = SweepSpec(
            shapes=["cross", "spiky"],
            eps=[0.2, 0.1, 0.05, 0.025],
            seeds=list(range(8)),
            grid_m=180,
            raster_size=512,
        )
        result = run_sweep(spec, Settings())
        assert result.failures == 0
        for shape in spec.shapes:
            rows = [r for r in result.rows if r["shape"] == shape]
            medians = _medians(rows, "total", "eps")
            # largest ε first: ascending |log ε|
            totals = [medians[eps] for eps in sorted(medians, reverse=True)]
            increments = np.diff(totals)
            assert np.all(increments >= 0), (shape, totals)
            assert np.all(increments <= 8), (shape, totals)

    def test_seed_ball_steps_linear_in_dimension(self):
        spec = SweepSpec(mode="interval", dims=list(range(2, 9)), eps=[0.2], seeds=list(range(8)))
        result = run_sweep(spec, Settings())
        assert result.failures == 0
        medians = _medians(result.rows, "n1", "n")
        per_dim = {n: medians[n] / n for n in medians}
        assert per_dim[2] > 0
        assert max(per_dim.values()) <= 2 * per_dim[2], per_dim


class TestVerify:
    def test_sandwiched_spiky(self):
        for seed in range(5):
            K = sandwiched_spiky(0.04, 72, np.random.default_rng(seed))
            h = support_values(K)
            assert h.min() >= 0.96
            assert h.max() <= 1.04

    def test_lemma2(self):
        report = run_suite("lemma2", VerifyOptions(cases=6, **SMALL))
        assert report.passed
        assert [p.cases for p in report.properties] == [6, 6]

    def test_conservation(self):
        report = run_suite("conservation", VerifyOptions(cases=4, **SMALL))
        assert report.passed, report.summary()
        assert {p.name for p in report.properties} >= {"mean_width_conserved", "hull_commutes"}

    def test_oracle(self):
        report = run_suite("oracle", VerifyOptions(cases=2, **SMALL))
        assert report.passed, report.summary()

    @pytest.mark.parametrize(("eps", "case"), GROWTH_CASES)
    def test_grow_ball_start(self, eps, case):
        K = grow_ball_start(eps, case, 720, np.random.default_rng(3))
        root = math.sqrt(eps)
        assert K.mean_width() == pytest.approx(1.0)
        assert K.net_distance(eps) <= 2 * root
        if case == "a":
            assert K.inner_radius() == pytest.approx(0.1, rel=0.05)
        else:
            assert 2 * root < K.inner_radius() < 1 - 4 * root

    @pytest.mark.slow
    def test_lemma4(self):
        opts = VerifyOptions(cases=len(GROWTH_CASES), grid_m=720, raster_size=1024)
        report = run_suite("lemma4", opts)
        assert report.passed, report.summary()
        by_name = {p.name: p for p in report.properties}
        assert by_name["growth_inequalities"].cases == len(GROWTH_CASES)
        assert by_name["case_a_exercised"].passed
        assert by_name["case_b_exercised"].passed
        assert q_factor(Fraction(1, 25)) == Fraction(6, 5)

    def test_summary_shape(self):
        summary = run_suite("lemma2", VerifyOptions(cases=2, **SMALL)).summary()
        assert summary["suite"] == "lemma2"
        assert summary["passed"] is True
        assert summary["properties"][0]["failures"] == []
