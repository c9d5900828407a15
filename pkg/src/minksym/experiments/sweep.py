"""Sweeps over ε × n × seeds, fanned out to a process pool."""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Literal

import structlog
from pydantic import BaseModel, Field, model_validator

from minksym.config import Settings, get_settings
from minksym.geometry.base import Body, GeometryError
from minksym.geometry.core import Direction, sphere_quadrature
from minksym.geometry.generators import gen_cross, gen_random_star, gen_spiky
from minksym.geometry.star2d import StarBody2D
from minksym.geometry.support import IntervalBody
from minksym.log import configure_logging
from minksym.pipeline.constants import fit_constants
from minksym.pipeline.driver import TheoremDriver
from minksym.pipeline.models import FittedConstants, PipelineConfig
from minksym.reporting import sweep_row
from minksym.schedule.strategies import default_strategy

logger = structlog.get_logger(__name__)

SweepMode = Literal["star", "interval"]

STAR_SHAPES: dict[str, Callable[[int, int], StarBody2D]] = {
    "cross": lambda m, seed: gen_cross(1.0, 0.2, m),
    "spiky": lambda m, seed: gen_spiky(12, 1.0, 0.2, m, seed=seed),
    "random": lambda m, seed: gen_random_star(seed, m),
}


class SweepTask(BaseModel):
    """One run of a sweep; self-contained so it can cross a process boundary."""

    mode: SweepMode
    shape: str
    n: int = Field(ge=2)
    eps: float = Field(gt=0.0, lt=1.0)
    seed: int
    grid_m: int = Field(ge=8)
    raster_size: int = Field(ge=32)
    cloud_size: int = Field(ge=4)
    c2: float
    phase1_max_steps: int
    phase2_max_steps: int
    phase3_max_steps: int
    renormalize_mean_width: bool = True


class SweepSpec(BaseModel):
    """Grid of runs."""

    mode: SweepMode = "star"
    shapes: list[str] = Field(default_factory=lambda: ["cross", "spiky"])
    eps: list[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05])
    dims: list[int] = Field(default_factory=lambda: [2])
    seeds: list[int] = Field(default_factory=lambda: list(range(20)))
    grid_m: int | None = Field(default=None, ge=8)
    raster_size: int | None = Field(default=None, ge=32)
    cloud_size: int | None = Field(default=None, ge=4)
    c2: float | None = Field(default=None, gt=0.0, lt=1.0)
    jobs: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_grid(self) -> SweepSpec:
        if not (self.eps and self.dims and self.seeds):
            raise ValueError("Sweep grid is empty")
        if self.mode == "star":
            if self.dims != [2]:
                raise ValueError("Star sweeps are planar; use --mode interval for n > 2")
            unknown = sorted(set(self.shapes) - set(STAR_SHAPES))
            if unknown:
                raise ValueError(f"Unknown sweep shapes: {', '.join(unknown)}")
        return self

    def tasks(self, settings: Settings | None = None) -> list[SweepTask]:
        settings = settings or get_settings()
        exp = settings.experiment
        shapes = self.shapes if self.mode == "star" else ["interval"]
        grid_m = self.grid_m or settings.geometry.grid_m
        out = []
        for shape in shapes:
            for n in self.dims:
                for eps in self.eps:
                    for seed in self.seeds:
                        out.append(
                            SweepTask(
                                mode=self.mode,
                                shape=shape,
                                n=n,
                                eps=eps,
                                seed=seed,
                                grid_m=grid_m,
                                raster_size=self.raster_size or settings.geometry.raster_size,
                                cloud_size=self.cloud_size or (grid_m if n == 2 else settings.cloud_size(n)),
                                c2=self.c2 or exp.c2,
                                phase1_max_steps=exp.phase1_max_steps,
                                phase2_max_steps=exp.phase2_max_steps,
                                phase3_max_steps=exp.phase3_max_steps,
                                renormalize_mean_width=exp.renormalize_mean_width,
                            )
                        )
        return out


class SweepResult(BaseModel):
    rows: list[dict[str, Any]]
    fitted: FittedConstants

    @property
    def failures(self) -> int:
        return sum(1 for row in self.rows if row.get("error"))


def build_body(task: SweepTask) -> Body:
    if task.mode == "star":
        return STAR_SHAPES[task.shape](task.grid_m, task.seed)
    cloud = sphere_quadrature(task.n, task.cloud_size, seed=task.seed)
    return IntervalBody(1.0, Direction.basis(task.n, 0)).to_support(cloud)


def run_task(task: SweepTask) -> dict[str, Any]:
    """Run one sweep cell; failures are recorded in the row, never raised."""
    m = task.grid_m if task.mode == "star" else task.cloud_size
    config = PipelineConfig(
        eps=task.eps,
        strategy=default_strategy(task.n, task.seed, m=m),
        c2=task.c2,
        raster_size=task.raster_size,
        phase1_max_steps=task.phase1_max_steps,
        phase2_max_steps=task.phase2_max_steps,
        phase3_max_steps=task.phase3_max_steps,
        renormalize_mean_width=task.renormalize_mean_width,
        seed_ball_only=task.mode == "interval",
    )
    try:
        body = build_body(task)
        report = TheoremDriver(config).run(body)
    except GeometryError as exc:
        logger.warning("sweep_task_failed", shape=task.shape, n=task.n, eps=task.eps, seed=task.seed, error=str(exc))
        return {
            "mode": task.mode,
            "shape": task.shape,
            "n": task.n,
            "eps": task.eps,
            "seed": task.seed,
            "status": "error",
            "error": str(exc),
        }
    return sweep_row(report, mode=task.mode, shape=task.shape)


def _init_worker(settings: Settings) -> None:
    configure_logging(settings)


def _sort_key(row: dict[str, Any]) -> tuple[int, float, int, str]:
    return (int(row["seed"]), float(row["eps"]), int(row["n"]), str(row["shape"]))


def run_sweep(spec: SweepSpec, settings: Settings | None = None) -> SweepResult:
    """Execute every task of ``spec``; rows come back in (seed, ε, n, shape) order."""
    settings = settings or get_settings()
    tasks = spec.tasks(settings)
    logger.info("sweep_start", mode=spec.mode, tasks=len(tasks), jobs=spec.jobs)

    if spec.jobs == 1:
        rows = [run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=spec.jobs, initializer=_init_worker, initargs=(settings,)
        ) as pool:
            rows = list(pool.map(run_task, tasks))

    rows.sort(key=_sort_key)
    fitted = fit_constants(rows)
    result = SweepResult(rows=rows, fitted=fitted)
    logger.info("sweep_complete", runs=len(rows), failures=result.failures, C=fitted.C, c1=fitted.c1)
    return result
