"""Command-line entry point: gen, run, sweep, verify.

Exit codes: 0 success, 1 usage, 2 invariant violation or failed property,
3 budget exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Literal

import structlog
from pydantic import BaseModel, Field, ValidationError

from minksym import __version__
from minksym.config import Settings, get_settings
from minksym.experiments.sweep import STAR_SHAPES, SweepSpec, run_sweep
from minksym.experiments.verify import SUITES, VerifyOptions, run_suite
from minksym.geometry.base import Body, GeometryError
from minksym.geometry.core import Direction, sphere_quadrature
from minksym.geometry.generators import gen_cross, gen_disc, gen_random_star, gen_segment, gen_spiky
from minksym.geometry.star2d import grid_angle_of
from minksym.geometry.support import IntervalBody
from minksym.log import configure_logging
from minksym.pipeline.base import BudgetExhaustedError, PipelineError, PipelineStatus
from minksym.pipeline.driver import TheoremDriver
from minksym.pipeline.models import PipelineConfig
from minksym.reporting import STEP_COLUMNS, SWEEP_COLUMNS, steps_csv, sweep_csv, write_csv
from minksym.schedule.strategies import StrategyKind, StrategySpec
from minksym.shapefile import ShapeFileError, read_shape, write_shape

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_BUDGET = 3

GENERATORS = ("disc", "segment", "spiky", "cross", "random", "interval")

CSV_HELP = (
    "step CSV columns: " + ", ".join(STEP_COLUMNS) + "; the last row is the run summary.\n"
    "sweep CSV columns: " + ", ".join(SWEEP_COLUMNS) + "; the last row holds the fitted constants.\n"
    "Floats carry 12 significant digits."
)


class RunConfig(BaseModel):
    """Flags of one invocation, layered over the environment settings."""

    command: Literal["gen", "run", "sweep", "verify"]
    shape: Path | None = None
    eps: float | None = Field(default=None, gt=0.0, lt=1.0)
    seed: int
    strategy: StrategyKind | None = None
    c2: float = Field(gt=0.0, lt=1.0)
    grid_m: int = Field(ge=8)
    raster_size: int = Field(ge=32)
    jobs: int = Field(ge=1)
    out: Path
    via_interval: bool = False
    allow_large_eps: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace, settings: Settings) -> RunConfig:
        return cls(
            command=args.command,
            shape=getattr(args, "shape", None),
            eps=getattr(args, "eps", None) if args.command == "run" else None,
            seed=args.seed if args.seed is not None else settings.experiment.seed,
            strategy=getattr(args, "strategy", None),
            c2=args.c2 if args.c2 is not None else settings.experiment.c2,
            grid_m=args.grid_m or settings.geometry.grid_m,
            raster_size=args.raster_G or settings.geometry.raster_size,
            jobs=args.jobs or settings.experiment.jobs,
            out=args.out or settings.output_dir,
            via_interval=getattr(args, "via_interval", False),
            allow_large_eps=getattr(args, "allow_large_eps", False),
        )


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _seed_list(text: str) -> list[int]:
    """``20`` means seeds 0..19; ``3,5,8`` lists them."""
    if "," in text:
        return _int_list(text)
    return list(range(int(text)))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--grid-m", dest="grid_m", type=int, default=None, help="angle grid size m")
    p.add_argument("--raster-G", dest="raster_G", type=int, default=None, help="raster side G (power of two)")
    p.add_argument("--c2", type=float, default=None, help="seed-ball constant c2")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.add_argument("--out", type=Path, default=None, help="output path (default: $MINKSYM_OUTPUT_DIR)")
    p.add_argument("--log-level", dest="log_level", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minksym",
        description="Minkowski symmetrization of star-shaped and convex bodies.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a shape file")
    gen.add_argument("kind", choices=GENERATORS)
    gen.add_argument("--rho", type=float, default=1.0, help="disc radius")
    gen.add_argument("--R", type=float, default=1.0, help="segment or interval length")
    gen.add_argument("--angle", type=float, default=0.0, help="segment angle in radians (grid-aligned)")
    gen.add_argument("--spikes", type=int, default=12)
    gen.add_argument("--len", dest="length", type=float, default=1.0, help="spike length")
    gen.add_argument("--base", type=float, default=0.2, help="spike base radius")
    gen.add_argument("--arm", type=float, default=1.0, help="cross half span")
    gen.add_argument("--width", type=float, default=0.2, help="cross arm width")
    gen.add_argument("--low", type=float, default=0.5, help="random star minimum radius")
    gen.add_argument("--high", type=float, default=1.0, help="random star maximum radius")
    gen.add_argument("--dim", type=int, default=2, help="interval dimension")
    gen.add_argument("--cloud", type=int, default=None, help="interval cloud size")
    _add_common(gen)

    run = sub.add_parser("run", help="run the three phases on a shape", epilog=CSV_HELP)
    run.add_argument("--shape", type=Path, required=True)
    run.add_argument("--eps", type=float, required=True)
    run.add_argument("--strategy", type=StrategyKind, choices=list(StrategyKind), default=None)
    run.add_argument("--via-interval", dest="via_interval", action="store_true")
    run.add_argument("--allow-large-eps", dest="allow_large_eps", action="store_true")
    _add_common(run)

    sweep = sub.add_parser("sweep", help="grid of runs with fitted constants", epilog=CSV_HELP)
    sweep.add_argument("--mode", choices=("star", "interval"), default="star")
    sweep.add_argument("--shapes", type=lambda s: s.split(","), default=["cross", "spiky"], help=f"any of {', '.join(STAR_SHAPES)}")
    sweep.add_argument("--eps", type=_float_list, default=[0.2, 0.1, 0.05])
    sweep.add_argument("--dims", type=_int_list, default=[2])
    sweep.add_argument("--seeds", type=_seed_list, default=list(range(20)))
    sweep.add_argument("--cloud", type=int, default=None, help="support cloud size override")
    _add_common(sweep)

    verify = sub.add_parser("verify", help="run a property battery")
    verify.add_argument("suite", choices=SUITES)
    verify.add_argument("--cases", type=int, default=None)
    verify.add_argument("--oracle-G", dest="oracle_G", type=int, default=None)
    _add_common(verify)
    return parser


def _print_json(payload: dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _summary(K: Body) -> dict[str, float]:
    return {"rho_in": K.inner_radius(), "rho_out": K.outer_radius(), "mean_width": K.mean_width()}


def generate(args: argparse.Namespace, cfg: RunConfig, settings: Settings) -> Body:
    m = cfg.grid_m
    if args.kind == "disc":
        return gen_disc(args.rho, m)
    if args.kind == "segment":
        a = grid_angle_of(Direction.from_angle(args.angle), m)
        return gen_segment(args.R, a.k, m)
    if args.kind == "spiky":
        return gen_spiky(args.spikes, args.length, args.base, m, seed=cfg.seed)
    if args.kind == "cross":
        return gen_cross(args.arm, args.width, m)
    if args.kind == "random":
        return gen_random_star(cfg.seed, m, bounds=(args.low, args.high))
    size = args.cloud or (m if args.dim == 2 else settings.cloud_size(args.dim))
    cloud = sphere_quadrature(args.dim, size, seed=cfg.seed)
    return IntervalBody(args.R, Direction.basis(args.dim, 0)).to_support(cloud)


def cmd_gen(args: argparse.Namespace, cfg: RunConfig, settings: Settings) -> int:
    K = generate(args, cfg, settings)
    path = cfg.out if cfg.out.suffix == ".shape" else cfg.out / f"{args.kind}.shape"
    write_shape(path, K)
    _print_json({"path": str(path), **_summary(K)})
    return EXIT_OK


def cmd_run(args: argparse.Namespace, cfg: RunConfig, settings: Settings) -> int:
    assert cfg.shape is not None and cfg.eps is not None
    K = read_shape(cfg.shape)
    m = getattr(K, "m", None) or getattr(getattr(K, "cloud", None), "size", cfg.grid_m)
    kind = cfg.strategy or (StrategyKind.GRID_RANDOM_2D if K.dim == 2 else StrategyKind.UNIFORM_RANDOM)
    strategy = StrategySpec(kind=kind, seed=cfg.seed, m=m)
    config = PipelineConfig.from_settings(
        cfg.eps,
        strategy,
        settings,
        c2=cfg.c2,
        raster_size=cfg.raster_size,
        via_interval=cfg.via_interval,
        allow_large_eps=cfg.allow_large_eps,
    )

    report = TheoremDriver(config).run(K)
    csv_path = write_csv(cfg.out / f"{cfg.shape.stem}_steps.csv", steps_csv(report))

    payload = report.model_dump(exclude={"steps"}, mode="json")
    payload["total"] = report.total
    payload["csv"] = str(csv_path)
    _print_json(payload)

    if report.status == PipelineStatus.COMPLETED:
        return EXIT_OK
    if report.status == PipelineStatus.BUDGET_EXHAUSTED:
        return EXIT_BUDGET
    print(f"invariant violated: {report.error}", file=sys.stderr)
    return EXIT_VIOLATION


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig, settings: Settings) -> int:
    dims = args.dims if args.mode == "interval" else [2]
    spec = SweepSpec(
        mode=args.mode,
        shapes=args.shapes,
        eps=args.eps,
        dims=dims,
        seeds=args.seeds,
        grid_m=cfg.grid_m,
        raster_size=cfg.raster_size,
        cloud_size=args.cloud,
        c2=cfg.c2,
        jobs=cfg.jobs,
    )
    result = run_sweep(spec, settings)
    path = cfg.out if cfg.out.suffix == ".csv" else cfg.out / f"sweep_{args.mode}.csv"
    write_csv(path, sweep_csv(result.rows, result.fitted))
    _print_json(
        {
            "csv": str(path),
            "runs": len(result.rows),
            "failures": result.failures,
            "fitted": result.fitted.model_dump(),
        }
    )
    if not result.failures:
        return EXIT_OK
    statuses = {row.get("status") for row in result.rows if row.get("error")}
    if statuses <= {PipelineStatus.BUDGET_EXHAUSTED, PipelineStatus.BUDGET_EXHAUSTED.value}:
        return EXIT_BUDGET
    return EXIT_VIOLATION


def cmd_verify(args: argparse.Namespace, cfg: RunConfig, settings: Settings) -> int:
    opts = VerifyOptions(
        cases=args.cases,
        seed=cfg.seed,
        grid_m=cfg.grid_m,
        raster_size=cfg.raster_size,
        oracle_size=args.oracle_G or settings.geometry.oracle_size,
    )
    report = run_suite(args.suite, opts)
    _print_json(report.summary())
    return EXIT_OK if report.passed else EXIT_VIOLATION


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    settings = get_settings()
    if args.log_level:
        settings = settings.model_copy(update={"log_level": args.log_level})
    configure_logging(settings)

    try:
        cfg = RunConfig.from_args(args, settings)
        return COMMANDS[args.command](args, cfg, settings)
    except (ValidationError, ShapeFileError, GeometryError) as exc:
        logger.error("usage_error", command=args.command, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhaustedError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PipelineError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
