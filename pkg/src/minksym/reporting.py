"""CSV emission for runs and sweeps.

Columns are fixed; floats carry 12 significant digits and wall time is never
written, so identical runs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import structlog

from minksym.pipeline.models import FittedConstants, RunReport, StepRecord

logger = structlog.get_logger(__name__)

FLOAT_FORMAT = "{:.12g}"

STEP_COLUMNS: tuple[str, ...] = (
    "step",
    "phase",
    "phase_step",
    "angle",
    "rho_in",
    "rho_out",
    "mean_width",
    "radial_distance",
    "hull_rho_in",
    "hull_rho_out",
    "interval_rho_in",
    "net",
    "net_radius",
    "tau",
    "drift",
)

SWEEP_COLUMNS: tuple[str, ...] = (
    "mode",
    "shape",
    "n",
    "eps",
    "seed",
    "status",
    "n1",
    "n2",
    "n3a",
    "n3b",
    "total",
    "budget_a",
    "budget_b",
    "scaling_form",
    "final_rho_in",
    "final_rho_out",
    "tau_max",
    "error",
    "C",
    "C_intercept",
    "C_r2",
    "c1",
)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    return str(value)


def _write_rows(columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(col)) for col in columns])
    return buffer.getvalue()


def step_row(record: StepRecord) -> dict[str, Any]:
    return record.model_dump(include=set(STEP_COLUMNS))


def summary_row(report: RunReport) -> dict[str, Any]:
    """Final state in the step columns; ``step`` holds the total step count."""
    return {
        "step": report.total,
        "phase": f"summary:{report.status.value}",
        "rho_in": report.final_rho_in,
        "rho_out": report.final_rho_out,
        "mean_width": report.steps[-1].mean_width if report.steps else None,
        "radial_distance": report.steps[-1].radial_distance if report.steps else None,
        "hull_rho_in": report.final_hull_rho_in,
        "hull_rho_out": report.final_hull_rho_out,
        "interval_rho_in": report.interval.final_rho_in if report.interval else None,
        "net_radius": report.net_radius_certified,
        "tau": report.tau_total,
        "drift": report.mean_width_drift,
    }


def steps_csv(report: RunReport) -> str:
    rows = [step_row(r) for r in report.steps]
    rows.append(summary_row(report))
    return _write_rows(STEP_COLUMNS, rows)


def sweep_csv(rows: Sequence[Mapping[str, Any]], fitted: FittedConstants | None = None) -> str:
    """One row per run, plus a fitted-constants row when ``fitted`` is given."""
    out = list(rows)
    if fitted is not None:
        out.append(
            {
                "mode": "summary",
                "total": fitted.runs,
                "C": fitted.C,
                "C_intercept": fitted.C_intercept,
                "C_r2": fitted.C_r2,
                "c1": fitted.c1,
            }
        )
    return _write_rows(SWEEP_COLUMNS, out)


def sweep_row(report: RunReport, *, mode: str, shape: str) -> dict[str, Any]:
    row: dict[str, Any] = report.model_dump(
        include={
            "n",
            "eps",
            "seed",
            "status",
            "n1",
            "n2",
            "n3a",
            "n3b",
            "budget_a",
            "budget_b",
            "scaling_form",
            "final_rho_in",
            "final_rho_out",
            "tau_max",
            "error",
        }
    )
    row.update(mode=mode, shape=shape, total=report.total)
    return row


def write_csv(path: Path | str, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    logger.info("csv_written", path=str(path), rows=text.count("\n") - 1)
    return path
