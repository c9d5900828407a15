"""Regression of measured step counts onto their theoretical forms."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from typing import Any

import numpy as np
from scipy.stats import linregress

from minksym.pipeline.budgets import scaling_form
from minksym.pipeline.models import FittedConstants


def fit_constants(rows: Iterable[Mapping[str, Any]]) -> FittedConstants:
    """Fit total ≈ C·n|ln ε| + C' and N₁ ≈ c₁·n over successful runs.

    Rows need ``n``, ``eps``, ``total`` and ``n1``; rows with an ``error``
    are skipped. A fit needs at least two distinct abscissae, otherwise the
    slope is the mean ratio and the intercept is left empty.
    """
    usable = [row for row in rows if not row.get("error")]
    result = FittedConstants(runs=len(usable))
    if not usable:
        return result

    x_total = np.array([scaling_form(int(r["n"]), float(r["eps"])) for r in usable])
    y_total = np.array([float(r["total"]) for r in usable])
    x_seed = np.array([float(r["n"]) for r in usable])
    y_seed = np.array([float(r["n1"]) for r in usable])

    if np.unique(x_total).size >= 2:
        fit = linregress(x_total, y_total)
        result.C = float(fit.slope)
        result.C_intercept = float(fit.intercept)
        result.C_r2 = float(fit.rvalue**2) if math.isfinite(fit.rvalue) else None
    elif x_total[0] > 0:
        result.C = float(np.mean(y_total / x_total))

    if np.unique(x_seed).size >= 2:
        fit = linregress(x_seed, y_seed)
        result.c1 = float(fit.slope)
        result.c1_intercept = float(fit.intercept)
    else:
        result.c1 = float(np.mean(y_seed / x_seed))
    return result
