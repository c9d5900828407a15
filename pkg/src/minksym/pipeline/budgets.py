"""Closed-form step budgets and the growth factor of the ball-growing phase."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import overload

from minksym.pipeline.base import PipelineError

EPS0 = Fraction(1, 25)


class BudgetParameterError(PipelineError, ValueError):
    """Budget formula evaluated outside its domain."""


def _sqrt_fraction(x: Fraction) -> Fraction | None:
    """Exact square root of a rational, if it is a perfect square."""
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


@overload
def q_factor(eps: Fraction) -> Fraction | float: ...


@overload
def q_factor(eps: float) -> float: ...


def q_factor(eps: float | Fraction) -> float | Fraction:
    """q(ε) = (1-ε)/(4√ε); exact for rational ε with a rational square root.

    q(1/25) == Fraction(6, 5).
    """
    if not 0 < eps < 1:
        raise BudgetParameterError(f"q(ε) needs 0 < ε < 1, got {eps}")
    if isinstance(eps, Fraction):
        root = _sqrt_fraction(eps)
        if root is not None:
            return (1 - eps) / (4 * root)
    e = float(eps)
    return (1.0 - e) / (4.0 * math.sqrt(e))


def internal_epsilon(eps: float) -> float:
    """ε_int = min(ε²/16, ε/25), so that 1 - 4√ε_int ≥ 1 - ε and ε_int < ε₀."""
    if not 0.0 < eps < 1.0:
        raise BudgetParameterError(f"Target accuracy must lie in (0, 1), got {eps}")
    return min(eps * eps / 16.0, eps / 25.0)


def budget_case_a(eps: float, r: float) -> int:
    """N_a = ⌈4 + 3|ln(ε/r²)|⌉."""
    return math.ceil(4.0 + 3.0 * abs(math.log(eps / (r * r))))


def budget_case_b(eps: float) -> int:
    """N_b = ⌈|log₂ √ε|⌉."""
    return math.ceil(abs(math.log2(math.sqrt(eps))))


def budget_bounds(eps: float, r: float) -> tuple[int, int]:
    """(N_a, N_b) for accuracy ε and starting inner radius r.

    Accepts any 0 < ε < 1 and 0 < r < 1; the ε < ε₀ hypothesis of the
    growth argument is enforced by LemmaParams, not here.
    """
    if not 0.0 < eps < 1.0:
        raise BudgetParameterError(f"Budget needs 0 < ε < 1, got {eps}")
    if not 0.0 < r < 1.0:
        raise BudgetParameterError(f"Budget needs 0 < r < 1, got {r}")
    return budget_case_a(eps, r), budget_case_b(eps)


def scaling_form(n: int, eps: float) -> float:
    """n·|ln ε|, the shape of the total step count."""
    return n * abs(math.log(eps))


def case_a_bound(rho: float, eps: float, net_radius: float) -> float:
    """Lower bound on ρ_in after one step when ρ_in < net radius δ.

    r(1-ε)/(2δ); equals q(ε)·r at δ = 2√ε.
    """
    return rho * (1.0 - eps) / (2.0 * net_radius)


def case_b_bound(rho: float, eps: float, net_radius: float) -> float:
    """((1 - (δ + ε)) + r)/2: the gap to 1 - (δ + ε) at least halves."""
    return ((1.0 - (net_radius + eps)) + rho) / 2.0
