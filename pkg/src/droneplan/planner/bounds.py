"""Trip-time brackets and charge caps for plans with minimal charging."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InternalConsistencyError
from ..scenario import J_PER_WH
from .plan import Context, FlightPlan


@dataclass(frozen=True)
class CostBounds:
    case: int  # 1: no charging, 2: charging
    lower: float
    upper: float
    achieved: float
    charge_cap_wh: float
    charge_cap_s: float


def charge_cap_wh(ctx: Context, distance_m: float) -> float:
    """Upper bound on total commanded charge for a tour of the given length.

    (b_min - x0) / eta_c + c_f_max * eta_d / eta_c * d, floored at zero: when
    the tour needs no charging the linear expression can go negative while
    the minimal charge is simply 0.
    """
    bat = ctx.scenario.battery
    cf_hi = ctx.cm.c_f_hi / J_PER_WH
    cap = (bat.b_min - bat.x0) / bat.eta_c + cf_hi * bat.eta_d / bat.eta_c * distance_m
    return max(0.0, cap)


def check_cost_bounds(ctx: Context, plan: FlightPlan, rtol: float = 1e-9) -> CostBounds:
    """Check the trip-time bracket and the charge cap of a minimally charged plan.

    Case 1 (nothing charged): trip time equals c_a * d(F). Case 2:
    (c_a + c_f_min*c_b*eta_d/eta_c) d(F) + c' <= trip time
        <= (c_a + c_f_max*c_b*eta_d/eta_c) d(F) + c',  c' = c_b/eta_c (b_min - x0).
    Raises InternalConsistencyError when either check fails.
    """
    s = ctx.scenario
    bat = s.battery
    costs = s.costs(plan.speed)
    d = plan.totals.distance_m
    achieved = plan.objective_s
    total_charge = plan.total_charge_wh
    if total_charge > 0:
        scale = costs.c_b * bat.eta_d / bat.eta_c
        c_prime = costs.c_b / bat.eta_c * (bat.b_min - bat.x0)
        lower = (costs.c_a + ctx.cm.c_f_lo / J_PER_WH * scale) * d + c_prime
        upper = (costs.c_a + ctx.cm.c_f_hi / J_PER_WH * scale) * d + c_prime
        case = 2
    else:
        lower = upper = costs.c_a * d
        case = 1
    cap = charge_cap_wh(ctx, d)
    slack = rtol * max(1.0, abs(achieved), abs(upper))
    if not (lower - slack <= achieved <= upper + slack):
        raise InternalConsistencyError(
            f"trip time {achieved:.9g} s outside bracket [{lower:.9g}, {upper:.9g}] (case {case})"
        )
    if total_charge > cap + rtol * max(1.0, cap):
        raise InternalConsistencyError(
            f"total charge {total_charge:.9g} Wh exceeds cap {cap:.9g} Wh"
        )
    return CostBounds(case, lower, upper, achieved, cap, costs.c_b * cap)


def ratio_bound(alpha: float) -> float:
    return 1.5 * (1 + alpha) / (1 - alpha)


def additive_term_s(ctx: Context) -> float:
    """The constant term c_b (b_min - x0) / eta_c of the overall guarantee."""
    bat = ctx.scenario.battery
    if math.isinf(bat.x0):
        return -math.inf
    return ctx.scenario.charge_seconds_per_wh * (bat.b_min - bat.x0) / bat.eta_c
