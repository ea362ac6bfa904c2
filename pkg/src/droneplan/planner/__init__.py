"""Tour planning with recharging stops."""

from .benchmark import plan_benchmark, soc_threshold
from .bounds import CostBounds, check_cost_bounds
from .exact import ExactLimits, ExactResult, plan_exact
from .find import find_plan, plan_variable_speed
from .meta import MetaDistances, init_distances
from .plan import (
    Context,
    Feasibility,
    FlightPlan,
    PlanReport,
    Totals,
    check_feasibility,
)
from .repair import fix_charge, fix_plan

__all__ = [
    "Context",
    "CostBounds",
    "ExactLimits",
    "ExactResult",
    "Feasibility",
    "FlightPlan",
    "MetaDistances",
    "PlanReport",
    "Totals",
    "check_cost_bounds",
    "check_feasibility",
    "find_plan",
    "fix_charge",
    "fix_plan",
    "init_distances",
    "plan_benchmark",
    "plan_exact",
    "plan_variable_speed",
    "soc_threshold",
]
