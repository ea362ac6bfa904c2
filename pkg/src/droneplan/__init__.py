"""Minimum trip-time drone tours with recharging stops."""

from .model import (
    PRESETS,
    CruiseState,
    MotionSample,
    PowerCoefficients,
    cruise_energy_rate,
    estimate_energy,
    estimate_power,
    fit_coefficients,
)
from .planner import (
    FlightPlan,
    PlanReport,
    check_feasibility,
    find_plan,
    plan_benchmark,
    plan_exact,
    plan_variable_speed,
)
from .scenario import Scenario, load_scenario, validate

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "CruiseState",
    "FlightPlan",
    "MotionSample",
    "PlanReport",
    "PowerCoefficients",
    "Scenario",
    "check_feasibility",
    "cruise_energy_rate",
    "estimate_energy",
    "estimate_power",
    "find_plan",
    "fit_coefficients",
    "load_scenario",
    "plan_benchmark",
    "plan_exact",
    "plan_variable_speed",
    "validate",
]
