"""Flight plans, the shared planning context, and the SoC feasibility check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import graphkit
from ..errors import MalformedPlanError
from ..scenario import CostMatrix, Scenario, cost_matrix, modified_distances, nearest_stations

# SoC comparisons are made with this slack, scaled by the battery size.
REL_TOL = 1e-9


@dataclass(frozen=True)
class Totals:
    flight_s: float
    charge_s: float
    distance_m: float
    energy_wh: float


@dataclass(frozen=True)
class FlightPlan:
    """A closed tour from the base with per-stop commanded charge.

    ``charges[k]`` is the energy (Wh, before charging losses) bought at stop
    ``k``; a station visited twice has two independent entries.
    ``soc_trace[k]`` is the SoC on arrival at stop ``k``.
    """

    stops: tuple[str, ...]
    charges: tuple[float, ...]
    soc_trace: tuple[float, ...]
    speed: float
    totals: Totals

    @property
    def objective_s(self) -> float:
        return self.totals.flight_s + self.totals.charge_s

    @property
    def total_charge_wh(self) -> float:
        return math.fsum(self.charges)


@dataclass(frozen=True)
class PlanReport:
    objective_s: float
    feasible: bool
    bound_case: int
    time_bounds: tuple[float, float]
    charge_cap_wh: float
    charge_cap_s: float
    modified_cost_wh: float
    alpha: float
    ratio_bound: float
    additive_term_s: float
    matching_exact: bool = True
    ratio_vs_oracle: float | None = None
    debug: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True, eq=False)
class Context:
    """Everything the planner derives from a scenario at one cruise speed."""

    scenario: Scenario
    speed: float
    cm: CostMatrix
    table: graphkit.PathTable  # modified distances over the symmetrised graph
    near_dist: np.ndarray
    near_station: list[int | None]

    @classmethod
    def build(cls, s: Scenario, speed: float | None = None) -> Context:
        speed = s.speed_options[0] if speed is None else float(speed)
        table = modified_distances(s, speed)
        near_dist, near_station = nearest_stations(s, table)
        return cls(s, speed, cost_matrix(s, speed), table, near_dist, near_station)

    @property
    def U(self) -> float:
        return self.scenario.battery.usable_range

    @property
    def tol(self) -> float:
        b = self.scenario.battery.b_max
        return REL_TOL * (max(1.0, b) if math.isfinite(b) else 1.0)

    def dhat(self, seq: Sequence[int]) -> float:
        return math.fsum(float(self.table.dist[a, b]) for a, b in zip(seq, seq[1:]))


@dataclass(frozen=True)
class Feasibility:
    ok: bool
    trace: tuple[float, ...]
    violation: int | None = None
    missing_sites: tuple[str, ...] = ()


def _indices(s: Scenario, stops: Sequence[str]) -> list[int]:
    try:
        return [s.index[x] for x in stops]
    except KeyError as exc:
        raise MalformedPlanError(f"unknown location id {exc.args[0]!r}") from None


def _check_structure(s: Scenario, idx: list[int], charges: Sequence[float]) -> None:
    if not idx:
        raise MalformedPlanError("plan has no stops")
    if idx[0] != s.base or idx[-1] != s.base:
        raise MalformedPlanError("plan must start and end at the base")
    if len(charges) != len(idx):
        raise MalformedPlanError("one charge entry per stop required")
    for i, b in zip(idx, charges):
        if not (math.isfinite(b) and b >= 0):
            raise MalformedPlanError(f"charge must be finite and non-negative, got {b}")
        if b > 0 and not s.is_station(i):
            raise MalformedPlanError(f"charge commanded at non-station {s.locations[i].id!r}")


def soc_trace(
    s: Scenario, cm: CostMatrix, idx: Sequence[int], charges: Sequence[float]
) -> tuple[list[float], int | None]:
    """Arrival SoC at every stop and the first stop breaking the SoC window."""
    bat = s.battery
    tol = REL_TOL * (max(1.0, bat.b_max) if math.isfinite(bat.b_max) else 1.0)
    x = bat.x0
    trace = [x]
    violation = None
    for k in range(len(idx) - 1):
        after = x + bat.eta_c * charges[k]
        if violation is None and after > bat.b_max + tol:
            violation = k
        x = after - bat.eta_d * float(cm.energy[idx[k], idx[k + 1]])
        trace.append(x)
        if violation is None and x < bat.b_min - tol:
            violation = k + 1
    return trace, violation


def full_recharge(s: Scenario, cm: CostMatrix, idx: Sequence[int]) -> list[float]:
    """Charges that top the battery up to b_max at every station stop."""
    bat = s.battery
    x = bat.x0
    charges = []
    for k, i in enumerate(idx):
        b = 0.0
        if s.is_station(i) and math.isfinite(bat.b_max):
            b = max(0.0, (bat.b_max - x) / bat.eta_c)
        charges.append(b)
        if k + 1 < len(idx):
            x = x + bat.eta_c * b - bat.eta_d * float(cm.energy[i, idx[k + 1]])
    return charges


def make_plan(
    s: Scenario, idx: Sequence[int], charges: Sequence[float], speed: float
) -> FlightPlan:
    cm = cost_matrix(s, speed)
    trace, _ = soc_trace(s, cm, idx, charges)
    legs = list(zip(idx, idx[1:]))
    totals = Totals(
        flight_s=math.fsum(float(cm.tau[a, b]) for a, b in legs),
        charge_s=s.charge_seconds_per_wh * math.fsum(charges),
        distance_m=math.fsum(float(cm.d[a, b]) for a, b in legs),
        energy_wh=math.fsum(float(cm.energy[a, b]) for a, b in legs),
    )
    return FlightPlan(
        stops=tuple(s.locations[i].id for i in idx),
        charges=tuple(float(b) for b in charges),
        soc_trace=tuple(trace),
        speed=float(speed),
        totals=totals,
    )


def check_feasibility(s: Scenario, plan: FlightPlan) -> Feasibility:
    """Recompute the SoC recursion from the plan's stops and charges.

    The stored ``soc_trace`` is not trusted. Structural defects raise
    MalformedPlanError; SoC-window breaches and unvisited sites are reported.
    """
    idx = _indices(s, plan.stops)
    _check_structure(s, idx, plan.charges)
    cm = cost_matrix(s, plan.speed)
    trace, violation = soc_trace(s, cm, idx, plan.charges)
    visited = set(idx)
    missing = tuple(s.locations[i].id for i in s.sites if i not in visited)
    return Feasibility(violation is None and not missing, tuple(trace), violation, missing)


def full_recharge_feasible(ctx: Context, seq: Sequence[int]) -> bool:
    """Full-recharge feasibility with legs costed by modified distance."""
    bat = ctx.scenario.battery
    x = bat.x0
    for a, b in zip(seq, seq[1:]):
        x -= bat.eta_d * float(ctx.table.dist[a, b])
        if x < bat.b_min - ctx.tol:
            return False
        if ctx.scenario.is_station(b):
            x = bat.b_max
    return True
