"""Exact reference solvers for small scenarios, by Pareto label setting.

Two optima are computed:

* the simplified problem: minimum modified-distance tour when every station
  stop refills the battery;
* the full problem: minimum trip time, with the least charge that keeps the
  chosen route feasible.

Labels live on ``(vertex, visited-site mask)`` and are pruned by dominance,
so the search is exact but only practical for a handful of locations.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from ..errors import InfeasibleScenarioError, OracleLimitError
from ..scenario import Scenario, validate
from .plan import Context, FlightPlan, full_recharge, make_plan
from .repair import fix_charge


@dataclass(frozen=True)
class ExactLimits:
    max_sites: int = 6
    max_stations: int = 4


@dataclass(frozen=True)
class ExactResult:
    plan: FlightPlan
    objective_s: float
    opt_relaxed: float  # optimal modified-distance cost (Wh) under full recharging


def _check_limits(s: Scenario, limits: ExactLimits) -> None:
    if len(s.sites) > limits.max_sites or len(s.stations) > limits.max_stations:
        raise OracleLimitError(
            f"exact search supports at most {limits.max_sites} sites and "
            f"{limits.max_stations} stations, got {len(s.sites)} and {len(s.stations)}"
        )


def _dominated(front: list[tuple[float, ...]], label: tuple[float, ...], tol: float) -> bool:
    # all but the last component are minimised, the last (SoC) maximised
    *costs, soc = label
    for other in front:
        *oc, osoc = other
        if all(o <= c + tol for o, c in zip(oc, costs)) and osoc >= soc - tol:
            return True
    return False


def _insert(front: list[tuple[float, ...]], label: tuple[float, ...], tol: float) -> list[tuple[float, ...]]:
    *costs, soc = label
    keep = [
        o for o in front
        if not (all(c <= oc + tol for c, oc in zip(costs, o[:-1])) and soc >= o[-1] - tol)
    ]
    keep.append(label)
    return keep


def relaxed_optimum(ctx: Context) -> tuple[float, list[int]]:
    """Cheapest modified-distance tour under full recharging, and its route."""
    s = ctx.scenario
    bat = s.battery
    dist = ctx.table.dist
    bit = {v: 1 << k for k, v in enumerate(s.sites)}
    full = (1 << len(s.sites)) - 1
    tol = ctx.tol

    if not s.sites:
        return 0.0, [s.base]
    # (cost, tie, vertex, mask, soc, route)
    heap: list = [(0.0, 0, s.base, 0, bat.x0, (s.base,))]
    fronts: dict[tuple[int, int], list[tuple[float, float]]] = {}
    tie = 0
    while heap:
        cost, _, v, mask, soc, route = heapq.heappop(heap)
        if v == s.base and mask == full and len(route) > 1:
            return cost, list(route)
        for w in [*s.sites, *s.stations, s.base]:
            if w == v:
                continue
            if w in bit and mask & bit[w]:
                continue
            if w == s.base and mask != full:
                continue
            x = soc - bat.eta_d * float(dist[v, w])
            if x < bat.b_min - tol:
                continue
            if s.is_station(w):
                x = bat.b_max
            nmask = mask | bit.get(w, 0)
            label = (cost + float(dist[v, w]), x)
            front = fronts.get((w, nmask), [])
            if _dominated(front, label, tol):
                continue
            fronts[(w, nmask)] = _insert(front, label, tol)
            tie += 1
            heapq.heappush(heap, (label[0], tie, w, nmask, x, (*route, w)))
    raise InfeasibleScenarioError("no tour is feasible under full recharging")


def trip_optimum(ctx: Context) -> tuple[float, list[int]]:
    """Minimum trip time over all routes, charging only what the route needs."""
    s = ctx.scenario
    bat = s.battery
    cm = ctx.cm
    costs = s.costs(ctx.speed)
    bit = {v: 1 << k for k, v in enumerate(s.sites)}
    full = (1 << len(s.sites)) - 1
    tol = ctx.tol
    budget = bat.b_max - bat.b_min if math.isfinite(bat.b_max) else math.inf

    def objective(tau: float, energy: float) -> float:
        deficit = max(0.0, bat.eta_d * energy - budget) if math.isfinite(budget) else 0.0
        return tau + costs.c_b / bat.eta_c * deficit

    if not s.sites:
        return 0.0, [s.base]

    # partial objectives never decrease along a route, so the first complete
    # label popped is optimal
    heap: list = [(0.0, 0, 0.0, 0.0, s.base, 0, bat.x0, (s.base,))]
    fronts: dict[tuple[int, int], list[tuple[float, float, float]]] = {}
    tie = 0
    while heap:
        obj, _, tau, energy, v, mask, soc, route = heapq.heappop(heap)
        if v == s.base and mask == full and len(route) > 1:
            return obj, list(route)
        for w in range(len(s.locations)):
            if w == v:
                continue
            x = soc - bat.eta_d * float(cm.energy[v, w])
            if x < bat.b_min - tol:
                continue
            if s.is_station(w):
                x = bat.b_max
            nmask = mask | bit.get(w, 0)
            ntau = tau + float(cm.tau[v, w])
            nenergy = energy + float(cm.energy[v, w])
            label = (ntau, nenergy, x)
            front = fronts.get((w, nmask), [])
            if _dominated(front, label, tol):
                continue
            fronts[(w, nmask)] = _insert(front, label, tol)
            tie += 1
            heapq.heappush(
                heap, (objective(ntau, nenergy), tie, ntau, nenergy, w, nmask, x, (*route, w))
            )
    raise InfeasibleScenarioError("no feasible tour exists")


def plan_exact(
    s: Scenario, limits: ExactLimits = ExactLimits(), speed: float | None = None
) -> ExactResult:
    """Optimal plan for a small scenario plus the simplified-problem optimum.

    Raises OracleLimitError when the scenario exceeds `limits`.
    """
    _check_limits(s, limits)
    ctx = Context.build(s, speed)
    validate(s, ctx.speed)
    opt_relaxed, _ = relaxed_optimum(ctx)
    objective, route = trip_optimum(ctx)
    rough = make_plan(s, route, full_recharge(s, ctx.cm, route), ctx.speed)
    plan = make_plan(s, route, fix_charge(ctx, rough), ctx.speed)
    return ExactResult(plan, objective, opt_relaxed)
