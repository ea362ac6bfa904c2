"""Greedy nearest-site baseline with threshold-triggered station diversions."""

from __future__ import annotations

import math

from ..errors import BenchmarkFailedError
from ..scenario import Scenario, validate
from .bounds import ratio_bound
from .plan import Context, FlightPlan, PlanReport, check_feasibility, make_plan


def soc_threshold(ctx: Context) -> float:
    """Lowest SoC that still reaches the nearest station from every site."""
    s = ctx.scenario
    bat = s.battery
    reserve = max((float(ctx.near_dist[u]) for u in s.sites), default=0.0)
    return bat.b_min + bat.eta_d * reserve


def plan_benchmark(s: Scenario, speed: float | None = None) -> tuple[FlightPlan, PlanReport]:
    """Fly to the nearest unvisited site (Euclidean) while the arrival SoC stays
    above the threshold; otherwise divert to the nearest reachable station and
    charge to full. Returns home once every site is visited.

    From a freshly charged station the threshold is relaxed to the reserve the
    chosen site itself needs; failing that, the drone hops to the reachable
    station closest to the site. Raises BenchmarkFailedError on a dead end.
    """
    ctx = Context.build(s, speed)
    alpha = validate(s, ctx.speed)
    bat = s.battery
    E = ctx.cm.energy
    d = ctx.cm.d
    stations = s.stations
    threshold = soc_threshold(ctx)

    def arrive(x: float, a: int, b: int) -> float:
        return x - bat.eta_d * float(E[a, b])

    cur, x = s.base, bat.x0
    route = [cur]
    charges = [0.0]
    unvisited = sorted(s.sites, key=lambda v: s.locations[v].id)
    full_at: int | None = None  # station where we last charged to full, if still there

    def charge_at(z: int, x: float) -> float:
        route.append(z)
        b = max(0.0, (bat.b_max - x) / bat.eta_c) if math.isfinite(bat.b_max) else 0.0
        charges.append(b)
        return x + bat.eta_c * b

    def divert(target: int) -> tuple[int, float]:
        nonlocal full_at
        reachable = [z for z in stations if z != cur and arrive(x, cur, z) >= bat.b_min - ctx.tol]
        if full_at == cur:
            # already full here: only a station closer to the target helps
            reachable = [z for z in reachable if ctx.table.dist[z, target] < ctx.table.dist[cur, target]]
            key = lambda z: (float(ctx.table.dist[z, target]), z)
        else:
            key = lambda z: (float(E[cur, z]), z)
        if not reachable:
            raise BenchmarkFailedError(
                f"stuck at {s.locations[cur].id!r} with {x:.4g} Wh heading for "
                f"{s.locations[target].id!r}"
            )
        z = min(reachable, key=key)
        x_new = charge_at(z, arrive(x, cur, z))
        full_at = z
        return z, x_new

    steps = 0
    limit = 4 * (len(s.locations) + 1) ** 2
    while unvisited:
        steps += 1
        if steps > limit:
            raise BenchmarkFailedError("benchmark did not converge")
        v = min(unvisited, key=lambda u: (float(d[cur, u]), u))
        x_v = arrive(x, cur, v)
        ok = x_v >= threshold - ctx.tol
        if not ok and full_at == cur:
            ok = x_v >= bat.b_min + bat.eta_d * float(ctx.near_dist[v]) - ctx.tol
        if ok or not stations and x_v >= bat.b_min - ctx.tol:
            route.append(v)
            charges.append(0.0)
            cur, x = v, x_v
            full_at = None
            unvisited.remove(v)
            continue
        cur, x = divert(v)

    while arrive(x, cur, s.base) < bat.b_min - ctx.tol:
        steps += 1
        if steps > limit or not stations:
            raise BenchmarkFailedError("cannot return to the base")
        cur, x = divert(s.base)
    route.append(s.base)
    charges.append(0.0)
    if len(route) == 2 and route[0] == route[1] == s.base:
        route, charges = [s.base], [0.0]

    plan = make_plan(s, route, charges, ctx.speed)
    feas = check_feasibility(s, plan)
    if not feas.ok:
        raise BenchmarkFailedError(f"benchmark route breaks the SoC window at stop {feas.violation}")
    return plan, PlanReport(
        objective_s=plan.objective_s,
        feasible=True,
        bound_case=2 if plan.total_charge_wh > 0 else 1,
        time_bounds=(math.nan, math.nan),
        charge_cap_wh=math.nan,
        charge_cap_s=math.nan,
        modified_cost_wh=ctx.dhat(route),
        alpha=alpha,
        ratio_bound=ratio_bound(alpha),
        additive_term_s=math.nan,
        debug={"threshold_wh": threshold},
    )
