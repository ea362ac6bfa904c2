"""Turning an Euler tour into a feasible plan, then trimming the charge."""

from __future__ import annotations

import logging
from typing import Sequence

from ..errors import CannotFixChargeError, InfeasibleScenarioError, InternalConsistencyError
from .meta import MetaDistances
from .plan import (
    Context,
    FlightPlan,
    full_recharge,
    full_recharge_feasible,
    make_plan,
    soc_trace,
)

log = logging.getLogger(__name__)


def expand_shortest(ctx: Context, seq: Sequence[int]) -> list[int]:
    """Replace each leg by its shortest route in the symmetrised cost graph."""
    out = [seq[0]]
    for a, b in zip(seq, seq[1:]):
        if a == b:
            continue
        out.extend(ctx.table.path(a, b)[1:])
    return out


def shortcut(ctx: Context, seq: Sequence[int]) -> list[int]:
    """Drop repeat visits to sites and the base, keeping the closing base.

    Modified distances are a metric, so skipping a vertex without a charger
    never lowers the SoC further along under full recharging.
    """
    s = ctx.scenario
    seen: set[int] = set()
    out = []
    for k, v in enumerate(seq):
        last = k == len(seq) - 1
        if s.is_station(v) or last or v not in seen:
            if not out or out[-1] != v:
                out.append(v)
            seen.add(v)
    if not full_recharge_feasible(ctx, out):
        raise InternalConsistencyError("shortcutting broke full-recharge feasibility")
    return out


def prune_stations(ctx: Context, seq: Sequence[int]) -> list[int]:
    """Drop station stops, first to last and pass after pass, while full
    recharging stays feasible."""
    s = ctx.scenario
    out = list(seq)
    changed = True
    while changed:
        changed = False
        k = 1
        while k < len(out) - 1:
            if s.is_station(out[k]):
                trial = out[:k] + out[k + 1:]
                trial = [v for j, v in enumerate(trial) if j == 0 or v != trial[j - 1]]
                if full_recharge_feasible(ctx, trial):
                    out = trial
                    changed = True
                    continue
            k += 1
    return out


def fix_plan(
    ctx: Context,
    meta: MetaDistances,
    tour: Sequence[int],
    order: Sequence[int] | None = None,
) -> FlightPlan:
    """Expand meta edges and repair the tour with station round trips.

    Every non-station stop gets a detour to its nearest station and back; the
    detours are then dropped one at a time, in tour order unless `order`
    gives another permutation, whenever the tour stays feasible under
    full recharging. Repeat visits to sites are then shortcut, redundant
    station stops pruned, each leg is flown along its cheapest route, and the returned plan charges to full at
    every station stop.
    """
    s = ctx.scenario
    expanded = [tour[0]]
    for a, b in zip(tour, tour[1:]):
        expanded.extend(meta.path(a, b)[1:])

    # (vertex, detour id); detour id None marks the expanded tour itself
    entries: list[tuple[int, int | None]] = []
    n_detours = 0
    for v in expanded:
        entries.append((v, None))
        z = ctx.near_station[v]
        if z is not None and not s.is_station(v):
            entries.extend([(z, n_detours), (v, n_detours)])
            n_detours += 1

    def seq_of(es: list[tuple[int, int | None]]) -> list[int]:
        return [v for v, _ in es]

    if not full_recharge_feasible(ctx, seq_of(entries)):
        raise InfeasibleScenarioError("tour is infeasible even with every station detour")

    removal = range(n_detours) if order is None else order
    for rid in removal:
        trial = [e for e in entries if e[1] != rid]
        if full_recharge_feasible(ctx, seq_of(trial)):
            entries = trial
    kept = sorted({rid for _, rid in entries if rid is not None})
    log.debug("fix_plan kept %d of %d station detours: %s", len(kept), n_detours, kept)

    seq = prune_stations(ctx, shortcut(ctx, seq_of(entries)))
    route = expand_shortest(ctx, seq)
    route = [v for k, v in enumerate(route) if k == 0 or v != route[k - 1]]
    charges = full_recharge(s, ctx.cm, route)
    return make_plan(s, route, charges, ctx.speed)


def fix_charge(ctx: Context, plan: FlightPlan) -> tuple[float, ...]:
    """Least total charge keeping the plan feasible.

    Walks the station stops backwards: later stations are zeroed until the
    first one whose remaining top-up brings the drone home at exactly b_min;
    earlier stations keep their charge from `plan`.
    """
    s = ctx.scenario
    bat = s.battery
    idx = [s.index[x] for x in plan.stops]
    charges = list(plan.charges)
    _, violation = soc_trace(s, ctx.cm, idx, charges)
    if violation is not None:
        charges = full_recharge(s, ctx.cm, idx)
        _, violation = soc_trace(s, ctx.cm, idx, charges)
        if violation is not None:
            raise CannotFixChargeError(
                f"plan is infeasible even when charging to full (stop {violation})"
            )

    stations, demand, delivered = _segments(ctx, idx, charges)
    total_demand = sum(demand)

    new = [0.0] * len(idx)
    for k in stations:
        new[k] = charges[k]
    for j in range(len(stations) - 1, -1, -1):
        k = stations[j]
        need = (bat.b_min - bat.x0 + total_demand - sum(delivered[:j])) / bat.eta_c
        new[k] = max(0.0, need)
        if new[k] > 0:
            break
    return tuple(new)


def _segments(
    ctx: Context, idx: Sequence[int], charges: Sequence[float]
) -> tuple[list[int], list[float], list[float]]:
    """Station stop positions, discharge demand between consecutive stations
    (first segment from the base, last one back to it), and delivered charge."""
    bat = ctx.scenario.battery
    stations = [k for k, i in enumerate(idx) if ctx.scenario.is_station(i)]
    bounds = [0, *stations, len(idx) - 1]
    demand = [
        bat.eta_d
        * sum(float(ctx.cm.energy[idx[k], idx[k + 1]]) for k in range(bounds[j], bounds[j + 1]))
        for j in range(len(bounds) - 1)
    ]
    delivered = [bat.eta_c * charges[k] for k in stations]
    return stations, demand, delivered


def charge_segments(ctx: Context, plan: FlightPlan) -> dict[str, list[float]]:
    """Segment demands and delivered charges of a plan, for debug output."""
    idx = [ctx.scenario.index[x] for x in plan.stops]
    _, demand, delivered = _segments(ctx, idx, plan.charges)
    return {"demand_wh": demand, "delivered_wh": delivered}
