"""Local search over the stop sequence of a repaired plan."""

from __future__ import annotations

import logging
from typing import Iterator, Sequence

from ..errors import CannotFixChargeError
from .plan import Context, FlightPlan, full_recharge, full_recharge_feasible, make_plan
from .repair import expand_shortest, fix_charge

log = logging.getLogger(__name__)


def evaluate(ctx: Context, seq: Sequence[int]) -> tuple[FlightPlan, float] | None:
    """Minimal-charge plan flying `seq` along cheapest legs, and its modified
    cost; None if full recharging cannot keep it feasible."""
    if not full_recharge_feasible(ctx, seq):
        return None
    s = ctx.scenario
    route = expand_shortest(ctx, seq)
    route = [v for k, v in enumerate(route) if k == 0 or v != route[k - 1]]
    rough = make_plan(s, route, full_recharge(s, ctx.cm, route), ctx.speed)
    try:
        charges = fix_charge(ctx, rough)
    except CannotFixChargeError:
        return None
    return make_plan(s, route, charges, ctx.speed), ctx.dhat(route)


def _dedupe(seq: list[int]) -> list[int]:
    return [v for k, v in enumerate(seq) if k == 0 or v != seq[k - 1]]


def neighbours(ctx: Context, seq: Sequence[int]) -> Iterator[list[int]]:
    """Candidate sequences one move away, in a fixed order: drop a station,
    swap a station for another, insert a station, relocate a stop, reverse
    a stretch. The base stays at both ends."""
    s = ctx.scenario
    seq = list(seq)
    m = len(seq)
    inner = range(1, m - 1)
    for k in inner:
        if s.is_station(seq[k]):
            yield _dedupe(seq[:k] + seq[k + 1:])
    for k in inner:
        if s.is_station(seq[k]):
            for c in s.stations:
                if c != seq[k]:
                    yield _dedupe(seq[:k] + [c] + seq[k + 1:])
    for k in range(m - 1):
        for c in s.stations:
            if c not in (seq[k], seq[k + 1]):
                yield seq[: k + 1] + [c] + seq[k + 1:]
    for i in inner:
        rest = seq[:i] + seq[i + 1:]
        for j in range(1, m - 1):
            if j != i:
                yield _dedupe(rest[:j] + [seq[i]] + rest[j:])
    for i in inner:
        for j in range(i + 1, m - 1):
            yield _dedupe(seq[:i] + seq[i : j + 1][::-1] + seq[j + 1:])


def improve(
    ctx: Context, plan: FlightPlan, dhat_cap: float, max_moves: int = 200
) -> FlightPlan:
    """First-improvement descent on trip time.

    A move is taken only if it shortens the trip and keeps the modified cost
    at or below `dhat_cap`, so any ratio guarantee of the starting plan is
    kept. Stops after `max_moves` accepted moves.
    """
    s = ctx.scenario
    seq = [s.index[x] for x in plan.stops]
    best = plan
    cap = dhat_cap * (1 + 1e-12) + ctx.tol
    for _ in range(max_moves):
        eps = 1e-9 * max(1.0, best.objective_s)
        for cand in neighbours(ctx, seq):
            result = evaluate(ctx, cand)
            if result is None:
                continue
            trial, dhat = result
            if trial.objective_s < best.objective_s - eps and dhat <= cap:
                best, seq = trial, [s.index[x] for x in trial.stops]
                break
        else:
            return best
    log.info("local search stopped after %d moves", max_moves)
    return best
