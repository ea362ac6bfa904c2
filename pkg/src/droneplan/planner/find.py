"""Christofides-style tour construction with recharging repair."""

from __future__ import annotations

import logging

import numpy as np

from .. import graphkit
from ..errors import (
    DronePlanError,
    InfeasibleScenarioError,
    MatchingContractError,
    NoSpanningTreeError,
)
from ..scenario import Scenario, validate
from .bounds import additive_term_s, check_cost_bounds, ratio_bound
from .meta import MetaDistances, init_distances
from .plan import Context, FlightPlan, PlanReport, check_feasibility, make_plan
from .local import improve
from .repair import charge_segments, fix_charge, fix_plan

log = logging.getLogger(__name__)


def christofides_tour(
    ctx: Context, meta: MetaDistances, exact_limit: int = graphkit.EXACT_MATCHING_LIMIT
) -> tuple[list[int], graphkit.Matching]:
    """Euler tour of MST + odd-vertex matching over the base and the sites.

    Stations are not spanned; they enter the plan through meta-edge witness
    paths. Matching edges use the shortest chain of meta edges, so pairs with
    no direct meta edge can still be matched.
    """
    s = ctx.scenario
    terminals = sorted([s.base, *s.sites])
    try:
        tree = graphkit.minimum_spanning_tree(meta.d_tilde, terminals)
    except NoSpanningTreeError:
        raise InfeasibleScenarioError(
            "some sites cannot be connected within the battery range"
        ) from None
    degree = {v: 0 for v in terminals}
    for u, v in tree:
        degree[u] += 1
        degree[v] += 1
    odd = [v for v in terminals if degree[v] % 2]

    closure = graphkit.all_pairs_shortest(np.asarray(meta.d_tilde))
    try:
        matching = graphkit.min_weight_perfect_matching(closure.dist, odd, exact_limit)
    except MatchingContractError as exc:
        raise InfeasibleScenarioError(str(exc)) from None

    edges = list(tree)
    for u, v in matching.pairs:
        chain = closure.path(u, v)
        edges.extend(zip(chain, chain[1:]))
    return graphkit.eulerian_tour(edges, s.base), matching


def find_plan(
    s: Scenario,
    speed: float | None = None,
    exact_limit: int = graphkit.EXACT_MATCHING_LIMIT,
    local_search: bool = True,
) -> tuple[FlightPlan, PlanReport]:
    """Plan a tour visiting every site with recharging stops.

    Pipeline: modified distances, meta distances, spanning tree plus matching,
    Euler tour, station-detour repair in both tour directions, then minimal
    charging. With `local_search`, the result is then refined by moves that
    shorten the trip without raising its modified cost.
    """
    ctx = Context.build(s, speed)
    alpha = validate(s, ctx.speed)
    meta = init_distances(ctx)
    if not s.sites:
        tour = [s.base]
        matching = graphkit.Matching((), 0.0, True)
    else:
        tour, matching = christofides_tour(ctx, meta, exact_limit)
    if not matching.exact:
        log.warning("matching fell back to the greedy heuristic; ratio guarantee void")

    # the reversed Euler tour is an Euler tour of the same multigraph; repair
    # and refine both, keeping the faster plan, the forward one winning ties
    best = None
    for direction in (tour, tour[::-1]):
        repaired = fix_plan(ctx, meta, direction)
        idx = [s.index[x] for x in repaired.stops]
        candidate = make_plan(s, idx, fix_charge(ctx, repaired), ctx.speed)
        repaired_s = candidate.objective_s
        if local_search:
            candidate = improve(ctx, candidate, ctx.dhat(idx))
        if best is None or candidate.objective_s < best[0].objective_s - 1e-9:
            best = (candidate, repaired, repaired_s, direction)
    plan, repaired, repaired_s, tour = best
    idx = [s.index[x] for x in plan.stops]

    feas = check_feasibility(s, plan)
    if not feas.ok:
        raise InfeasibleScenarioError(f"planned tour breaks the SoC window at stop {feas.violation}")
    bounds = check_cost_bounds(ctx, plan)
    report = PlanReport(
        objective_s=plan.objective_s,
        feasible=True,
        bound_case=bounds.case,
        time_bounds=(bounds.lower, bounds.upper),
        charge_cap_wh=bounds.charge_cap_wh,
        charge_cap_s=bounds.charge_cap_s,
        modified_cost_wh=ctx.dhat(idx),
        alpha=alpha,
        ratio_bound=ratio_bound(alpha),
        additive_term_s=additive_term_s(ctx),
        matching_exact=matching.exact,
        debug={
            "euler_tour": [s.locations[i].id for i in tour],
            "full_charge_plan": list(repaired.charges),
            "repaired_objective_s": repaired_s,
            **charge_segments(ctx, plan),
        },
    )
    return plan, report


def plan_variable_speed(s: Scenario, local_search: bool = True) -> tuple[FlightPlan, PlanReport]:
    """Try each speed option in ascending order until planning fails; keep the
    fastest trip, the lower speed winning ties."""
    best: tuple[FlightPlan, PlanReport] | None = None
    for speed in s.speed_options:
        try:
            result = find_plan(s, speed, local_search=local_search)
        except DronePlanError as exc:
            log.info("speed %.3f m/s infeasible: %s", speed, exc)
            break
        if best is None or result[0].objective_s < best[0].objective_s - 1e-9:
            best = result
    if best is None:
        raise InfeasibleScenarioError("no speed option yields a feasible plan")
    return best

