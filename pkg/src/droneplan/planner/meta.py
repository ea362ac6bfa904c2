"""Battery-feasible "meta" distances between locations, relaying through stations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import graphkit
from .plan import Context


@dataclass(frozen=True, eq=False)
class MetaDistances:
    d_tilde: np.ndarray
    witness: dict[tuple[int, int], tuple[int, ...]]
    near_dist: np.ndarray
    near_station: list[int | None]

    def path(self, u: int, v: int) -> tuple[int, ...]:
        if u == v:
            return (u,)
        return self.witness[(u, v)]


def _dedupe(path: list[int]) -> tuple[int, ...]:
    out = [path[0]]
    for v in path[1:]:
        if v != out[-1]:
            out.append(v)
    return tuple(out)


def init_distances(ctx: Context) -> MetaDistances:
    """Meta distance and witness path for every pair of locations.

    A pair is joined directly when dhat(u,v) <= U - dhat_u - dhat_v, which
    leaves enough charge at v to reach its nearest station. Otherwise the
    drone relays: u to a first station within U - dhat_u, station hops of at
    most U, and a last station within U - dhat_v of v. Pairs with no such
    route get an infinite meta distance.
    """
    s = ctx.scenario
    n = len(s.locations)
    dhat = ctx.table.dist
    U = ctx.U
    tol = ctx.tol
    nd = ctx.near_dist
    stations = s.stations

    # shortest routes inside the station graph (hops of at most U)
    k = len(stations)
    hop = np.full((k, k), math.inf)
    for a, z in enumerate(stations):
        for b, z2 in enumerate(stations):
            if a == b or dhat[z, z2] <= U + tol:
                hop[a, b] = 0.0 if a == b else float(dhat[z, z2])
    relay = graphkit.all_pairs_shortest(hop) if k else None

    def _route(u: int, v: int, first: list[int]) -> tuple[float, tuple[int, ...]] | None:
        if dhat[u, v] <= U - nd[u] - nd[v] + tol:
            return float(dhat[u, v]), (u, v)
        if relay is None:
            return None
        best = None
        for a in first:
            for b, zb in enumerate(stations):
                mid = relay.dist[a, b]
                if not (dhat[zb, v] <= U - nd[v] + tol and math.isfinite(mid)):
                    continue
                cost = float(dhat[u, stations[a]]) + float(mid) + float(dhat[zb, v])
                if best is None or cost < best[0] - graphkit.EPS:
                    best = (cost, a, b)
        if best is None:
            return None
        cost, a, b = best
        hops = [stations[c] for c in relay.path(a, b)]
        return cost, _dedupe([u, *hops, v])

    d_tilde = np.full((n, n), math.inf)
    witness: dict[tuple[int, int], tuple[int, ...]] = {}
    for u in range(n):
        d_tilde[u, u] = 0.0
    for u in range(n):
        first = [a for a, z in enumerate(stations) if dhat[u, z] <= U - nd[u] + tol]
        for v in range(u + 1, n):
            route = _route(u, v, first)
            if route is None:
                continue
            cost, path = route
            d_tilde[u, v] = d_tilde[v, u] = cost
            witness[(u, v)] = path
            witness[(v, u)] = path[::-1]
    d_tilde.setflags(write=False)
    return MetaDistances(d_tilde, witness, ctx.near_dist, ctx.near_station)
