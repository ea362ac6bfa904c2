"""Dense graph primitives for the tour construction.

Graphs are symmetric ``n x n`` weight matrices with ``inf`` for missing
edges. Every routine is deterministic: weights closer than ``EPS`` count as
equal and ties fall back to vertex/edge index order.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import MatchingContractError, NoSpanningTreeError, NotEulerianError

EPS = 1e-12
EXACT_MATCHING_LIMIT = 18


def _check_weights(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("weights must be a square matrix")
    if np.isnan(w).any() or (w < 0).any():
        raise ValueError("weights must be non-negative")
    if not np.array_equal(w, w.T):
        raise ValueError("weights must be symmetric")
    if np.any(np.diag(w) != 0):
        raise ValueError("diagonal weights must be zero")
    return w


@dataclass(frozen=True, eq=False)
class PathTable:
    dist: np.ndarray
    next_hop: np.ndarray  # next_hop[i, j]: vertex after i on the path to j, -1 if none

    def path(self, i: int, j: int) -> list[int]:
        if i == j:
            return [i]
        if self.next_hop[i, j] < 0:
            raise ValueError(f"no path between {i} and {j}")
        out = [i]
        while i != j:
            i = int(self.next_hop[i, j])
            out.append(i)
        return out


def all_pairs_shortest(weights: np.ndarray) -> PathTable:
    """Floyd-Warshall; an intermediate vertex only replaces a route when it is
    shorter by more than EPS, so lower-indexed intermediates win ties."""
    w = _check_weights(weights)
    n = w.shape[0]
    dist = w.copy()
    nxt = np.where(np.isfinite(w), np.arange(n)[None, :], -1)
    np.fill_diagonal(nxt, np.arange(n))
    for k in range(n):
        via = dist[:, k, None] + dist[None, k, :]
        better = via < dist - EPS
        if better.any():
            dist = np.where(better, via, dist)
            nxt = np.where(better, nxt[:, k, None], nxt)
    dist.setflags(write=False)
    nxt.setflags(write=False)
    return PathTable(dist, nxt)


def _edge_order(a: tuple[float, int, int], b: tuple[float, int, int]) -> int:
    if a[0] < b[0] - EPS:
        return -1
    if b[0] < a[0] - EPS:
        return 1
    return (a[1:] > b[1:]) - (a[1:] < b[1:])


def minimum_spanning_tree(
    weights: np.ndarray, vertices: Sequence[int] | None = None
) -> list[tuple[int, int]]:
    """Kruskal over the finite edges among `vertices` (all by default).

    Returns edges ``(i, j)`` with ``i < j`` in the order they were accepted.
    """
    w = _check_weights(weights)
    vs = sorted(range(w.shape[0]) if vertices is None else set(vertices))
    if len(vs) <= 1:
        return []
    edges = [
        (float(w[i, j]), i, j)
        for i, j in itertools.combinations(vs, 2)
        if math.isfinite(w[i, j])
    ]
    edges.sort(key=lambda e: (e[1], e[2]))
    edges.sort(key=functools.cmp_to_key(_edge_order))

    parent = {v: v for v in vs}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = []
    for _, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
            tree.append((i, j))
            if len(tree) == len(vs) - 1:
                break
    if len(tree) != len(vs) - 1:
        raise NoSpanningTreeError("graph is disconnected; no spanning tree exists")
    return tree


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]
    weight: float
    exact: bool


def _matching_weight(w: np.ndarray, pairs: Iterable[tuple[int, int]]) -> float:
    return math.fsum(float(w[i, j]) for i, j in pairs)


def _exact_matching(w: np.ndarray, vs: list[int]) -> list[tuple[int, int]]:
    k = len(vs)
    full = (1 << k) - 1
    sub = w[np.ix_(vs, vs)]

    @functools.lru_cache(maxsize=None)
    def best(mask: int) -> tuple[float, tuple[tuple[int, int], ...]]:
        if mask == full:
            return 0.0, ()
        i = next(b for b in range(k) if not mask >> b & 1)
        result: tuple[float, tuple[tuple[int, int], ...]] | None = None
        for j in range(i + 1, k):
            if mask >> j & 1 or not math.isfinite(sub[i, j]):
                continue
            rest, pairs = best(mask | 1 << i | 1 << j)
            cost = sub[i, j] + rest
            if result is None or cost < result[0] - EPS:
                result = (cost, ((i, j),) + pairs)
        return result if result is not None else (math.inf, ())

    cost, pairs = best(0)
    best.cache_clear()
    if not math.isfinite(cost):
        raise MatchingContractError("no perfect matching with finite weight exists")
    return [(vs[i], vs[j]) for i, j in pairs]


def _greedy_matching(w: np.ndarray, vs: list[int]) -> list[tuple[int, int]]:
    edges = sorted(
        ((float(w[i, j]), i, j) for i, j in itertools.combinations(vs, 2)),
        key=functools.cmp_to_key(_edge_order),
    )
    used: set[int] = set()
    pairs = []
    for c, i, j in edges:
        if i not in used and j not in used and math.isfinite(c):
            pairs.append((i, j))
            used.update((i, j))
    if len(used) != len(vs):
        raise MatchingContractError("greedy matching could not pair every vertex")
    # 2-opt: re-pair two matched edges whenever that lowers the total
    improved = True
    while improved:
        improved = False
        for a, b in itertools.combinations(range(len(pairs)), 2):
            (p, q), (r, s) = pairs[a], pairs[b]
            cur = w[p, q] + w[r, s]
            for x, y in (((p, r), (q, s)), ((p, s), (q, r))):
                if w[x] + w[y] < cur - EPS:
                    pairs[a], pairs[b] = tuple(sorted(x)), tuple(sorted(y))
                    improved = True
                    break
            if improved:
                break
    return sorted(pairs)


def min_weight_perfect_matching(
    weights: np.ndarray, subset: Sequence[int], exact_limit: int = EXACT_MATCHING_LIMIT
) -> Matching:
    """Minimum-weight perfect matching on `subset`.

    Exact bitmask dynamic programming up to `exact_limit` vertices; above that
    a greedy pairing refined by pairwise swaps, reported with ``exact=False``.
    """
    w = _check_weights(weights)
    vs = sorted(set(subset))
    if len(vs) != len(subset):
        raise MatchingContractError("matching subset contains duplicates")
    if len(vs) % 2:
        raise MatchingContractError(f"matching needs an even vertex set, got {len(vs)}")
    if not vs:
        return Matching((), 0.0, True)
    if len(vs) <= exact_limit:
        pairs = _exact_matching(w, vs)
        exact = True
    else:
        pairs = _greedy_matching(w, vs)
        exact = False
    pairs = sorted(tuple(sorted(p)) for p in pairs)
    return Matching(tuple(pairs), _matching_weight(w, pairs), exact)


def eulerian_tour(edges: Sequence[tuple[int, int]], start: int) -> list[int]:
    """Closed walk using every edge of the multigraph once, from `start`.

    Hierholzer's algorithm, always leaving a vertex along its lowest-numbered
    unused edge (neighbour index first, then edge position).
    """
    if not edges:
        return [start]
    adj: dict[int, list[tuple[int, int]]] = {}
    for e, (u, v) in enumerate(edges):
        if u == v:
            raise NotEulerianError(f"self-loop at vertex {u}")
        adj.setdefault(u, []).append((v, e))
        adj.setdefault(v, []).append((u, e))
    odd = sorted(v for v, nb in adj.items() if len(nb) % 2)
    if odd:
        raise NotEulerianError(f"odd-degree vertices: {odd}")
    if start not in adj:
        raise NotEulerianError(f"start vertex {start} has no edges")
    for nb in adj.values():
        nb.sort()
    used = [False] * len(edges)
    ptr = {v: 0 for v in adj}
    stack = [start]
    tour: list[int] = []
    while stack:
        v = stack[-1]
        nb = adj[v]
        while ptr[v] < len(nb) and used[nb[ptr[v]][1]]:
            ptr[v] += 1
        if ptr[v] == len(nb):
            tour.append(stack.pop())
        else:
            u, e = nb[ptr[v]]
            used[e] = True
            stack.append(u)
    if not all(used):
        raise NotEulerianError("edge set is not connected")
    tour.reverse()
    return tour
