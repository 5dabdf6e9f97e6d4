"""Path distances on weighted graphs.

All searches are heap-based Dijkstra over ``(distance, vertex id)`` pairs, so
ties are broken by vertex id and results are reproducible. Unreachable
vertices are at distance ``math.inf``.

Edge costs for the built-in path metrics (u, v adjacent with weight w):

=================  ===============================================
combinatorial      1
intrinsic          min{1, min(θ(u), θ(v)) / w}^{1/2}
adapted            min{1, min(θ(u)/μ(u), θ(v)/μ(v))^{1/2}}
edge_weighted      w
=================  ===============================================
"""

from __future__ import annotations

import heapq
import logging
import math
from collections import deque
from typing import Callable

from graph_core.graph import GraphSource, IntensionalGraph, Vertex, WeightedGraph

log = logging.getLogger(__name__)

EdgeCost = Callable[[GraphSource, Vertex, Vertex, float], float]


def combinatorial_cost(g: GraphSource, u: Vertex, v: Vertex, w: float) -> float:
    return 1.0


def intrinsic_cost(g: GraphSource, u: Vertex, v: Vertex, w: float) -> float:
    return math.sqrt(min(1.0, min(g.theta(u), g.theta(v)) / w))


def adapted_cost(g: GraphSource, u: Vertex, v: Vertex, w: float) -> float:
    ratio = min(g.theta(u) / g.mu(u), g.theta(v) / g.mu(v))
    return min(1.0, math.sqrt(ratio))


def edge_weighted_cost(g: GraphSource, u: Vertex, v: Vertex, w: float) -> float:
    return w


def shortest_paths(
    g: GraphSource,
    source: Vertex,
    cost: EdgeCost,
    *,
    cutoff: float = math.inf,
    target: Vertex | None = None,
) -> dict[Vertex, float]:
    """Settled distances from ``source`` (all ≤ ``cutoff``).

    With a ``target`` the search stops once the target is settled. An
    intensional graph needs a finite cutoff or a target.
    """
    if isinstance(g, IntensionalGraph) and target is None and not math.isfinite(cutoff):
        raise ValueError("searching an intensional graph needs a cutoff or a target")
    g.theta(source)
    settled: dict[Vertex, float] = {}
    best = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled[u] = d
        if u == target:
            break
        for v, w in g.neighbors(u):
            if v in settled:
                continue
            nd = d + cost(g, u, v, w)
            if nd > cutoff:
                continue
            if nd < best.get(v, math.inf):
                best[v] = nd
                heapq.heappush(heap, (nd, v))
    return settled


def path_distance(g: GraphSource, x: Vertex, y: Vertex, cost: EdgeCost) -> float:
    g.theta(y)
    if x == y:
        g.theta(x)
        return 0.0
    return shortest_paths(g, x, cost, target=y).get(y, math.inf)


def combinatorial_distance(g: GraphSource, x: Vertex, y: Vertex) -> float:
    """Number of edges on a shortest path (breadth-first search)."""
    g.theta(x)
    g.theta(y)
    if x == y:
        return 0
    seen = {x: 0}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for v, _ in g.neighbors(u):
            if v not in seen:
                seen[v] = seen[u] + 1
                if v == y:
                    return seen[v]
                queue.append(v)
    return math.inf


def normalized_distance(g: GraphSource, x: Vertex, y: Vertex, A: float) -> float:
    """ρ_G = A^{-1/2} · d_G."""
    if not A > 0:
        raise ValueError(f"normalized distance needs A > 0, got {A}")
    return combinatorial_distance(g, x, y) / math.sqrt(A)


def intrinsic_distance(g: GraphSource, x: Vertex, y: Vertex) -> float:
    return path_distance(g, x, y, intrinsic_cost)


def adapted_distance(g: GraphSource, x: Vertex, y: Vertex) -> float:
    return path_distance(g, x, y, adapted_cost)


def edge_weighted_distance(g: GraphSource, x: Vertex, y: Vertex) -> float:
    return path_distance(g, x, y, edge_weighted_cost)


def min_edge_cost(g: WeightedGraph, cost: EdgeCost, source: GraphSource | None = None) -> float:
    """Smallest single-edge cost over the edges of ``g``.

    θ and μ are read from ``source`` (defaults to ``g``), so a ball cut out of
    a larger graph is costed with the full-graph degrees.
    """
    src = source if source is not None else g
    return min((cost(src, u, v, w) for u, v, w in g.edges()), default=math.inf)


def certified_search(g: GraphSource, x: Vertex, value: float, min_cost: float) -> bool:
    """Whether a distance ``value`` found inside the window ``g`` is the true
    distance in the graph the window was cut from.

    Any path leaving the window passes a boundary vertex and then at least one
    more edge, so it costs at least ``min_cost · (hops to boundary + 1)``.
    """
    if not isinstance(g, WeightedGraph) or not g.boundary:
        return True
    hops = g.hop_distances(x)
    to_boundary = min((hops[b] for b in g.boundary if b in hops), default=math.inf)
    certified = value <= min_cost * (to_boundary + 1)
    if not certified:
        log.warning("distance %.6g from %r is not certified by the window (boundary at %s hops)", value, x, to_boundary)
    return certified
