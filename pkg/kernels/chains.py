"""Chain sums of the Laplacian kernel.

c_ℓ(x,y) = Σ_{z_1..z_{ℓ−1}} δ_x(z_1) δ_{z_1}(z_2) ⋯ δ_{z_{ℓ−1}}(y) = (Δ^ℓ)_{xy}

Rows e_xᵀΔ^ℓ are produced by repeated sparse application of Δ, in double
precision or in an mpmath context of chosen precision. Only vertices within
ℓ hops of x enter, so a materialized ball is enough as long as no chain of
length ≤ ℓ from x passes a truncated (boundary) vertex before its last step.
A chain from x to y meets a vertex b before its last step only if its length
is at least max(2·d(x,b) − d(x,y), d(x,b) + 1).
"""

from __future__ import annotations

import logging
import math
from typing import Iterator

import mpmath
import numpy as np

from graph_core.errors import InvalidParams, RegionTooSmall
from graph_core.graph import GraphSource, IntensionalGraph, Vertex, WeightedGraph

log = logging.getLogger(__name__)


def _exact_through(d_boundary: float, r: float | None, L: int) -> bool:
    if d_boundary >= L:
        return True
    return r is not None and 2 * d_boundary - r > L


def chain_region(g: GraphSource, x: Vertex, L: int, y: Vertex | None = None) -> WeightedGraph:
    """Ball around ``x`` on which chains of length ≤ L from x are exact,
    at ``y`` or (``y=None``) at every vertex.

    Raises :class:`RegionTooSmall` when a stored window's boundary is too
    close. Intensional graphs are materialized just far enough.
    """
    if L < 0:
        raise InvalidParams(f"chain length must be >= 0, got {L}")
    if isinstance(g, IntensionalGraph):
        radius = L
        if y is not None:
            r = g.hop_distance(x, y, L + 1)
            if math.isfinite(r):
                radius = min(L, (L + int(r)) // 2 + 1)
        return g.ball(x, radius)

    hops = g.hop_distances(x)
    if g.boundary:
        r = None if y is None else hops.get(y, math.inf)
        for b in sorted(g.boundary):
            d = hops.get(b)
            if d is not None and not _exact_through(d, r, L):
                raise RegionTooSmall(
                    f"window boundary vertex {b!r} is {d} hops from {x!r}; chains of length {L} reach it"
                )
    return g.ball(x, L)


def _csr_rows(region: WeightedGraph) -> list[list[tuple[int, float]]]:
    lap = region.laplacian_matrix
    return [
        list(zip(lap.indices[lap.indptr[i]:lap.indptr[i + 1]].tolist(), lap.data[lap.indptr[i]:lap.indptr[i + 1]].tolist()))
        for i in range(lap.shape[0])
    ]


def chain_rows(region: WeightedGraph, x: Vertex, L: int) -> Iterator[np.ndarray]:
    """Yield e_xᵀΔ^ℓ for ℓ = 0..L over ``region.vertices`` in double precision."""
    lap_t = region.laplacian_matrix.T.tocsr()
    row = np.zeros(len(region))
    row[region.index[x]] = 1.0
    yield row
    for _ in range(L):
        row = lap_t @ row
        yield row


def chain_rows_mp(region: WeightedGraph, x: Vertex, L: int, ctx: mpmath.ctx_mp.MPContext) -> Iterator[list]:
    """As :func:`chain_rows` with mpmath numbers of the context's precision."""
    rows = _csr_rows(region)
    entries = [[(j, ctx.mpf(v)) for j, v in row] for row in rows]
    n = len(region)
    row = [ctx.zero] * n
    row[region.index[x]] = ctx.one
    yield row
    for _ in range(L):
        nxt = [ctx.zero] * n
        for i, ri in enumerate(row):
            if ri:
                for j, v in entries[i]:
                    nxt[j] += ri * v
        row = nxt
        yield row


def chain_coefficient(g: GraphSource, x: Vertex, y: Vertex, ell: int) -> float:
    """c_ℓ(x,y): ℓ = 1 gives δ_x(y); zero when ℓ < d(x,y)."""
    if ell < 1:
        raise InvalidParams(f"chain length must be >= 1, got {ell}")
    g.theta(y)
    region = chain_region(g, x, ell, y)
    if y not in region:
        return 0.0
    *_, last = chain_rows(region, x, ell)
    return float(last[region.index[y]])


def chain_coefficients(g: GraphSource, x: Vertex, y: Vertex, L: int) -> list[float]:
    """[c_0, …, c_L] at (x, y) from one recursion (c_0 = δ_{x=y})."""
    g.theta(y)
    region = chain_region(g, x, L, y)
    if y not in region:
        return [0.0] * (L + 1)
    j = region.index[y]
    return [float(row[j]) for row in chain_rows(region, x, L)]
