"""Heat kernel from any parametrix by time quadrature.

    H_G = H + H * F,   F = Σ_{ℓ≥1} (−1)^ℓ (L_{G,x}H)^{*ℓ}

The parametrix is sampled over a ball around x on a uniform time grid. The
convolution powers are built level by level by the Volterra recurrence, and
the grid is doubled until the Richardson estimate meets the tolerance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from graph_core.errors import InvalidParams, NegativeTime, QuadratureNotConverged, RegionTooSmall
from graph_core.graph import GraphSource, Vertex, WeightedGraph
from kernels.parametrix import BallSampler, Parametrix
from metrics.distances import combinatorial_distance

from .convolution import convolution_bound, volterra_step
from .grid import TimeGrid
from .neumann import KernelEstimate, neumann_tail_order, series_tail

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_GRID_CAP = 4096
INITIAL_GRID = 16
SPATIAL_SHARE = 0.25
SERIES_SHARE = 0.25
QUADRATURE_SHARE = 0.5
MAX_BALL_ROUNDS = 8


@dataclass(frozen=True)
class _Node:
    weighted: object  # K(·,·;s)·diag(θ), dense or sparse
    column: np.ndarray  # K(·,y;s)
    row: np.ndarray  # H(x,·;s)·θ


@dataclass
class _Ball:
    region: WeightedGraph
    sampler: BallSampler
    radius: int
    ix: int
    iy: int
    truncated: bool
    spatial_weight: float = 0.0


def _check_time(t: float) -> float:
    t = float(t)
    if math.isnan(t) or math.isinf(t):
        raise InvalidParams(f"t must be finite, got {t}")
    if t < 0:
        raise NegativeTime(f"t = {t} is negative")
    return t


def _ball(g: GraphSource, P: Parametrix, x: Vertex, y: Vertex, radius: int, tail_tol: float) -> _Ball:
    """Materialize ball(x, R+1) and sample over ball(x, R), where R covers
    the parametrix support (or the chain length for local ones) and y."""
    d_xy = combinatorial_distance(g, x, y)
    radius = max(radius, int(d_xy), 1)
    region = g.ball(x, radius + 1)
    inner_ball = region.ball(x, radius)
    hops = inner_ball.hop_distances(x)
    window_edge = [b for b in g.boundary if hops.get(b, math.inf) <= radius]
    if window_edge:
        raise RegionTooSmall(
            f"window boundary {sorted(window_edge)[:3]} lies within {radius} hops of {x!r}; use a larger window"
        )
    inner = inner_ball.vertices
    sampler = P.sampler(region, inner)
    truncated = bool(inner_ball.boundary)
    spatial_weight = tail_tol if truncated and not P.local else 0.0
    return _Ball(region, sampler, radius, inner.index(x), inner.index(y), truncated, spatial_weight)


def _sample(ball: _Ball, s: float) -> _Node:
    theta = ball.sampler.theta
    K = ball.sampler.heat_op(s)
    if sp.issparse(K):
        weighted = sp.csr_matrix(K.multiply(theta[None, :]))
        column = np.asarray(K[:, ball.iy].toarray()).ravel()
    else:
        weighted = K * theta[None, :]
        column = K[:, ball.iy].copy()
    row = ball.sampler.eval(s)[ball.ix] * theta
    return _Node(weighted, column, row)


def _row_norm(weighted) -> float:
    if sp.issparse(weighted):
        return float(abs(weighted).sum(axis=1).max()) if weighted.shape[0] else 0.0
    return float(np.abs(weighted).sum(axis=1).max()) if weighted.shape[0] else 0.0


class _Quadrature:
    """Samples cached by exact node position, so refining the grid only
    evaluates the new midpoints."""

    def __init__(self, ball: _Ball, t: float):
        self.ball = ball
        self.t = t
        self._nodes: dict[Fraction, _Node] = {}

    def nodes(self, m: int) -> list[_Node]:
        out = []
        for d in range(m + 1):
            key = Fraction(d, m)
            node = self._nodes.get(key)
            if node is None:
                node = _sample(self.ball, self.t * d / m)
                self._nodes[key] = node
            out.append(node)
        return out

    @property
    def sampled(self) -> list[_Node]:
        return list(self._nodes.values())

    def correction(self, m: int, L: int) -> float:
        """Σ_j w_j H(x,·;t−t_j)θ · F(·,y;t_j) with F truncated after order L."""
        if L == 0:
            return 0.0
        nodes = self.nodes(m)
        grid = TimeGrid(self.t, m)
        weighted = [n.weighted for n in nodes]
        G = np.column_stack([n.column for n in nodes])
        F = -G
        for ell in range(2, L + 1):
            G = volterra_step(weighted, G, grid.h)
            F = F + G if ell % 2 == 0 else F - G
        E = np.vstack([n.row for n in reversed(nodes)])
        integrand = np.einsum("jn,nj->j", E, F)
        return float(grid.trapezoid_weights(m) @ integrand)


def _support_hops(P: Parametrix, x: Vertex, t: float, tail_tol: float) -> int:
    return max(1, math.ceil(P.support_radius(x, t, tail_tol) / P.min_step))


def _initial_radius(P: Parametrix, x: Vertex, t: float, tol: float, series_order: int | None) -> tuple[int, float]:
    tail_tol = tol * SPATIAL_SHARE
    if P.local:
        C = P.lh_bound(t)
        norm1 = P.params.get("norm1_bound", 2 * P.bounds.A)
        L = series_order if series_order is not None else neumann_tail_order(C, norm1, t, P.order_k, tol * SERIES_SHARE)
        return max(L, 1), tail_tol
    return _support_hops(P, x, t, tail_tol), tail_tol


@dataclass
class _Setup:
    ball: _Ball
    quad: _Quadrature
    C: float
    norm1: float
    h1: float
    L: int
    amplification: float  # t·C·e^{norm1 t}·(1 + h1)


def _setup(
    g: GraphSource, P: Parametrix, x: Vertex, y: Vertex, t: float, tol: float, series_order: int | None
) -> _Setup:
    """Grow the ball until the spatial tail and the series tail each fit
    their share of ``tol``, given the norms sampled on the ball."""
    radius, tail_tol = _initial_radius(P, x, t, tol, series_order)
    C = P.lh_bound(t)
    k = P.order_k
    for _ in range(MAX_BALL_ROUNDS):
        ball = _ball(g, P, x, y, radius, tail_tol)
        quad = _Quadrature(ball, t)
        quad.nodes(INITIAL_GRID)
        norm1 = max(_row_norm(n.weighted) for n in quad.sampled) + ball.spatial_weight * C
        h1 = max(float(np.abs(n.row).sum()) for n in quad.sampled)
        amplification = t * C * math.exp(norm1 * t) * (1 + h1)
        if series_order is not None:
            L = series_order
        else:
            series_tol = min(tol / 2, tol * SERIES_SHARE / max(h1 * t, 1e-300))
            L = neumann_tail_order(C, norm1, t, k, series_tol)

        grow = False
        if P.local and L > ball.radius:
            radius, grow = L, True
        if ball.spatial_weight * amplification > tol * SPATIAL_SHARE:
            tail_tol = tol * SPATIAL_SHARE / (2 * amplification)
            radius, grow = max(radius, _support_hops(P, x, t, tail_tol)), True
        if not grow:
            return _Setup(ball, quad, C, norm1, h1, L, amplification)
        log.debug("ball around %r grows to radius %d (tail weight %.3g)", x, radius, tail_tol)
    raise RegionTooSmall(
        f"no ball around {x!r} keeps the truncation error of ({x!r},{y!r},t={t}) within {tol:.3g} "
        f"after {MAX_BALL_ROUNDS} enlargements"
    )


def _evaluate(
    g: GraphSource,
    P: Parametrix,
    x: Vertex,
    y: Vertex,
    t: float,
    tol: float,
    grid_cap: int,
    series_order: int | None,
) -> tuple[float, float, KernelEstimate]:
    """Returns (H(x,y;t), (H*F)(x,y;t), estimate of their sum)."""
    if not tol > 0:
        raise InvalidParams(f"tol must be > 0, got {tol}")
    if series_order is not None and series_order < 0:
        raise InvalidParams(f"series order must be >= 0, got {series_order}")
    t = _check_time(t)
    base = P.eval(x, y, t)
    if t == 0:
        return base, 0.0, KernelEstimate(base, 0, 0.0)
    if math.isinf(combinatorial_distance(g, x, y)):
        return base, 0.0, KernelEstimate(base, 0, 0.0, diagnostics={"connected": False})

    s = _setup(g, P, x, y, t, tol, series_order)
    ball, quad, C, norm1, h1, L = s.ball, s.quad, s.C, s.norm1, s.h1, s.L
    k = P.order_k
    quad_tol = tol * QUADRATURE_SHARE

    m = INITIAL_GRID
    coarse = quad.correction(m // 2, L)
    while True:
        fine = quad.correction(m, L)
        error = abs(fine - coarse) / 3
        log.debug("quadrature (%r,%r,t=%g): m=%d correction=%.17g err=%.3g", x, y, t, m, fine, error)
        if error <= quad_tol:
            break
        if 2 * m > grid_cap:
            raise QuadratureNotConverged(
                f"time quadrature for ({x!r},{y!r},t={t}) at {m} intervals has error {error:.3g} > {quad_tol:.3g}"
            )
        coarse, m = fine, 2 * m
    correction = fine + (fine - coarse) / 3

    growth = C * math.exp(norm1 * t)
    s_tail = h1 * t * series_tail(C, norm1, t, k, L)
    spatial = ball.spatial_weight * s.amplification
    bound = convolution_bound(h1, growth, 0, k, t)
    if abs(correction) > bound + error:
        log.warning("correction %.3g at (%r,%r,t=%g) exceeds its a-priori bound %.3g", correction, x, y, t, bound)
    est = KernelEstimate(
        base + correction, L, s_tail, spatial, error,
        diagnostics={
            "parametrix": P.name,
            "grid_intervals": m,
            "ball_radius": ball.radius,
            "ball_vertices": len(ball.sampler.inner),
            "norm1": norm1,
            "lh_bound": C,
            "h1": h1,
            "correction": correction,
            "correction_bound": bound,
            "forced_order": series_order is not None,
        },
    )
    log.debug("general kernel (%r,%r,t=%g) via %s: L=%d, m=%d, %d vertices", x, y, t, P.name, L, m, len(ball.sampler.inner))
    return base, correction, est


def heat_kernel_general(
    g: GraphSource,
    P: Parametrix,
    x: Vertex,
    y: Vertex,
    t: float,
    tol: float = DEFAULT_TOL,
    *,
    grid_cap: int = DEFAULT_GRID_CAP,
    series_order: int | None = None,
) -> KernelEstimate:
    """H_G(x,y;t) = H(x,y;t) + (H*F)(x,y;t) for any parametrix ``P``."""
    return _evaluate(g, P, x, y, t, tol, grid_cap, series_order)[2]


def parametrix_correction(
    g: GraphSource,
    P: Parametrix,
    x: Vertex,
    y: Vertex,
    t: float,
    tol: float = DEFAULT_TOL,
    *,
    grid_cap: int = DEFAULT_GRID_CAP,
) -> KernelEstimate:
    """(H*F)(x,y;t) alone; it is O(t^{k+1}) for a parametrix of order k."""
    base, correction, est = _evaluate(g, P, x, y, t, tol, grid_cap, None)
    return KernelEstimate(
        correction, est.series_order_L, est.series_tail_bound, est.spatial_tail_bound,
        est.quadrature_error_estimate, diagnostics=dict(est.diagnostics, parametrix_value=base),
    )
