"""Heat kernel from the Dirac parametrix, evaluated exactly.

    H_G(x,y;t) = Σ_{ℓ≥0} (−t)^ℓ/ℓ! · c_ℓ(x,y) / θ(y),   c_ℓ = (Δ^ℓ)_{xy}

Each order is a sparse chain sum, so no time quadrature is involved. Long or
large-time series alternate strongly and are accumulated in extended
precision.
"""

from __future__ import annotations

import logging
import math

import mpmath
import numpy as np

from graph_core.assumptions import standing_bounds
from graph_core.errors import InvalidParams, NegativeTime
from graph_core.graph import GraphSource, Vertex
from kernels.chains import chain_coefficient, chain_region, chain_rows, chain_rows_mp
from metrics.distances import combinatorial_distance

from .neumann import KernelEstimate, neumann_tail_order

log = logging.getLogger(__name__)

EXTENDED_ORDER = 40
EXTENDED_TIME = 4.0
EXTENDED_SPREAD = 6.0


def _check_time(t: float) -> float:
    t = float(t)
    if math.isnan(t) or math.isinf(t):
        raise InvalidParams(f"t must be finite, got {t}")
    if t < 0:
        raise NegativeTime(f"t = {t} is negative")
    return t


def dirac_series_tail(A: float, t: float, L: int, theta_y: float) -> float:
    """(2At)^{L+1}/(L+1)! · e^{2At} / θ(y): the orders above L, since every row
    of Δ has absolute sum 2μ/θ ≤ 2A."""
    s = 2 * A * t
    if s == 0:
        return 0.0
    return math.exp((L + 1) * math.log(s) - math.lgamma(L + 2) + s) / theta_y


def needs_extended_precision(L: int, t: float, A: float) -> bool:
    return L > EXTENDED_ORDER or t > EXTENDED_TIME or 2 * A * t > EXTENDED_SPREAD


def _series_order(g: GraphSource, t: float, tol: float, series_order: int | None):
    bounds = standing_bounds(g)
    A, M, eta = bounds.A, bounds.M, bounds.eta
    if series_order is not None:
        if series_order < 0:
            raise InvalidParams(f"series order must be >= 0, got {series_order}")
        return series_order, A, M, eta, True
    return neumann_tail_order(M / eta if M else 0.0, 2 * A, t, 0, tol), A, M, eta, False


def _sum_rows(region, x: Vertex, t: float, L: int, A: float) -> tuple[np.ndarray, str]:
    """Σ_{ℓ=0..L} (−t)^ℓ/ℓ! e_xᵀΔ^ℓ over ``region``."""
    if needs_extended_precision(L, t, A):
        ctx = mpmath.ctx_mp.MPContext()
        ctx.dps = 20 + math.ceil(2 * A * t / math.log(10))
        tt = ctx.mpf(t)
        total = None
        coeff = ctx.one
        for ell, row in enumerate(chain_rows_mp(region, x, L, ctx)):
            if ell:
                coeff = coeff * (-tt) / ell
            total = [coeff * v for v in row] if total is None else [a + coeff * v for a, v in zip(total, row)]
        return np.array([float(v) for v in total]), f"mpmath:{ctx.dps}"
    total = np.zeros(len(region))
    coeff = 1.0
    for ell, row in enumerate(chain_rows(region, x, L)):
        if ell:
            coeff *= -t / ell
        total += coeff * row
    return total, "float64"


def dirac_kernel_row(
    g: GraphSource,
    x: Vertex,
    t: float,
    tol: float = 1e-12,
    *,
    series_order: int | None = None,
) -> tuple[dict[Vertex, float], KernelEstimate]:
    """The whole row y ↦ H(x,y;t) from one chain recursion.

    Returns the values at every vertex of the chain region and an estimate
    whose tail bound is the largest over the row.
    """
    t = _check_time(t)
    g.theta(x)
    if t == 0:
        est = KernelEstimate(1.0 / g.theta(x), 0, 0.0, diagnostics={"precision": "exact"})
        return {x: 1.0 / g.theta(x)}, est
    L, A, M, eta, forced = _series_order(g, t, tol, series_order)
    region = chain_region(g, x, L)
    total, precision = _sum_rows(region, x, t, L, A)
    theta = region.theta_array
    values = total / theta
    row = dict(zip(region.vertices, values.tolist()))
    tail = dirac_series_tail(A, t, L, float(theta.min()))
    est = KernelEstimate(
        float(values[region.index[x]]), L, tail,
        diagnostics={"precision": precision, "ball_vertices": len(region), "forced_order": forced},
    )
    return row, est


def heat_kernel_dirac(
    g: GraphSource,
    x: Vertex,
    y: Vertex,
    t: float,
    tol: float = 1e-12,
    *,
    series_order: int | None = None,
) -> KernelEstimate:
    """H_G(x,y;t) through the order L chosen by the Neumann tail bound
    (C = M/η, ‖L_{G,x}H‖₁ ≤ 2A, k = 0), or a forced ``series_order``."""
    t = _check_time(t)
    theta_y = g.theta(y)
    theta_x = g.theta(x)
    if t == 0:
        value = 1.0 / theta_x if x == y else 0.0
        return KernelEstimate(value, 0, 0.0, diagnostics={"precision": "exact"})
    L, A, M, eta, forced = _series_order(g, t, tol, series_order)
    region = chain_region(g, x, L, y)
    tail = dirac_series_tail(A, t, L, theta_y)
    if y not in region:
        return KernelEstimate(0.0, L, tail, diagnostics={"ball_vertices": len(region), "forced_order": forced})
    total, precision = _sum_rows(region, x, t, L, A)
    value = float(total[region.index[y]]) / theta_y
    log.debug("dirac kernel (%r,%r,t=%g): L=%d, %d vertices, %s", x, y, t, L, len(region), precision)
    return KernelEstimate(
        value, L, tail,
        diagnostics={"precision": precision, "ball_vertices": len(region), "forced_order": forced},
    )


def small_time_leading_term(g: GraphSource, x: Vertex, y: Vertex, t: float) -> tuple[float, float]:
    """(−1)^r t^r/r! · c_r(x,y)/θ(y) for r = d(x,y) ≥ 1, with a bound on the
    remainder |H_G − leading term| from the orders above r."""
    t = _check_time(t)
    r = combinatorial_distance(g, x, y)
    if r == 0 or math.isinf(r):
        raise InvalidParams(f"small-time term needs 1 <= d(x,y) < inf, got {r}")
    r = int(r)
    theta_y = g.theta(y)
    if t == 0:
        return 0.0, 0.0
    c_r = chain_coefficient(g, x, y, r)
    approx = (-1) ** r * math.exp(r * math.log(t) - math.lgamma(r + 1)) * c_r / theta_y
    A = standing_bounds(g).A
    return approx, dirac_series_tail(A, t, r, theta_y)

