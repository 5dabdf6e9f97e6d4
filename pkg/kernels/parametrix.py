"""Parametrices for the heat operator L_G = Δ_G + ∂_t.

A parametrix of order k is a kernel H(x,y;t) with H(x,y;0) = δ_{x=y}/θ(x)
whose heat operator L_{G,x}H extends continuously to t = 0 and is bounded by
C(t₀)·t^k on (0, t₀]. Two constructions are provided:

* :func:`dirac_parametrix`: H = δ_{x=y}/θ(x), constant in time, so
  L_{G,x}H(x,y;t) = δ_x(y)/θ(y).
* :func:`gaussian_parametrix`: the dilated Gaussian
  H_d(x,y;t) = exp(−θ(x)θ(y)d²(x,y)/t) / √(θ(x)θ(y)) for a metric d with a
  certified lower bound δ on distinct pairs.

Besides pointwise oracles each parametrix hands out a sampler over a
materialized ball, producing the matrices the quadrature engine works with.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from graph_core.assumptions import AssumptionReport, standing_bounds
from graph_core.errors import InvalidParams, MetricLowerBoundMissing, NegativeTime
from graph_core.graph import GraphSource, Vertex, WeightedGraph, delta_kernel
from metrics.metric import Metric

log = logging.getLogger(__name__)

MAX_SUPPORT_STEPS = 1 << 20


@dataclass(frozen=True)
class Parametrix:
    name: str
    order_k: int
    eval: Callable[[Vertex, Vertex, float], float]
    heat_op: Callable[[Vertex, Vertex, float], float]
    support_radius: Callable[[Vertex, float, float], float]
    lh_bound: Callable[[float], float]
    sampler: Callable[[WeightedGraph, Sequence[Vertex]], "BallSampler"]
    bounds: AssumptionReport
    graph: GraphSource
    metric: Metric | None = None
    local: bool = False
    params: dict = field(default_factory=dict)

    @property
    def min_step(self) -> float:
        """Lower bound on the metric length of one edge (1 for the Dirac case)."""
        return self.metric.delta_lower if self.metric is not None else 1.0

    def eval_matrix(self, region: WeightedGraph, t: float) -> np.ndarray:
        """H(u,v;t) for u, v in ``region``."""
        return self.sampler(region, region.vertices).eval(t)

    def heat_op_matrix(self, region: WeightedGraph, inner: Sequence[Vertex], t: float) -> np.ndarray:
        """L_{G,u}H(u,v;t) for u, v in ``inner``; ``region`` must hold their neighbours."""
        K = self.sampler(region, inner).heat_op(t)
        return K.toarray() if sp.issparse(K) else K


class BallSampler:
    """Matrices of one parametrix over a fixed ball, rows and columns in
    ``inner`` order. Subclasses precompute whatever does not depend on t."""

    def __init__(self, region: WeightedGraph, inner: Sequence[Vertex]):
        missing = [v for v in inner if v not in region]
        if missing:
            raise InvalidParams(f"inner vertices {missing[:3]} are not in the region")
        self.region = region
        self.inner = tuple(inner)
        self.rows = [region.index[v] for v in self.inner]
        self.theta = region.theta_array[self.rows]

    def eval(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def heat_op(self, t: float):
        raise NotImplementedError


def _check_time(t: float) -> float:
    t = float(t)
    if math.isnan(t):
        raise InvalidParams("t is NaN")
    if t < 0:
        raise NegativeTime(f"t = {t} is negative")
    return t


# ---------------------------------------------------------------------
# Dirac delta
# ---------------------------------------------------------------------
class _DiracSampler(BallSampler):
    def __init__(self, region: WeightedGraph, inner: Sequence[Vertex]):
        super().__init__(region, inner)
        lap = region.laplacian_matrix[self.rows][:, self.rows]
        self._K = sp.csr_matrix(lap.multiply(1.0 / self.theta[None, :]))

    def eval(self, t: float) -> np.ndarray:
        _check_time(t)
        return np.diag(1.0 / self.theta)

    def heat_op(self, t: float) -> sp.csr_matrix:
        _check_time(t)
        return self._K


def dirac_parametrix(g: GraphSource) -> Parametrix:
    """Order-0 parametrix δ_{x=y}/θ(x); |L_{G,x}H| ≤ M/η."""
    bounds = standing_bounds(g)
    M, eta = bounds.M, bounds.eta

    def eval_(x: Vertex, y: Vertex, t: float) -> float:
        _check_time(t)
        theta_x = g.theta(x)
        g.theta(y)
        return 1.0 / theta_x if x == y else 0.0

    def heat_op(x: Vertex, y: Vertex, t: float) -> float:
        _check_time(t)
        return delta_kernel(g, x, y) / g.theta(y)

    def support_radius(x: Vertex, t: float, tail_tol: float) -> float:
        g.theta(x)
        return 1.0

    def lh_bound(t0: float) -> float:
        return M / eta

    return Parametrix(
        name="dirac", order_k=0, eval=eval_, heat_op=heat_op, support_radius=support_radius,
        lh_bound=lh_bound, sampler=_DiracSampler,
        bounds=bounds, graph=g, local=True, params={"norm1_bound": 2 * bounds.A},
    )


# ---------------------------------------------------------------------
# Dilated Gaussian
# ---------------------------------------------------------------------
def _log_tail_sum(log_term: Callable[[int], float], n0: int) -> float:
    """log Σ_{n≥n0} exp(log_term(n)) for log-concave terms.

    Summation stops once the ratio of consecutive terms drops below 1/2; the
    rest is bounded by the geometric series of that ratio.
    """
    logs = []
    n = n0
    prev = log_term(n)
    logs.append(prev)
    while n < n0 + MAX_SUPPORT_STEPS:
        n += 1
        cur = log_term(n)
        logs.append(cur)
        ratio = math.exp(cur - prev)
        if ratio < 0.5:
            # remaining terms ≤ cur·(ratio + ratio² + …) ≤ cur
            logs.append(cur)
            break
        prev = cur
    peak = max(logs)
    return peak + math.log(math.fsum(math.exp(v - peak) for v in logs))


def gaussian_tail(N: int, eta: float, delta: float, t: float, n0: int) -> float:
    """Σ_{n≥n0} N^{n+1} exp(−(η n δ)²/(2t)): weight outside the radius n0·δ."""
    if t == 0:
        return 0.0
    log_n = math.log(N) if N > 1 else 0.0
    return math.exp(_log_tail_sum(lambda n: (n + 1) * log_n - (eta * n * delta) ** 2 / (2 * t), n0))


def doubling_tail(C_d: float, theta_y: float, eta: float, delta: float, t: float, n0: int) -> float:
    """Σ_{n≥n0} C_d^{n+1} θ(y) exp(−η θ(y) (2^n δ)²/(2t)) / η: shells of radius 2^n δ."""
    if t == 0:
        return 0.0
    log_c = math.log(max(C_d, 1.0))
    log_pre = math.log(theta_y / eta)

    def log_term(n: int) -> float:
        return (n + 1) * log_c + log_pre - eta * theta_y * (2.0 ** min(n, 500) * delta) ** 2 / (2 * t)

    return math.exp(_log_tail_sum(log_term, n0))


def _smallest_index(tail: Callable[[int], float], tol: float) -> int:
    """Smallest n0 ≥ 1 with tail(n0) ≤ tol: doubling, then bisection."""
    if tail(1) <= tol:
        return 1
    lo, hi = 1, 2
    while tail(hi) > tol:
        lo, hi = hi, hi * 2
        if hi > MAX_SUPPORT_STEPS:
            raise InvalidParams(f"no truncation radius reaches tail tolerance {tol}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def _peak_time_bound(c_min: float, t0: float) -> float:
    """sup over c ≥ c_min and t ∈ (0, t0] of c t^{-2} e^{-c/t}."""
    if c_min <= 2 * t0:
        return 4.0 / (c_min * math.e ** 2)
    return c_min * math.exp(-c_min / t0) / t0 ** 2


class _GaussianSampler(BallSampler):
    def __init__(self, region: WeightedGraph, inner: Sequence[Vertex], m: Metric):
        super().__init__(region, inner)
        theta = region.theta_array
        D = m.distance_matrix(list(region.vertices))
        tt = np.outer(theta, theta)
        self._C = tt * D * D
        self._norm = np.sqrt(tt)
        self._lap = region.laplacian_matrix[self.rows]

    def _full(self, t: float) -> np.ndarray:
        if t == 0:
            return np.where(self._C == 0, 1.0 / self._norm, 0.0)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(self._C == 0, 1.0, np.exp(-self._C / t)) / self._norm

    def eval(self, t: float) -> np.ndarray:
        t = _check_time(t)
        return self._full(t)[np.ix_(self.rows, self.rows)]

    def heat_op(self, t: float) -> np.ndarray:
        t = _check_time(t)
        H = self._full(t)
        K = np.asarray(self._lap @ H)[:, self.rows]
        if t > 0:
            C = self._C[np.ix_(self.rows, self.rows)]
            with np.errstate(over="ignore", invalid="ignore"):
                K += np.where((C > 0) & np.isfinite(C), C / (t * t), 0.0) * H[np.ix_(self.rows, self.rows)]
        return K


def gaussian_parametrix(
    g: GraphSource,
    m: Metric,
    *,
    tail_mode: str = "degree",
    doubling_constant: float | None = None,
) -> Parametrix:
    """Dilated Gaussian parametrix of order 0 for the metric ``m``.

    ``tail_mode="degree"`` bounds the weight outside a ball by counting at
    most N^{n+1} vertices within (n+1)δ; ``tail_mode="doubling"`` uses the
    volume doubling constant C_d instead and needs ``doubling_constant``.
    """
    delta = m.delta_lower
    if not (delta is not None and math.isfinite(delta) and delta > 0):
        raise MetricLowerBoundMissing("the Gaussian parametrix needs a metric with a positive lower bound")
    if tail_mode not in ("degree", "doubling"):
        raise InvalidParams(f"unknown tail mode {tail_mode!r}")
    if tail_mode == "doubling" and not (doubling_constant and doubling_constant >= 1):
        raise InvalidParams("tail_mode='doubling' needs a doubling constant >= 1")
    bounds = standing_bounds(g)
    M, eta, N = bounds.M, bounds.eta, bounds.N

    def exponent(x: Vertex, y: Vertex) -> float:
        d = m(x, y)
        return g.theta(x) * g.theta(y) * d * d

    def eval_(x: Vertex, y: Vertex, t: float) -> float:
        t = _check_time(t)
        c = exponent(x, y)
        norm = math.sqrt(g.theta(x) * g.theta(y))
        if c == 0:
            return 1.0 / norm
        if t == 0:
            return 0.0
        return math.exp(-c / t) / norm

    def heat_op(x: Vertex, y: Vertex, t: float) -> float:
        t = _check_time(t)
        theta_x = g.theta(x)
        h_xy = eval_(x, y, t)
        total = math.fsum((h_xy - eval_(z, y, t)) * w for z, w in g.neighbors(x)) / theta_x
        if t > 0:
            c = exponent(x, y)
            if c:
                total += c / (t * t) * h_xy
        return total

    def support_radius(x: Vertex, t: float, tail_tol: float) -> float:
        t = _check_time(t)
        if tail_mode == "doubling":
            theta_x = g.theta(x)
            n0 = _smallest_index(lambda n: doubling_tail(doubling_constant, theta_x, eta, delta, t, n), tail_tol)
            return (2.0 ** n0) * delta
        g.theta(x)
        n0 = _smallest_index(lambda n: gaussian_tail(N, eta, delta, t, n), tail_tol)
        return n0 * delta

    def lh_bound(t0: float) -> float:
        c_min = (eta * delta) ** 2
        return 2 * M / eta + _peak_time_bound(c_min, t0) / eta

    log.debug("gaussian parametrix: metric=%s delta=%.6g M=%.6g eta=%.6g N=%d", m.kind.value, delta, M, eta, N)
    return Parametrix(
        name="gaussian", order_k=0, eval=eval_, heat_op=heat_op, support_radius=support_radius,
        lh_bound=lh_bound, sampler=lambda region, inner: _GaussianSampler(region, inner, m),
        bounds=bounds, graph=g, metric=m,
        params={"tail_mode": tail_mode, "doubling_constant": doubling_constant},
    )


PARAMETRICES = {
    "dirac": lambda g, m=None, **kw: dirac_parametrix(g),
    "gaussian": gaussian_parametrix,
}
