"""Matrix-exponential oracle on finite windows.

The window Laplacian Δ is self-adjoint on L²(θ), so with Θ = diag(θ) the
matrix S = Θ^{1/2} Δ Θ^{-1/2} is symmetric and

    H(x,y;t) = θ(x)^{-1/2} (e^{-tS})_{xy} θ(y)^{-1/2}.

One dense eigendecomposition serves every query and time on the window.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from graph_core.errors import InvalidParams, NegativeTime, WindowTooSmall
from graph_core.graph import Vertex, WeightedGraph

log = logging.getLogger(__name__)

MAX_ORACLE_VERTICES = 4000


@dataclass(frozen=True)
class OracleResult:
    query: tuple[Vertex, Vertex, float]
    oracle_value: float
    engine_value: float
    engine_bound: float
    oracle_tolerance: float

    @property
    def difference(self) -> float:
        return abs(self.engine_value - self.oracle_value)

    @property
    def margin(self) -> float:
        return self.engine_bound + self.oracle_tolerance - self.difference

    @property
    def passed(self) -> bool:
        return self.difference <= self.engine_bound + self.oracle_tolerance

    def as_dict(self) -> dict:
        x, y, t = self.query
        return {
            "x": x, "y": y, "t": t,
            "oracle": self.oracle_value,
            "engine": self.engine_value,
            "engine_bound": self.engine_bound,
            "oracle_tolerance": self.oracle_tolerance,
            "pass": self.passed,
        }


class SpectralOracle:
    """Heat kernel of a finite window from the eigenpairs of its symmetrized
    Laplacian. The window is treated as a finite graph: boundary rows keep
    only the edges inside it."""

    def __init__(self, window: WeightedGraph, *, max_vertices: int = MAX_ORACLE_VERTICES):
        n = len(window)
        if n > max_vertices:
            raise WindowTooSmall(f"window has {n} vertices, the dense oracle handles at most {max_vertices}")
        self.window = window
        self._sqrt_theta = np.sqrt(window.theta_array)

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        lap = self.window.laplacian_matrix.toarray()
        S = self._sqrt_theta[:, None] * lap / self._sqrt_theta[None, :]
        S = 0.5 * (S + S.T)
        evals, evecs = linalg.eigh(S)
        if evals.size and evals[0] < -1e-9 * max(1.0, abs(evals[-1])):
            log.warning("window Laplacian has eigenvalue %.3g < 0", evals[0])
        log.debug("spectral oracle: %d eigenpairs, range [%.6g, %.6g]", evals.size, evals[0], evals[-1])
        return np.clip(evals, 0.0, None), evecs

    def _check(self, t: float) -> float:
        t = float(t)
        if math.isnan(t) or math.isinf(t):
            raise InvalidParams(f"t must be finite, got {t}")
        if t < 0:
            raise NegativeTime(f"t = {t} is negative")
        return t

    def matrix(self, t: float) -> np.ndarray:
        """H(u,v;t) for all pairs of the window."""
        t = self._check(t)
        evals, U = self.spectrum
        E = (U * np.exp(-t * evals)[None, :]) @ U.T
        return E / np.outer(self._sqrt_theta, self._sqrt_theta)

    def row(self, x: Vertex, t: float) -> dict[Vertex, float]:
        t = self._check(t)
        i = self._index(x)
        evals, U = self.spectrum
        values = (U[i] * np.exp(-t * evals)) @ U.T / (self._sqrt_theta[i] * self._sqrt_theta)
        return dict(zip(self.window.vertices, values.tolist()))

    def value(self, x: Vertex, y: Vertex, t: float) -> float:
        t = self._check(t)
        i, j = self._index(x), self._index(y)
        evals, U = self.spectrum
        e = float(U[i] * np.exp(-t * evals) @ U[j])
        return e / (self._sqrt_theta[i] * self._sqrt_theta[j])

    def _index(self, v: Vertex) -> int:
        self.window.theta(v)
        return self.window.index[v]


def matexp_oracle(
    g_window: WeightedGraph,
    x: Vertex,
    y: Vertex,
    t: float,
    *,
    min_radius: int | None = None,
    max_vertices: int = MAX_ORACLE_VERTICES,
) -> float:
    """exp(−tΔ_window) applied to 1_y/θ(y), read at x.

    With ``min_radius`` the window boundary must lie at least that many hops
    from x, so that truncating the graph cannot reach x through chains of
    that length.
    """
    if t == 0:
        g_window.theta(y)
        return 1.0 / g_window.theta(x) if x == y else 0.0
    if min_radius is not None and g_window.boundary:
        hops = g_window.hop_distances(x, min_radius)
        close = [b for b in g_window.boundary if hops.get(b, math.inf) < min_radius]
        if close:
            raise WindowTooSmall(f"window boundary lies within {min_radius} hops of {x!r}")
    return SpectralOracle(g_window, max_vertices=max_vertices).value(x, y, t)


def oracle_result(oracle_value: float, estimate, query: tuple, oracle_tolerance: float = 1e-10) -> OracleResult:
    """Pairs an engine :class:`~engine.neumann.KernelEstimate` with an oracle value."""
    return OracleResult(query, float(oracle_value), estimate.value, estimate.total_bound, oracle_tolerance)
