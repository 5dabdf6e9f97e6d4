"""Time convolution of two-point functions,

    (F₁*F₂)(x,y;t) = ∫_0^t Σ_z F₁(x,z;t−r) F₂(z,y;r) θ(z) dr,

by the composite trapezoid rule on a uniform grid, with iterated
convolutions computed level by level as a Volterra recurrence.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple, Sequence

import numpy as np

from graph_core.errors import InvalidParams
from graph_core.graph import Vertex

from .grid import TimeGrid, TimeGridKernel, check_compatible

log = logging.getLogger(__name__)


class QuadratureValue(NamedTuple):
    value: float
    error_estimate: float


def volterra_step(weighted: Sequence, G: np.ndarray, h: float) -> np.ndarray:
    """One convolution level on all grid nodes at once.

    ``weighted[d]`` is the θ-weighted kernel K(·,·;d·h)·diag(θ) (dense or
    sparse), ``G`` holds a column family with shape (n, m+1). Returns
    out[:, i] = Σ_{d=0..i} w_{i,d} K̃_d G[:, i−d] with trapezoid weights
    (h/2 at d = 0 and d = i, h otherwise; out[:, 0] = 0).
    """
    n, cols = G.shape
    m = cols - 1
    out = np.zeros_like(G)
    if m == 0:
        return out
    for d in range(m + 1):
        # nodes i ≥ max(d, 1) receive the lag-d term from G[:, i−d]
        start = max(d, 1)
        contrib = np.asarray(weighted[d] @ G[:, start - d: m + 1 - d])
        if d == 0:
            out[:, start:] += 0.5 * h * contrib
        else:
            out[:, start:] += h * contrib
            # at node i = d the lag-d term is the j = 0 endpoint
            out[:, d] -= 0.5 * h * contrib[:, 0]
    return out


def convolve_kernel(f1: TimeGridKernel, f2: TimeGridKernel) -> TimeGridKernel:
    """The whole family (F₁*F₂)(u,v;t_i) over the shared ball and grid."""
    check_compatible(f1, f2)
    grid = f1.grid
    w1 = f1.weighted()
    n = len(f1.vertices)
    out = np.zeros_like(f2.samples)
    for v in range(n):
        col = f2.samples[:, :, v].T
        out[:, :, v] = volterra_step(w1, col, grid.h).T
    return TimeGridKernel(f1.ball, grid, out)


def _convolve_at(w1: np.ndarray, f2: np.ndarray, grid: TimeGrid, i: int, a: int, b: int) -> float:
    weights = grid.trapezoid_weights(i)
    if i == 0:
        return 0.0
    terms = [weights[d] * (w1[d, a] @ f2[i - d, :, b]) for d in range(i + 1)]
    return math.fsum(terms)


def convolve(f1: TimeGridKernel, f2: TimeGridKernel, x: Vertex, y: Vertex, t: float) -> QuadratureValue:
    """(F₁*F₂)(x,y;t) at a grid node t, with a Richardson error estimate
    from the half-resolution sum (when t is an even node)."""
    check_compatible(f1, f2)
    grid = f1.grid
    i = grid.index_of(t)
    a, b = f1.ball.index[x], f1.ball.index[y]
    w1 = f1.weighted()
    value = _convolve_at(w1, f2.samples, grid, i, a, b)
    error = math.nan
    if i % 2 == 0 and grid.m % 2 == 0:
        coarse = grid.coarsen()
        coarse_value = _convolve_at(w1[::2], f2.samples[::2], coarse, i // 2, a, b)
        error = abs(value - coarse_value) / 3
    return QuadratureValue(value, error)


def iterated_convolution(f: TimeGridKernel, ell: int, x: Vertex, y: Vertex, t: float) -> float:
    """(f)^{*ℓ}(x,y;t) at a grid node: (f)^{*1} = f, (f)^{*ℓ} = f * (f)^{*(ℓ−1)}."""
    if ell < 1:
        raise InvalidParams(f"convolution power must be >= 1, got {ell}")
    i = f.grid.index_of(t)
    G = iterated_columns(f, y, ell)[-1]
    return float(G[f.ball.index[x], i])


def iterated_columns(f: TimeGridKernel, y: Vertex, L: int) -> list[np.ndarray]:
    """[(f)^{*ℓ}(·,y;t_i) for ℓ = 1..L], each of shape (n, m+1)."""
    weighted = f.weighted()
    G = f.column(y).copy()
    levels = [G]
    for _ in range(L - 1):
        G = volterra_step(weighted, G, f.grid.h)
        levels.append(G)
    return levels


def convolution_bound(C1: float, C2: float, k: int, ell: int, t: float) -> float:
    """C₁C₂ k! ℓ! t^{k+ℓ+1} / (k+ℓ+1)!: bound on |F₁*F₂| when
    ‖F₁(x,·;t)‖ ≤ C₁t^k and ‖F₂(·,y;t)‖ ≤ C₂t^ℓ in dual norms."""
    if t < 0:
        raise InvalidParams(f"t must be >= 0, got {t}")
    log_b = math.lgamma(k + 1) + math.lgamma(ell + 1) - math.lgamma(k + ell + 2)
    if t == 0:
        return 0.0
    return C1 * C2 * math.exp(log_b + (k + ell + 1) * math.log(t))


def iterated_bound(C: float, norm1: float, k: int, ell: int, t: float) -> float:
    """C ‖f‖₁^{ℓ−1} t^{k+ℓ−1}/(k+ℓ−1)!: envelope of (f)^{*ℓ} when |f| ≤ C t^k."""
    if t == 0:
        return C if k + ell - 1 == 0 else 0.0
    p = k + ell - 1
    log_v = (ell - 1) * math.log(norm1) if norm1 > 0 else (0.0 if ell == 1 else -math.inf)
    return C * math.exp(log_v + p * math.log(t) - math.lgamma(p + 1))

