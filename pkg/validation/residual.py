"""Heat-equation residual of a kernel oracle by centered time differences."""

from __future__ import annotations

import logging
import math
from typing import Callable

from graph_core.errors import InvalidParams
from graph_core.graph import GraphSource, Vertex, apply_laplacian

log = logging.getLogger(__name__)

KernelFn = Callable[[Vertex, Vertex, float], float]


def residual_check(g: GraphSource, kernel: KernelFn, x: Vertex, y: Vertex, t: float, h: float) -> float:
    """|Δ_x H(x,y;t) + (H(x,y;t+h) − H(x,y;t−h))/(2h)|."""
    if not (h > 0 and t - h > 0):
        raise InvalidParams(f"need 0 < h < t, got t={t}, h={h}")
    values = {x: kernel(x, y, t)}
    for z, _ in g.neighbors(x):
        values[z] = kernel(z, y, t)
    lap = apply_laplacian(g, values, x)
    dt = (kernel(x, y, t + h) - kernel(x, y, t - h)) / (2 * h)
    return abs(lap + dt)


def residual_sequence(
    g: GraphSource,
    kernel: KernelFn,
    x: Vertex,
    y: Vertex,
    t: float,
    h0: float,
    halvings: int = 3,
) -> list[tuple[float, float]]:
    """[(h, residual)] for h = h0, h0/2, …; successive ratios approach 4."""
    out = []
    h = h0
    for _ in range(halvings + 1):
        out.append((h, residual_check(g, kernel, x, y, t, h)))
        h /= 2
    log.debug("residuals at (%r,%r,t=%g): %s", x, y, t, ", ".join(f"{r:.3g}" for _, r in out))
    return out


def second_order_ratios(sequence: list[tuple[float, float]], floor: float = 0.0) -> list[float]:
    """Ratios residual(h)/residual(h/2) while both residuals stay above ``floor``."""
    ratios = []
    for (_, r1), (_, r2) in zip(sequence, sequence[1:]):
        if r1 <= floor or r2 <= floor or r2 == 0 or math.isnan(r2):
            break
        ratios.append(r1 / r2)
    return ratios
