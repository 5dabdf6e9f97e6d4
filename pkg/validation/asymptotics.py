"""Small-time behaviour: the leading chain term and the order of the
parametrix correction."""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from engine.dirac import heat_kernel_dirac, small_time_leading_term
from engine.general import parametrix_correction
from graph_core.errors import InvalidParams
from graph_core.graph import GraphSource, Vertex
from kernels.parametrix import Parametrix

log = logging.getLogger(__name__)

SMALL_TIMES = (1e-1, 1e-2, 1e-3)


def leading_term_deviations(
    g: GraphSource,
    x: Vertex,
    y: Vertex,
    ts: Sequence[float] = SMALL_TIMES,
    rel_tol: float = 1e-9,
) -> list[tuple[float, float]]:
    """[(t, |H(x,y;t)/leading(t) − 1|)]; the deviation is linear in t."""
    out = []
    for t in ts:
        approx, _ = small_time_leading_term(g, x, y, t)
        if approx == 0:
            raise InvalidParams(f"leading chain term vanishes at ({x!r},{y!r})")
        est = heat_kernel_dirac(g, x, y, t, tol=rel_tol * abs(approx))
        out.append((t, abs(est.value / approx - 1.0)))
    return out


def deviation_ratios(deviations: list[tuple[float, float]]) -> list[float]:
    """dev(t_{i+1})/dev(t_i): close to t_{i+1}/t_i when the deviation is linear."""
    return [d2 / d1 for (_, d1), (_, d2) in zip(deviations, deviations[1:]) if d1 > 0]


def correction_slope(
    g: GraphSource,
    P: Parametrix,
    x: Vertex,
    y: Vertex,
    ts: Sequence[float] = SMALL_TIMES,
    rel_tol: float = 1e-4,
) -> float:
    """Log-log slope of |(H*F)(x,y;t)| over ``ts``; at least k+1 for a
    parametrix of order k."""
    if len(ts) < 2:
        raise InvalidParams("need at least two times for a slope")
    logs_t, logs_c = [], []
    for t in ts:
        tol = rel_tol * t ** (P.order_k + 1)
        est = parametrix_correction(g, P, x, y, t, tol)
        if est.value == 0:
            continue
        logs_t.append(math.log(t))
        logs_c.append(math.log(abs(est.value)))
    if len(logs_t) < 2:
        return math.inf
    slope = float(np.polyfit(logs_t, logs_c, 1)[0])
    log.debug("correction slope for %s at (%r,%r): %.4f", P.name, x, y, slope)
    return slope
