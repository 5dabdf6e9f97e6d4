"""Metric objects: a distance oracle together with a certified uniform lower
bound δ on distances between distinct vertices, and the checks run on them."""

from __future__ import annotations

import enum
import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import sparse

from graph_core.assumptions import check_assumptions
from graph_core.errors import InvalidParams, MetricLowerBoundMissing
from graph_core.graph import GraphSource, IntensionalGraph, Vertex, WeightedGraph

from .distances import (
    EdgeCost,
    adapted_cost,
    combinatorial_cost,
    edge_weighted_cost,
    intrinsic_cost,
    min_edge_cost,
    shortest_paths,
)

log = logging.getLogger(__name__)

SAMPLE_TOL = 1e-12
VIOLATION_SAMPLE = 20


class MetricKind(str, enum.Enum):
    COMBINATORIAL = "combinatorial"
    NORMALIZED = "normalized"
    INTRINSIC_DEGENERATE = "intrinsic_degenerate"
    ADAPTED = "adapted"
    EDGE_WEIGHTED = "edge_weighted"
    CUSTOM = "custom"


_PATH_COSTS: dict[MetricKind, EdgeCost] = {
    MetricKind.COMBINATORIAL: combinatorial_cost,
    MetricKind.NORMALIZED: combinatorial_cost,
    MetricKind.INTRINSIC_DEGENERATE: intrinsic_cost,
    MetricKind.ADAPTED: adapted_cost,
    MetricKind.EDGE_WEIGHTED: edge_weighted_cost,
}


@dataclass(eq=False)
class Metric:
    kind: MetricKind
    dist: Callable[[Vertex, Vertex], float]
    delta_lower: float
    params: Mapping = field(default_factory=dict)
    graph: GraphSource | None = None
    cost: EdgeCost | None = None
    scale: float = 1.0
    _rows: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __call__(self, x: Vertex, y: Vertex) -> float:
        return self.dist(x, y)

    @property
    def is_path_metric(self) -> bool:
        return self.cost is not None

    def distances_from(self, x: Vertex, cutoff: float = math.inf) -> Mapping[Vertex, float]:
        """Single-source distances (scaled), memoized per source for full searches."""
        if not self.is_path_metric:
            raise InvalidParams("a custom metric has no single-source search; use distance_matrix")
        if math.isfinite(cutoff):
            raw = shortest_paths(self.graph, x, self.cost, cutoff=cutoff / self.scale)
            return {v: d * self.scale for v, d in raw.items()}
        row = self._rows.get(x)
        if row is None:
            raw = shortest_paths(self.graph, x, self.cost)
            row = {v: d * self.scale for v, d in raw.items()}
            with self._lock:
                self._rows[x] = row
        return row

    def distance_matrix(self, rows: list[Vertex], cols: list[Vertex] | None = None) -> np.ndarray:
        cols = rows if cols is None else cols
        if self.is_path_metric and not isinstance(self.graph, IntensionalGraph):
            out = np.empty((len(rows), len(cols)))
            for i, x in enumerate(rows):
                row = self.distances_from(x)
                out[i] = [row.get(y, math.inf) for y in cols]
            return out
        return np.array([[self.dist(x, y) for y in cols] for x in rows], dtype=float)


def _region_of(g: GraphSource, region: WeightedGraph | None) -> WeightedGraph:
    if region is not None:
        return region
    if isinstance(g, IntensionalGraph):
        raise InvalidParams("a metric on an intensional graph needs an explored region")
    return g


def build_metric(
    g: GraphSource,
    kind: MetricKind | str,
    *,
    region: WeightedGraph | None = None,
    A: float | None = None,
    M: float | None = None,
    eta: float | None = None,
    delta_tilde: float | None = None,
) -> Metric:
    """Build one of the path metrics on ``g``.

    ``delta_lower`` is the smallest single-edge cost in ``region`` (the whole
    graph when finite); every path between distinct vertices has at least one
    edge. For the normalized metric ``A`` defaults to the computed
    sup μ/θ; when claimed bounds ``M`` and ``eta`` are given the recorded
    lower bound is the smaller of A^{-1/2} and (M/η)^{-1/2}.
    """
    try:
        kind = MetricKind(kind)
    except ValueError as exc:
        raise InvalidParams(f"unknown metric kind {kind!r}") from exc
    if kind is MetricKind.CUSTOM:
        raise InvalidParams("use custom_metric for user-supplied distances")
    area = _region_of(g, region)
    cost = _PATH_COSTS[kind]
    params: dict = {}
    scale = 1.0

    if kind is MetricKind.NORMALIZED:
        if A is None:
            A = check_assumptions(area).A
        if not A > 0:
            raise InvalidParams(f"normalized metric needs A > 0, got {A}")
        scale = 1.0 / math.sqrt(A)
        params["A"] = A
        delta = scale
        if M is not None and eta is not None:
            delta = min(delta, math.sqrt(eta / M))
            params.update(M=M, eta=eta)
    elif kind is MetricKind.COMBINATORIAL:
        delta = 1.0
    else:
        delta = min_edge_cost(area, cost, source=g)

    if kind is MetricKind.EDGE_WEIGHTED:
        w_inf = min((w for *_, w in area.edges()), default=math.inf)
        params["w_inf"] = w_inf
        if delta_tilde is not None:
            params["delta_tilde"] = delta_tilde
            params["e1_satisfied"] = w_inf >= delta_tilde
            if w_inf < delta_tilde:
                log.warning("E1 violated: smallest edge weight %.6g is below %.6g", w_inf, delta_tilde)

    if not (math.isfinite(delta) and delta > 0):
        raise MetricLowerBoundMissing(f"{kind.value} metric has no positive lower bound on this region (δ={delta})")
    params["min_edge_cost"] = delta

    def dist(x: Vertex, y: Vertex) -> float:
        g.theta(x)
        g.theta(y)
        if x == y:
            return 0.0
        return shortest_paths(g, x, cost, target=y).get(y, math.inf) * scale

    log.debug("built %s metric with delta_lower=%.6g", kind.value, delta)
    return Metric(kind, dist, delta, params, graph=g, cost=cost, scale=scale)


def custom_metric(dist: Callable[[Vertex, Vertex], float], delta_lower: float, **params) -> Metric:
    """Wrap a user distance. ``delta_lower`` is taken on trust; verify it with
    :func:`verify_metric`."""
    if not (math.isfinite(delta_lower) and delta_lower > 0):
        raise MetricLowerBoundMissing(f"custom metric needs a positive lower bound, got {delta_lower}")
    return Metric(MetricKind.CUSTOM, dist, float(delta_lower), dict(params))


@dataclass
class MetricReport:
    kind: str
    vertex_count: int
    delta_lower: float
    min_distance: float
    c_rho: float
    symmetry_violations: list = field(default_factory=list)
    triangle_violations: list = field(default_factory=list)
    lower_bound_violations: list = field(default_factory=list)
    adaptedness_violations: list = field(default_factory=list)
    max_adaptedness: float | None = None
    e1: dict | None = None
    counts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(self.counts.values())

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "vertex_count": self.vertex_count,
            "delta_lower": self.delta_lower,
            "min_distance": self.min_distance,
            "c_rho": self.c_rho,
            "max_adaptedness": self.max_adaptedness,
            "e1": self.e1,
            "violation_counts": dict(self.counts),
            "symmetry_violations": self.symmetry_violations,
            "triangle_violations": self.triangle_violations,
            "lower_bound_violations": self.lower_bound_violations,
            "adaptedness_violations": self.adaptedness_violations,
            "pass": self.passed,
        }


def _pairs(mask: np.ndarray, vertices: list[Vertex], limit: int = VIOLATION_SAMPLE) -> list:
    idx = np.argwhere(mask)[:limit]
    return [[vertices[i] for i in row] for row in idx]


def verify_metric(
    g: GraphSource,
    m: Metric,
    region: WeightedGraph | None = None,
    *,
    adaptedness: bool | None = None,
    tol: float = SAMPLE_TOL,
) -> MetricReport:
    """Exhaustive checks over a finite region: d(x,x)=0, symmetry, the
    triangle inequality on all triples, the lower bound δ on distinct pairs
    and, for the normalized and adapted metrics, the adaptedness inequality
    (1/θ(x)) Σ_y d²(x,y) w_xy ≤ 1 at every vertex.

    Violations are reported, never raised. ``c_rho`` is the largest distance
    between adjacent vertices.
    """
    area = _region_of(g, region)
    if adaptedness is None:
        adaptedness = m.kind in (MetricKind.NORMALIZED, MetricKind.ADAPTED)
    vertices = list(area.vertices)
    n = len(vertices)
    D = m.distance_matrix(vertices)
    scale = np.maximum(1.0, np.abs(D))
    counts = {}

    diag_bad = np.abs(np.diag(D)) > tol
    sym_bad = np.abs(D - D.T) > tol * scale
    np.fill_diagonal(sym_bad, diag_bad)
    counts["symmetry"] = int(np.count_nonzero(np.triu(sym_bad)))

    tri_count = 0
    tri_sample: list = []
    for k in range(n):
        via = D[:, [k]] + D[[k], :]
        bad = D > via + tol * np.maximum(1.0, via)
        c = int(np.count_nonzero(bad))
        if c:
            tri_count += c
            for i, j in np.argwhere(bad)[: VIOLATION_SAMPLE - len(tri_sample)]:
                tri_sample.append([vertices[i], vertices[k], vertices[j]])
    counts["triangle"] = tri_count

    off = ~np.eye(n, dtype=bool)
    low_bad = off & (D < m.delta_lower - tol)
    counts["lower_bound"] = int(np.count_nonzero(np.triu(low_bad)))
    min_distance = float(D[off].min()) if n > 1 else math.inf

    index = area.index
    rows, cols, vals = [], [], []
    for u, v, w in area.edges():
        rows += [index[u], index[v]]
        cols += [index[v], index[u]]
        vals += [w, w]
    W = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    adjacent = W.toarray() > 0
    c_rho = float(D[adjacent].max()) if adjacent.any() else 0.0

    report = MetricReport(
        kind=m.kind.value,
        vertex_count=n,
        delta_lower=m.delta_lower,
        min_distance=min_distance,
        c_rho=c_rho,
        symmetry_violations=_pairs(np.triu(sym_bad), vertices),
        triangle_violations=tri_sample,
        lower_bound_violations=_pairs(np.triu(low_bad), vertices),
        counts=counts,
    )

    if adaptedness:
        D2 = np.where(adjacent, D, 0.0) ** 2
        sums = np.asarray(W.multiply(D2).sum(axis=1)).ravel() / area.theta_array
        report.max_adaptedness = float(sums.max()) if n else 0.0
        bad = np.flatnonzero(sums > 1.0 + tol)
        counts["adaptedness"] = int(bad.size)
        report.adaptedness_violations = [[vertices[i], float(sums[i])] for i in bad[:VIOLATION_SAMPLE]]

    if m.kind is MetricKind.EDGE_WEIGHTED:
        report.e1 = {
            "w_inf": m.params.get("w_inf"),
            "delta_tilde": m.params.get("delta_tilde"),
            "satisfied": m.params.get("e1_satisfied"),
        }

    if not report.passed:
        log.warning("metric %s failed verification: %s", m.kind.value, counts)
    return report
