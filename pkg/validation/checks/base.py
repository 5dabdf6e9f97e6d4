"""Shared plumbing for the suite checks: configuration, the per-run context
with memoized kernel evaluations, and the result record every check returns."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from engine.dirac import dirac_kernel_row, heat_kernel_dirac
from engine.general import heat_kernel_general
from engine.neumann import KernelEstimate
from graph_core.errors import InvalidParams
from graph_core.graph import IntensionalGraph, Vertex, WeightedGraph
from kernels.parametrix import PARAMETRICES, Parametrix
from metrics.metric import build_metric

log = logging.getLogger(__name__)

DETAIL_LIMIT = 5


@dataclass
class SuiteConfig:
    checks: tuple[str, ...] | None = None
    times: tuple[float, ...] = (0.1, 0.5, 1.0)
    pairs: tuple[tuple[Vertex, Vertex], ...] | None = None
    centers: int = 2
    pairs_per_center: int = 6
    tol: float = 1e-12
    oracle_tol: float = 1e-10
    general_tol: float = 1e-6
    independence_tol: float = 1e-6
    independence_max_vertices: int = 64
    independence_queries: int = 4
    small_times: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    small_time_band: tuple[float, float] = (0.8, 1.2)
    residual_h0: float = 1e-2
    residual_halvings: int = 3
    residual_band: tuple[float, float] = (3.2, 4.8)
    parametrix: str = "dirac"
    metric: str = "combinatorial"
    series_order: int | None = None
    seed: int = 0
    samples: int = 100_000
    threads: int | None = None
    grid_cap: int = 4096
    max_oracle_vertices: int = 4000

    def __post_init__(self):
        for name in ("tol", "oracle_tol", "general_tol", "independence_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParams(f"{name} must be positive, got {value}")
        if any(not (t >= 0 and math.isfinite(t)) for t in self.times):
            raise InvalidParams(f"times must be finite and >= 0, got {self.times}")
        if self.parametrix not in PARAMETRICES:
            raise InvalidParams(f"unknown parametrix {self.parametrix!r}")


@dataclass
class CheckResult:
    name: str
    queries: int = 0
    worst_margin: float = math.inf
    tolerance: float = 0.0
    passed: bool = True
    seed: int | None = None
    skipped: str | None = None
    failures: list = field(default_factory=list)

    def record(self, margin: float, query) -> None:
        """One query's margin (allowed minus observed; negative fails)."""
        self.queries += 1
        if math.isnan(margin) or margin < 0:
            self.passed = False
            if len(self.failures) < DETAIL_LIMIT:
                self.failures.append({"query": list(query), "margin": margin})
        if math.isnan(margin) or margin < self.worst_margin:
            self.worst_margin = margin

    def as_dict(self) -> dict:
        out = {
            "name": self.name,
            "queries": self.queries,
            "worst_margin": self.worst_margin if math.isfinite(self.worst_margin) else None,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.skipped:
            out["skipped"] = self.skipped
        if self.failures:
            out["failures"] = self.failures
        return out


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[["SuiteContext"], CheckResult]
    statistical: bool = False


def skipped(name: str, reason: str) -> CheckResult:
    log.info("check %s skipped: %s", name, reason)
    return CheckResult(name, skipped=reason)


class SuiteContext:
    """A finite graph, its query set and memoized kernel evaluations."""

    def __init__(self, g: WeightedGraph, config: SuiteConfig):
        if isinstance(g, IntensionalGraph):
            raise InvalidParams("the validation suite runs on a materialized window; call ball() first")
        self.source = g
        self.graph = g.as_finite()
        self.config = config
        self._rows: dict = {}
        self._estimates: dict = {}

    @cached_property
    def pairs(self) -> list[tuple[Vertex, Vertex]]:
        if self.config.pairs is not None:
            for x, y in self.config.pairs:
                self.graph.theta(x)
                self.graph.theta(y)
            return [tuple(p) for p in self.config.pairs]
        return default_pairs(self.source, self.config)

    @property
    def queries(self) -> list[tuple[Vertex, Vertex, float]]:
        return [(x, y, t) for x, y in self.pairs for t in self.config.times]

    @cached_property
    def parametrix(self) -> Parametrix:
        cfg = self.config
        if cfg.parametrix == "dirac":
            return PARAMETRICES["dirac"](self.graph)
        metric = build_metric(self.graph, cfg.metric)
        return PARAMETRICES[cfg.parametrix](self.graph, metric)

    @property
    def budget(self) -> float:
        return self.config.tol if self.config.parametrix == "dirac" else self.config.general_tol

    def allowance(self, est: KernelEstimate) -> float:
        """Error allowed for one evaluation: its reported bound, capped by the
        tolerance the engine was asked for."""
        return min(est.total_bound, self.budget)

    def row(self, x: Vertex, t: float) -> tuple[dict[Vertex, float], KernelEstimate]:
        key = (x, t)
        if key not in self._rows:
            self._rows[key] = dirac_kernel_row(self.graph, x, t, self.config.tol, series_order=self.config.series_order)
        return self._rows[key]

    def estimate(self, x: Vertex, y: Vertex, t: float) -> KernelEstimate:
        key = (x, y, t)
        if key not in self._estimates:
            cfg = self.config
            if cfg.parametrix == "dirac":
                est = heat_kernel_dirac(self.graph, x, y, t, cfg.tol, series_order=cfg.series_order)
            else:
                est = heat_kernel_general(
                    self.graph, self.parametrix, x, y, t, cfg.general_tol,
                    grid_cap=cfg.grid_cap, series_order=cfg.series_order,
                )
            self._estimates[key] = est
        return self._estimates[key]


def _interior_distances(g: WeightedGraph) -> dict[Vertex, float]:
    """Hops to the nearest window boundary vertex (inf on finite graphs)."""
    if not g.boundary:
        return {v: math.inf for v in g.vertices}
    dist = {b: 0 for b in g.boundary}
    frontier = sorted(g.boundary)
    while frontier:
        nxt = []
        for u in frontier:
            for v, _ in g.neighbors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return {v: dist.get(v, math.inf) for v in g.vertices}


def default_pairs(g: WeightedGraph, config: SuiteConfig) -> list[tuple[Vertex, Vertex]]:
    """Deterministic query pairs: the deepest interior vertices of a window,
    or seeded random vertices of a finite graph, each paired with itself and
    its nearest vertices."""
    vertices = g.vertices
    if not vertices:
        return []
    depth = _interior_distances(g)
    if g.boundary:
        centers = sorted(vertices, key=lambda v: (-depth[v], v))[: config.centers]
    else:
        rng = np.random.default_rng(np.random.SeedSequence(config.seed))
        picks = rng.choice(len(vertices), size=min(config.centers, len(vertices)), replace=False)
        centers = [vertices[i] for i in sorted(picks)]
    pairs = []
    for x in centers:
        hops = g.hop_distances(x, 3)
        near = sorted(hops, key=lambda v: (hops[v], v))[: config.pairs_per_center]
        pairs.extend((x, y) for y in near)
    return pairs
