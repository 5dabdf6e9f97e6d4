"""The Dirac and Gaussian routes give the same kernel."""

from __future__ import annotations

from engine.dirac import heat_kernel_dirac
from engine.general import heat_kernel_general
from kernels.parametrix import gaussian_parametrix
from metrics.metric import build_metric

from .base import Check, CheckResult, SuiteContext, skipped


def run(ctx: SuiteContext) -> CheckResult:
    cfg = ctx.config
    n = len(ctx.graph)
    if n > cfg.independence_max_vertices:
        return skipped("parametrix_independence", f"{n} vertices exceed {cfg.independence_max_vertices}")
    P = gaussian_parametrix(ctx.graph, build_metric(ctx.graph, cfg.metric))
    result = CheckResult("parametrix_independence", tolerance=cfg.independence_tol)
    queries = [q for q in ctx.queries if q[2] > 0][: cfg.independence_queries]
    for x, y, t in queries:
        dirac = heat_kernel_dirac(ctx.graph, x, y, t, cfg.tol, series_order=cfg.series_order)
        gauss = heat_kernel_general(ctx.graph, P, x, y, t, cfg.independence_tol, grid_cap=cfg.grid_cap)
        allowed = min(dirac.total_bound, cfg.tol) + gauss.total_bound + cfg.independence_tol
        result.record(allowed - abs(dirac.value - gauss.value), (x, y, t))
    return result


check = Check("parametrix_independence", run)
