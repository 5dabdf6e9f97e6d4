"""Engine values against the dense matrix exponential of the same graph."""

from __future__ import annotations

from graph_core.errors import WindowTooSmall
from validation.oracles import SpectralOracle, oracle_result

from .base import Check, CheckResult, SuiteContext, skipped


def run(ctx: SuiteContext) -> CheckResult:
    cfg = ctx.config
    try:
        oracle = SpectralOracle(ctx.graph, max_vertices=cfg.max_oracle_vertices)
    except WindowTooSmall as exc:
        return skipped("oracle", str(exc))
    result = CheckResult("oracle", tolerance=cfg.oracle_tol)
    for x, y, t in ctx.queries:
        est = ctx.estimate(x, y, t)
        outcome = oracle_result(oracle.value(x, y, t), est, (x, y, t), cfg.oracle_tol)
        margin = ctx.allowance(est) + cfg.oracle_tol - outcome.difference
        result.record(margin, (x, y, t))
    return result


check = Check("oracle", run)
