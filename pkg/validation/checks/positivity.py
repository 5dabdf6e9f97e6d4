"""H(x,y;t) ≥ 0 up to the reported error."""

from __future__ import annotations

from .base import Check, CheckResult, SuiteContext

ROUNDOFF = 1e-15


def run(ctx: SuiteContext) -> CheckResult:
    result = CheckResult("positivity", tolerance=ctx.budget)
    for x, y, t in ctx.queries:
        est = ctx.estimate(x, y, t)
        result.record(est.value + ctx.allowance(est) + ROUNDOFF, (x, y, t))
    return result


check = Check("positivity", run)
