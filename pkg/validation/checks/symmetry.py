"""H(x,y;t) = H(y,x;t): Δ is self-adjoint on L²(θ)."""

from __future__ import annotations

from .base import Check, CheckResult, SuiteContext

ROUNDOFF = 1e-14


def run(ctx: SuiteContext) -> CheckResult:
    result = CheckResult("symmetry", tolerance=ctx.budget)
    for x, y, t in ctx.queries:
        if x == y:
            continue
        a, b = ctx.estimate(x, y, t), ctx.estimate(y, x, t)
        allowed = ctx.allowance(a) + ctx.allowance(b) + ROUNDOFF
        result.record(allowed - abs(a.value - b.value), (x, y, t))
    return result


check = Check("symmetry", run)
