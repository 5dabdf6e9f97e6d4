"""Σ_z H(x,z;s) H(z,y;s) θ(z) = H(x,y;2s)."""

from __future__ import annotations

import math

from .base import Check, CheckResult, SuiteContext

ROUNDOFF = 1e-13


def run(ctx: SuiteContext) -> CheckResult:
    result = CheckResult("semigroup", tolerance=ctx.config.tol)
    g = ctx.graph
    for x, y in ctx.pairs:
        for t in ctx.config.times:
            if t == 0:
                continue
            s = t / 2
            row_x, est_x = ctx.row(x, s)
            row_y, est_y = ctx.row(y, s)
            # H(z,y;s) = H(y,z;s)
            composed = math.fsum(v * row_y.get(z, 0.0) * g.theta(z) for z, v in row_x.items())
            direct = ctx.estimate(x, y, t)
            spread_x = math.fsum(abs(v) * g.theta(z) for z, v in row_x.items())
            spread_y = math.fsum(abs(v) * g.theta(z) for z, v in row_y.items())
            allowed = (
                min(est_x.series_tail_bound, ctx.config.tol) * spread_y
                + min(est_y.series_tail_bound, ctx.config.tol) * spread_x
                + ctx.allowance(direct)
                + ROUNDOFF
            )
            result.record(allowed - abs(composed - direct.value), (x, y, t))
    return result


check = Check("semigroup", run)
