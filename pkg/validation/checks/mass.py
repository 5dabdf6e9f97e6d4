"""Conservation of heat: Σ_y θ(y) H(x,y;t) = 1 at every truncation order."""

from __future__ import annotations

import math

from .base import Check, CheckResult, SuiteContext

MASS_TOL = 1e-12


def run(ctx: SuiteContext) -> CheckResult:
    result = CheckResult("mass", tolerance=MASS_TOL)
    g = ctx.graph
    for x in dict.fromkeys(x for x, _ in ctx.pairs):
        for t in ctx.config.times:
            row, _ = ctx.row(x, t)
            mass = math.fsum(v * g.theta(y) for y, v in row.items())
            result.record(MASS_TOL - abs(mass - 1.0), (x, t))
    return result


check = Check("mass", run)
