"""Centered-difference heat-equation residual shrinks fourfold per halving
of the time step, down to the floor set by the series tolerance."""

from __future__ import annotations

from validation.residual import residual_sequence, second_order_ratios

from .base import Check, CheckResult, SuiteContext

FLOOR_FACTOR = 1e3


def run(ctx: SuiteContext) -> CheckResult:
    cfg = ctx.config
    lo, hi = cfg.residual_band
    result = CheckResult("residual", tolerance=hi - 4.0)

    def kernel(z, y, s):
        # H(z,y;s) = H(y,z;s)
        return ctx.row(y, s)[0].get(z, 0.0)

    h_min = cfg.residual_h0 / 2 ** cfg.residual_halvings
    floor = FLOOR_FACTOR * cfg.tol / h_min
    for x, y in ctx.pairs:
        for t in cfg.times:
            if t - cfg.residual_h0 <= 0:
                continue
            seq = residual_sequence(ctx.graph, kernel, x, y, t, cfg.residual_h0, cfg.residual_halvings)
            for ratio in second_order_ratios(seq, floor):
                result.record(min(ratio - lo, hi - ratio), (x, y, t))
    return result


check = Check("residual", run)
