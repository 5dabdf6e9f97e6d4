"""Random-walk occupation frequencies against θ(y)·H(x,y;t), three
standard errors (statistical; never gates)."""

from __future__ import annotations

import logging

from validation.ctrw import ctrw_simulate

from .base import Check, CheckResult, SuiteContext, skipped

log = logging.getLogger(__name__)

SIGMAS = 3.0
MIN_EXPECTED = 5.0


def run(ctx: SuiteContext) -> CheckResult:
    cfg = ctx.config
    if cfg.samples < 1 or not ctx.pairs:
        return skipped("ctrw", "no samples requested")
    x = ctx.pairs[0][0]
    result = CheckResult("ctrw", tolerance=SIGMAS, seed=cfg.seed)
    g = ctx.graph
    for t in cfg.times:
        walk = ctrw_simulate(g, x, t, cfg.samples, cfg.seed, threads=cfg.threads)
        row, _ = ctx.row(x, t)
        for y, h in row.items():
            p = h * g.theta(y)
            if p * cfg.samples < MIN_EXPECTED:
                continue
            se = walk.standard_error(p)
            result.record(SIGMAS * se - abs(walk.frequency(y) - p), (x, y, t))
    if not result.passed:
        log.warning("random-walk frequencies miss the %g-sigma band (seed=%d)", SIGMAS, cfg.seed)
    return result


check = Check("ctrw", run, statistical=True)
