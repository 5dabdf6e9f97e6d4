"""H(x,y;t) / leading chain term → 1 linearly in t, for d(x,y) = 1, 2, 3."""

from __future__ import annotations

from validation.asymptotics import deviation_ratios, leading_term_deviations

from .base import Check, CheckResult, SuiteContext

DISTANCES = (1, 2, 3)
DEVIATION_FLOOR = 1e-10


def run(ctx: SuiteContext) -> CheckResult:
    cfg = ctx.config
    lo, hi = cfg.small_time_band
    result = CheckResult("small_time", tolerance=hi - 1.0)
    ts = cfg.small_times
    for x in dict.fromkeys(x for x, _ in ctx.pairs):
        hops = ctx.graph.hop_distances(x, max(DISTANCES))
        for r in DISTANCES:
            at_r = sorted(v for v, d in hops.items() if d == r)
            if not at_r:
                continue
            y = at_r[0]
            devs = leading_term_deviations(ctx.graph, x, y, ts)
            devs = [(t, d) for t, d in devs if d > DEVIATION_FLOOR]
            for (t1, _), (t2, _), ratio in zip(devs, devs[1:], deviation_ratios(devs)):
                expected = t2 / t1
                result.record(min(ratio / expected - lo, hi - ratio / expected), (x, y, t2))
    return result


check = Check("small_time", run)
