"""Runs the configured checks on one graph and collects a JSON-ready report.

Deterministic checks decide the verdict; statistical ones are reported in
their own section and only warn.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from graph_core.errors import HeatKernelError, InvalidParams
from graph_core.graph import WeightedGraph

from .checks import ctrw, independence, mass, oracle, positivity, residual, semigroup, small_time, symmetry
from .checks.base import Check, CheckResult, SuiteConfig, SuiteContext

log = logging.getLogger(__name__)

CHECKS: dict[str, Check] = {
    c.name: c
    for c in (
        mass.check,
        symmetry.check,
        positivity.check,
        semigroup.check,
        small_time.check,
        oracle.check,
        residual.check,
        independence.check,
        ctrw.check,
    )
}
DEFAULT_CHECKS = tuple(CHECKS)

__all__ = ["CHECKS", "DEFAULT_CHECKS", "SuiteConfig", "SuiteReport", "suite_run"]


@dataclass
class SuiteReport:
    graph: str
    checks: list[CheckResult] = field(default_factory=list)
    statistical: list[CheckResult] = field(default_factory=list)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def statistical_passed(self) -> bool:
        return all(c.passed for c in self.statistical)

    def as_dict(self) -> dict:
        return {
            "graph": self.graph,
            "pass": self.passed,
            "seed": self.seed,
            "checks": [c.as_dict() for c in self.checks],
            "statistical": [c.as_dict() for c in self.statistical],
        }


def _run_one(check: Check, ctx: SuiteContext) -> CheckResult:
    started = time.perf_counter()
    try:
        result = check.run(ctx)
    except HeatKernelError as exc:
        log.error("check %s raised %s: %s", check.name, type(exc).__name__, exc)
        result = CheckResult(check.name, passed=False, failures=[{"error": type(exc).__name__, "message": str(exc)}])
    log.info(
        "check %s: %s (%d queries, worst margin %.3g) in %.2fs",
        check.name, "skipped" if result.skipped else ("pass" if result.passed else "FAIL"),
        result.queries, result.worst_margin, time.perf_counter() - started,
    )
    return result


def suite_run(g: WeightedGraph, config: SuiteConfig | None = None) -> SuiteReport:
    """Runs ``config.checks`` (all by default) on the finite graph ``g``."""
    config = config or SuiteConfig()
    names = DEFAULT_CHECKS if config.checks is None else tuple(config.checks)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise InvalidParams(f"unknown checks {unknown}; available: {list(CHECKS)}")
    ctx = SuiteContext(g, config)
    report = SuiteReport(graph=str(g.meta.get("generator", "graph")), seed=config.seed)
    for name in names:
        check = CHECKS[name]
        result = _run_one(check, ctx)
        (report.statistical if check.statistical else report.checks).append(result)
    if not report.statistical_passed:
        log.warning("statistical checks missed their envelope; verdict unaffected")
    return report
