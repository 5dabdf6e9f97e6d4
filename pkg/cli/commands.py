"""The four subcommands. Each takes a validated :class:`RunConfig` and returns
the process exit status."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from engine.dirac import heat_kernel_dirac
from engine.general import heat_kernel_general
from engine.neumann import KernelEstimate
from graph_core.errors import ConfigError, HeatKernelError, InvalidParams
from graph_core.generators import GENERATORS, lattice_Z, regular_tree
from graph_core.graph import GraphSource, IntensionalGraph, Vertex
from graph_core.store import dumps_graph, load_graph
from kernels.closed_form import closed_form_for
from kernels.parametrix import gaussian_parametrix
from metrics.metric import build_metric
from validation.checks.base import default_pairs
from validation.suite import SuiteConfig, suite_run

from .config import RunConfig
from .output import dumps_report, emit, format_rows

log = logging.getLogger(__name__)

INTENSIONAL = {
    "lattice_Z": lambda **kw: lattice_Z(),
    "regular_tree": lambda q, **kw: regular_tree(int(q)),
}
COMPUTE_COLUMNS = ("x", "y", "t", "value", "series_tail", "spatial_tail", "quad_err", "total_bound")
COMPARE_COLUMNS = ("x", "y", "t", "route_a", "value_a", "bound_a", "route_b", "value_b", "bound_b",
                   "diff", "combined_bound", "exceeds")

Route = Callable[[Vertex, Vertex, float], KernelEstimate]


# ---------------------------------------------------------------------
# Graph and query resolution
# ---------------------------------------------------------------------
def resolve_graph(cfg: RunConfig) -> GraphSource:
    if cfg.graph:
        g = load_graph(cfg.graph)
    else:
        name = cfg.generator
        factory = GENERATORS.get(name) or INTENSIONAL.get(name)
        if factory is None:
            raise ConfigError(f"unknown generator {name!r}; available: {sorted(GENERATORS) + sorted(INTENSIONAL)}")
        try:
            g = factory(**cfg.params)
        except TypeError as exc:
            raise InvalidParams(f"bad parameters for {name}: {exc}") from exc
    if cfg.finite:
        if isinstance(g, IntensionalGraph):
            raise ConfigError("--finite applies to stored or generated windows only")
        g = g.as_finite()
    log.info("graph %r ready", g)
    return g


def resolve_pairs(cfg: RunConfig, g: GraphSource) -> list[tuple[Vertex, Vertex]]:
    if cfg.pairs is not None:
        return list(cfg.pairs)
    if isinstance(g, IntensionalGraph):
        raise ConfigError("queries on an intensional graph need explicit --pairs")
    return default_pairs(g, SuiteConfig(seed=cfg.seed))


def build_route(name: str, g: GraphSource, cfg: RunConfig) -> Route:
    if name == "dirac":
        return lambda x, y, t: heat_kernel_dirac(g, x, y, t, cfg.tol, series_order=cfg.series_order)
    if name == "gaussian":
        if isinstance(g, IntensionalGraph):
            raise ConfigError("the Gaussian route needs a materialized window")
        P = gaussian_parametrix(
            g, build_metric(g, cfg.metric), tail_mode=cfg.tail_mode, doubling_constant=cfg.doubling_constant,
        )
        return lambda x, y, t: heat_kernel_general(
            g, P, x, y, t, cfg.quad_tol, grid_cap=cfg.grid_cap, series_order=cfg.series_order,
        )
    closed = closed_form_for(g, tail_tol=cfg.tol)
    if name == "closed_form":
        def route(x, y, t):
            s = closed.kernel(x, y, t)
            return KernelEstimate(s.value, s.terms, s.tail_bound)
        return route
    if name == "walk_series":
        def route(x, y, t):
            s = closed.walk_series(closed.distance(x, y), t)
            return KernelEstimate(s.value, s.terms, s.tail_bound)
        return route
    raise ConfigError(f"unknown route {name!r}")


def _map_ordered(fn, items: list, threads: int) -> list:
    """Parallel map whose results come back in input order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------
def cmd_gen(cfg: RunConfig) -> int:
    if cfg.graph:
        raise ConfigError("gen writes a generated graph; use --generator")
    g = resolve_graph(cfg)
    if isinstance(g, IntensionalGraph):
        raise ConfigError(f"{cfg.generator} is infinite; generate a window (lattice_window, tree_ball)")
    emit(dumps_graph(g), cfg.out)
    return 0


def cmd_compute(cfg: RunConfig) -> int:
    g = resolve_graph(cfg)
    route = build_route(cfg.parametrix, g, cfg)
    queries = [(x, y, t) for x, y in resolve_pairs(cfg, g) for t in cfg.times]

    def one(query):
        x, y, t = query
        return {"x": x, "y": y, "t": t, **route(x, y, t).as_row()}

    rows = _map_ordered(one, queries, cfg.threads)
    emit(format_rows(rows, COMPUTE_COLUMNS, cfg.fmt), cfg.out)
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    g = resolve_graph(cfg)
    if isinstance(g, IntensionalGraph):
        raise ConfigError("validate runs on a stored or generated window")
    suite_cfg = SuiteConfig(
        checks=tuple(cfg.checks) if cfg.checks is not None else None,
        times=tuple(cfg.times),
        pairs=tuple(cfg.pairs) if cfg.pairs is not None else None,
        tol=cfg.tol,
        general_tol=cfg.quad_tol,
        parametrix=cfg.parametrix,
        metric=cfg.metric,
        series_order=cfg.series_order,
        seed=cfg.seed,
        samples=cfg.samples,
        threads=cfg.threads,
        grid_cap=cfg.grid_cap,
        max_oracle_vertices=cfg.max_oracle_vertices,
    )
    report = suite_run(g, suite_cfg)
    emit(dumps_report(report.as_dict()), cfg.out)
    if not report.statistical_passed:
        log.warning("statistical checks outside their envelope (seed=%d)", cfg.seed)
    return 0 if report.passed else 1


def cmd_compare(cfg: RunConfig) -> int:
    g = resolve_graph(cfg)
    name_a, name_b = cfg.routes
    route_a, route_b = build_route(name_a, g, cfg), build_route(name_b, g, cfg)
    queries = [(x, y, t) for x, y in resolve_pairs(cfg, g) for t in cfg.times]

    def one(query):
        x, y, t = query
        a, b = route_a(x, y, t), route_b(x, y, t)
        diff = abs(a.value - b.value)
        combined = a.total_bound + b.total_bound
        return {
            "x": x, "y": y, "t": t,
            "route_a": name_a, "value_a": a.value, "bound_a": a.total_bound,
            "route_b": name_b, "value_b": b.value, "bound_b": b.total_bound,
            "diff": diff, "combined_bound": combined, "exceeds": diff > combined,
        }

    rows = _map_ordered(one, queries, cfg.threads)
    emit(format_rows(rows, COMPARE_COLUMNS, cfg.fmt), cfg.out)
    flagged = [r for r in rows if r["exceeds"]]
    for r in flagged:
        log.warning("%s and %s differ by %.3g > %.3g at (%s,%s,t=%g)",
                    name_a, name_b, r["diff"], r["combined_bound"], r["x"], r["y"], r["t"])
    return 1 if flagged else 0


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "gen": cmd_gen,
    "compute": cmd_compute,
    "validate": cmd_validate,
    "compare": cmd_compare,
}


def run_command(cfg: RunConfig) -> int:
    try:
        return COMMANDS[cfg.command](cfg)
    except HeatKernelError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
