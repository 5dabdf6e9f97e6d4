"""Run configuration: argparse flags merged over an optional JSON config file,
the environment and built-in defaults (in that order of precedence)."""

from __future__ import annotations

import argparse
import json
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from graph_core.errors import ConfigError

from .settings import Settings

log = logging.getLogger(__name__)

COMMANDS = ("gen", "compute", "validate", "compare")
ROUTES = ("dirac", "gaussian", "closed_form", "walk_series")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    generator: str | None = None
    params: dict = field(default_factory=dict)
    finite: bool = False
    metric: str = "combinatorial"
    parametrix: str = "dirac"
    tail_mode: str = "degree"
    doubling_constant: float | None = None
    routes: tuple[str, str] = ("dirac", "closed_form")
    pairs: list[tuple[str, str]] | None = None
    times: list[float] = field(default_factory=lambda: [1.0])
    tol: float = 1e-12
    quad_tol: float = 1e-6
    series_order: int | None = None
    grid_cap: int = 4096
    checks: list[str] | None = None
    samples: int = 100_000
    max_oracle_vertices: int = 4000
    out: str | None = None
    fmt: str = "csv"
    seed: int = 0
    threads: int = 1
    log_level: str = "WARNING"

    def validate(self) -> RunConfig:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("tol", "quad_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be a positive number, got {value!r}")
        if any(not (t >= 0 and math.isfinite(t)) for t in self.times):
            raise ConfigError(f"times must be finite and >= 0, got {self.times}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.series_order is not None and self.series_order < 0:
            raise ConfigError(f"series order must be >= 0, got {self.series_order}")
        if self.parametrix not in ("dirac", "gaussian"):
            raise ConfigError(f"unknown parametrix {self.parametrix!r}")
        bad = [r for r in self.routes if r not in ROUTES]
        if len(self.routes) != 2 or bad:
            raise ConfigError(f"compare needs two routes from {ROUTES}, got {list(self.routes)}")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"log level must be one of {LOG_LEVELS}, got {self.log_level!r}")
        if not (self.graph or self.generator):
            raise ConfigError("give a graph file (--graph) or a generator (--generator)")
        return self


# ---------------------------------------------------------------------
# Flag parsing
# ---------------------------------------------------------------------
def parse_times(text: str) -> list[float]:
    """``"0.25,1,2"`` or a range ``"start:stop:count"`` (inclusive)."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot read times from {text!r}") from exc


def parse_pairs(text: str) -> list[tuple[str, str]]:
    """``"0:0,0:1"`` → [("0","0"), ("0","1")]. Lattice ids may contain commas
    in higher dimension, so pairs may also be separated by ``;``."""
    sep = ";" if ";" in text else ","
    pairs = []
    for item in text.split(sep):
        item = item.strip()
        if not item:
            continue
        x, colon, y = item.partition(":")
        if not colon or not x or not y:
            raise ConfigError(f"pair {item!r} is not of the form x:y")
        pairs.append((x, y))
    return pairs


def parse_param(text: str) -> tuple[str, Any]:
    key, eq, raw = text.partition("=")
    if not eq or not key:
        raise ConfigError(f"generator parameter {text!r} is not of the form key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if isinstance(value, list):
        value = tuple(value)
    return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatkernel", description="Heat kernels on weighted graphs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("gen", "write a generated graph as JSON"),
        ("compute", "evaluate H(x,y;t) for a set of queries"),
        ("validate", "run the validation suite on a graph"),
        ("compare", "evaluate two routes side by side"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with run settings (flags override it)")
        p.add_argument("--graph", help="graph JSON file")
        p.add_argument("--generator", help="generator name (lattice_window, tree_ball, ...)")
        p.add_argument("--param", action="append", default=None, metavar="KEY=VALUE", help="generator parameter")
        p.add_argument("--finite", action="store_true", default=None, help="treat a stored window as a finite graph")
        p.add_argument("--metric", help="metric for the Gaussian parametrix")
        p.add_argument("--parametrix", choices=("dirac", "gaussian"))
        p.add_argument("--routes", help="two comma-separated routes for compare")
        p.add_argument("--tol", type=float, help="series tolerance")
        p.add_argument("--quad-tol", type=float, help="quadrature tolerance of the general engine")
        p.add_argument("--t", help="times: comma list or start:stop:count")
        p.add_argument("--pairs", help="query pairs x:y, comma (or ;) separated")
        p.add_argument("--checks", help="comma-separated check names for validate")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"))
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS)
        p.add_argument("--series-order", type=int, help="force the series order (diagnostics)")
        p.add_argument("--samples", type=int, help="random-walk sample size")
    return parser


def load_config_file(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    return doc


def _from_flags(args: argparse.Namespace) -> dict:
    out: dict = {}
    simple = ("graph", "generator", "finite", "metric", "parametrix", "tol", "quad_tol", "out", "fmt",
              "seed", "threads", "log_level", "series_order", "samples")
    for name in simple:
        value = getattr(args, name, None)
        if value is not None:
            out[name] = value
    if args.param:
        out["params"] = dict(parse_param(p) for p in args.param)
    if args.t is not None:
        out["times"] = parse_times(args.t)
    if args.pairs is not None:
        out["pairs"] = parse_pairs(args.pairs)
    if args.routes is not None:
        out["routes"] = tuple(r.strip() for r in args.routes.split(","))
    if args.checks is not None:
        out["checks"] = [c.strip() for c in args.checks.split(",") if c.strip()]
    return out


def _normalize_file_values(doc: dict) -> dict:
    doc = dict(doc)
    if isinstance(doc.get("times"), str):
        doc["times"] = parse_times(doc["times"])
    if isinstance(doc.get("pairs"), str):
        doc["pairs"] = parse_pairs(doc["pairs"])
    elif doc.get("pairs") is not None:
        doc["pairs"] = [tuple(str(v) for v in p) for p in doc["pairs"]]
    if doc.get("routes") is not None:
        doc["routes"] = tuple(doc["routes"])
    return doc


def build_run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """flag > config file > environment > built-in."""
    merged: dict = {
        "tol": settings.tol,
        "fmt": settings.fmt,
        "seed": settings.seed,
        "threads": settings.threads,
        "log_level": settings.log_level,
        "grid_cap": settings.grid_cap,
        "max_oracle_vertices": settings.max_oracle_vertices,
    }
    if args.config:
        merged.update(_normalize_file_values(load_config_file(args.config)))
    merged.update(_from_flags(args))
    merged["command"] = args.command
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    log.debug("run config: %s", cfg)
    return cfg.validate()
