"""Defaults read from the environment (and a ``.env`` file loaded at boot)."""

from __future__ import annotations

import os
from dataclasses import dataclass

from graph_core.errors import ConfigError


@dataclass(frozen=True)
class Settings:
    threads: int
    tol: float
    fmt: str
    seed: int
    log_level: str
    grid_cap: int
    max_oracle_vertices: int


def _parse(name: str, default: str, kind: type):
    raw = os.getenv(name, default)
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}={raw!r} is not a valid {kind.__name__}") from exc


def load_settings() -> Settings:
    settings = Settings(
        threads=_parse("HEATKERNEL_THREADS", str(os.cpu_count() or 1), int),
        tol=_parse("HEATKERNEL_TOL", "1e-12", float),
        fmt=os.getenv("HEATKERNEL_FORMAT", "csv").lower(),
        seed=_parse("HEATKERNEL_SEED", "0", int),
        log_level=os.getenv("HEATKERNEL_LOG_LEVEL", "WARNING").upper(),
        grid_cap=_parse("HEATKERNEL_GRID_CAP", "4096", int),
        max_oracle_vertices=_parse("HEATKERNEL_MAX_ORACLE_VERTICES", "4000", int),
    )
    if settings.fmt not in ("csv", "json"):
        raise ConfigError(f"HEATKERNEL_FORMAT must be csv or json, got {settings.fmt!r}")
    if settings.threads < 1:
        raise ConfigError(f"HEATKERNEL_THREADS must be >= 1, got {settings.threads}")
    return settings
