"""Continuous-time random walk Monte Carlo.

A walker at x waits an exponential time of rate μ(x)/θ(x), then jumps to a
neighbour y with probability w_xy/μ(x). The law of its position at time t is
θ(y)·H_G(x,y;t).

Walkers are advanced together by uniformization: with Λ the largest holding
rate, every walker makes a Poisson(Λt) number of proposals, each accepted
with probability rate(v)/Λ.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from graph_core.errors import InvalidParams, NegativeTime
from graph_core.graph import GraphSource, IntensionalGraph, Vertex, WeightedGraph

log = logging.getLogger(__name__)

BLOCK_SIZE = 50_000
ESCAPE_SIGMAS = 12.0


@dataclass(frozen=True)
class CtrwResult:
    vertices: tuple[Vertex, ...]
    counts: np.ndarray
    n_samples: int
    t: float
    seed: int

    def frequency(self, y: Vertex) -> float:
        try:
            i = self.vertices.index(y)
        except ValueError:
            return 0.0
        return float(self.counts[i]) / self.n_samples

    def standard_error(self, p: float) -> float:
        """Binomial standard error of a frequency with success probability p."""
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.n_samples)

    @property
    def frequencies(self) -> dict[Vertex, float]:
        return {v: float(c) / self.n_samples for v, c in zip(self.vertices, self.counts) if c}


class _JumpTable:
    """Neighbour sampling by one global search: row v stores v + cumulative
    jump probabilities, all in (v, v+1]."""

    def __init__(self, g: WeightedGraph):
        lap = g.laplacian_matrix.tocsr()
        n = len(g)
        self.rate = np.asarray(lap.diagonal(), dtype=float)
        keys, targets = [], []
        for v in range(n):
            lo, hi = lap.indptr[v], lap.indptr[v + 1]
            cols = lap.indices[lo:hi]
            rates = -lap.data[lo:hi]
            mask = cols != v
            cols, rates = cols[mask], rates[mask]
            if cols.size == 0:
                continue
            cum = np.cumsum(rates) / rates.sum()
            cum[-1] = 1.0
            keys.append(v + cum)
            targets.append(cols)
        self.keys = np.concatenate(keys) if keys else np.zeros(0)
        self.targets = np.concatenate(targets) if targets else np.zeros(0, dtype=int)
        self.max_rate = float(self.rate.max()) if n else 0.0

    def jump(self, pos: np.ndarray, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.keys, pos + u, side="right")
        return self.targets[np.minimum(idx, self.targets.size - 1)]


def _walk_block(table: _JumpTable, start: int, n: int, t: float, rng: np.random.Generator, n_vertices: int) -> np.ndarray:
    pos = np.full(n, start, dtype=np.int64)
    if table.max_rate == 0 or t == 0:
        return np.bincount(pos, minlength=n_vertices)
    proposals = rng.poisson(table.max_rate * t, size=n)
    for step in range(1, int(proposals.max(initial=0)) + 1):
        active = np.flatnonzero(proposals >= step)
        if active.size == 0:
            break
        p = pos[active]
        accept = rng.random(active.size) * table.max_rate < table.rate[p]
        movers = active[accept]
        if movers.size:
            pos[movers] = table.jump(pos[movers], rng.random(movers.size))
    return np.bincount(pos, minlength=n_vertices)


def _walk_region(g: GraphSource, x: Vertex, t: float) -> WeightedGraph:
    """Finite graphs are walked as they are; intensional ones on a ball the
    walkers leave only with negligible probability."""
    if not isinstance(g, IntensionalGraph):
        return g
    rate = g.claimed[0] / g.claimed[1] if g.claimed else 2.0 * g.mu(x) / g.theta(x)
    mean = rate * t
    radius = math.ceil(mean + ESCAPE_SIGMAS * math.sqrt(mean) + ESCAPE_SIGMAS)
    log.debug("ctrw on %r: walking ball of radius %d", g, radius)
    return g.ball(x, radius)


def ctrw_simulate(
    g: GraphSource,
    x: Vertex,
    t: float,
    n_samples: int,
    seed: int = 0,
    *,
    threads: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> CtrwResult:
    """Occupation counts at time t of ``n_samples`` independent walkers from x.

    Blocks of walkers draw from child streams of one ``SeedSequence``, so the
    result depends on the seed and block size, never on the thread count.
    """
    t = float(t)
    if math.isnan(t):
        raise InvalidParams("t is NaN")
    if t < 0:
        raise NegativeTime(f"t = {t} is negative")
    if n_samples < 1:
        raise InvalidParams(f"need at least one sample, got {n_samples}")
    region = _walk_region(g, x, t)
    table = _JumpTable(region)
    start = region.index[x]
    n_vertices = len(region)
    sizes = [block_size] * (n_samples // block_size)
    if n_samples % block_size:
        sizes.append(n_samples % block_size)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    workers = threads or os.cpu_count() or 1

    def run(args):
        size, stream = args
        return _walk_block(table, start, size, t, np.random.default_rng(stream), n_vertices)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        counts = sum(pool.map(run, zip(sizes, streams)))
    log.info("ctrw from %r at t=%g: %d walkers, seed=%d", x, t, n_samples, seed)
    return CtrwResult(region.vertices, np.asarray(counts), n_samples, t, seed)
