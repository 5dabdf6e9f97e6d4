"""Uniform time grids and two-point functions sampled on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from graph_core.errors import BallMismatch, GridMismatch, InvalidParams
from graph_core.graph import Vertex, WeightedGraph


@dataclass(frozen=True)
class TimeGrid:
    """Nodes t_i = i·t_max/m, i = 0..m."""

    t_max: float
    m: int

    def __post_init__(self):
        if self.m < 1 or not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise InvalidParams(f"time grid needs m >= 1 and 0 < t_max < inf, got m={self.m}, t_max={self.t_max}")

    @property
    def h(self) -> float:
        return self.t_max / self.m

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.t_max * np.arange(self.m + 1) / self.m

    def index_of(self, t: float) -> int:
        i = round(t / self.h)
        if not (0 <= i <= self.m) or not math.isclose(i * self.h, t, rel_tol=1e-12, abs_tol=1e-15):
            raise GridMismatch(f"t = {t} is not a node of {self}")
        return i

    def coarsen(self) -> TimeGrid:
        if self.m % 2:
            raise GridMismatch(f"grid with {self.m} intervals cannot be halved")
        return TimeGrid(self.t_max, self.m // 2)

    def refine(self) -> TimeGrid:
        return TimeGrid(self.t_max, self.m * 2)

    def trapezoid_weights(self, i: int) -> np.ndarray:
        """Composite trapezoid weights for ∫_0^{t_i}, lag-indexed d = 0..i."""
        if i == 0:
            return np.zeros(1)
        w = np.full(i + 1, self.h)
        w[0] = w[-1] = self.h / 2
        return w


@dataclass(frozen=True)
class TimeGridFunction:
    """Values of F(x,y;·) at the nodes of a grid, for one pair of base points."""

    x: Vertex
    y: Vertex
    grid: TimeGrid
    values: np.ndarray
    ball: tuple[Vertex, ...] = ()

    def at(self, t: float) -> float:
        return float(self.values[self.grid.index_of(t)])


@dataclass(frozen=True)
class TimeGridKernel:
    """A two-point family F(u,v;t_i) over a ball: ``samples[i]`` is the matrix
    at node i, rows and columns in ``ball.vertices`` order."""

    ball: WeightedGraph
    grid: TimeGrid
    samples: np.ndarray

    @classmethod
    def sample(cls, ball: WeightedGraph, grid: TimeGrid, fn: Callable[[float], np.ndarray]) -> TimeGridKernel:
        return cls(ball, grid, np.stack([np.asarray(fn(t), dtype=float) for t in grid.nodes]))

    @classmethod
    def from_pointwise(cls, ball: WeightedGraph, grid: TimeGrid, fn: Callable[[Vertex, Vertex, float], float]) -> TimeGridKernel:
        vs = ball.vertices
        return cls.sample(ball, grid, lambda t: [[fn(u, v, t) for v in vs] for u in vs])

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return self.ball.vertices

    def weighted(self) -> np.ndarray:
        """samples · diag(θ): the θ-weighted kernels the convolution sums over."""
        return self.samples * self.ball.theta_array[None, None, :]

    def column(self, y: Vertex) -> np.ndarray:
        """F(·, y; t_i) as an (n, m+1) array."""
        return self.samples[:, :, self.ball.index[y]].T

    def restrict(self, grid: TimeGrid) -> TimeGridKernel:
        """Samples on a coarser grid whose nodes are a subset of this one."""
        if grid.m == 0 or self.grid.m % grid.m or not math.isclose(grid.t_max, self.grid.t_max):
            raise GridMismatch(f"{grid} is not a coarsening of {self.grid}")
        return TimeGridKernel(self.ball, grid, self.samples[:: self.grid.m // grid.m])

    def function(self, x: Vertex, y: Vertex) -> TimeGridFunction:
        i, j = self.ball.index[x], self.ball.index[y]
        return TimeGridFunction(x, y, self.grid, self.samples[:, i, j].copy(), self.vertices)


def check_compatible(f1: TimeGridKernel, f2: TimeGridKernel) -> None:
    if f1.grid != f2.grid:
        raise GridMismatch(f"time grids differ: {f1.grid} vs {f2.grid}")
    if f1.vertices != f2.vertices or not np.array_equal(f1.ball.theta_array, f2.ball.theta_array):
        raise BallMismatch("kernels are sampled over different balls")
