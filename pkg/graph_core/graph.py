"""Vertex- and edge-weighted undirected graphs, the graph Laplacian and its
pointwise kernel.

Two representations share one read interface (``theta``, ``neighbors``,
``mu``, ``ball``):

* :class:`WeightedGraph` stores a finite graph. When it is a window cut out
  of a larger graph, the vertices whose neighbourhood was truncated are kept
  in ``boundary``.
* :class:`IntensionalGraph` produces θ and neighbour lists on demand from
  callbacks, so infinite graphs (ℤ, regular trees) can be explored by
  materializing finite balls.

The Laplacian is ``Δf(x) = (1/θ(x)) Σ_y (f(x) − f(y)) w_xy``.
"""

from __future__ import annotations

import math
from collections import deque
from functools import cached_property
from types import MappingProxyType
from typing import TYPE_CHECKING, Callable, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np
from scipy import sparse

from .errors import (
    DuplicateEdge,
    DuplicateVertex,
    MissingFunctionValue,
    NonFiniteWeight,
    NonPositiveTheta,
    NonSymmetricWeight,
    SelfLoop,
    UnknownVertex,
)

if TYPE_CHECKING:
    from .assumptions import ClaimedBounds

Vertex = str
Neighbors = tuple[tuple[Vertex, float], ...]


class WeightedGraph:
    """Immutable finite weighted graph. Build it with :func:`build_graph`."""

    def __init__(
        self,
        theta: Mapping[Vertex, float],
        adjacency: Mapping[Vertex, Iterable[tuple[Vertex, float]]],
        boundary: Iterable[Vertex] = (),
        meta: Mapping | None = None,
    ):
        self._theta = MappingProxyType(dict(theta))
        self._adjacency = MappingProxyType(
            {v: tuple(sorted(adjacency.get(v, ()))) for v in self._theta}
        )
        self._weights = MappingProxyType({v: dict(nbrs) for v, nbrs in self._adjacency.items()})
        self._boundary = frozenset(boundary)
        self._meta = MappingProxyType(dict(meta or {}))
        self._vertices = tuple(sorted(self._theta))

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v: object) -> bool:
        return v in self._theta

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self._vertices)

    def __repr__(self) -> str:
        kind = "window" if self._boundary else "finite"
        return f"WeightedGraph({len(self)} vertices, {self.edge_count} edges, {kind})"

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return self._vertices

    @property
    def boundary(self) -> frozenset[Vertex]:
        return self._boundary

    @property
    def meta(self) -> Mapping:
        return self._meta

    @property
    def is_window(self) -> bool:
        return bool(self._boundary)

    def _require(self, x: Vertex) -> None:
        if x not in self._theta:
            raise UnknownVertex(f"vertex {x!r} is not in the graph")

    def theta(self, x: Vertex) -> float:
        self._require(x)
        return self._theta[x]

    def neighbors(self, x: Vertex) -> Neighbors:
        self._require(x)
        return self._adjacency[x]

    def w(self, x: Vertex, y: Vertex) -> float:
        self._require(x)
        self._require(y)
        return self._weights[x].get(y, 0.0)

    def degree(self, x: Vertex) -> int:
        return len(self.neighbors(x))

    def mu(self, x: Vertex) -> float:
        return math.fsum(w for _, w in self.neighbors(x))

    def edges(self) -> Iterator[tuple[Vertex, Vertex, float]]:
        for u in self._vertices:
            for v, w in self._adjacency[u]:
                if u < v:
                    yield u, v, w

    @cached_property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self._adjacency.values()) // 2

    @cached_property
    def index(self) -> Mapping[Vertex, int]:
        return MappingProxyType({v: i for i, v in enumerate(self._vertices)})

    @cached_property
    def theta_array(self) -> np.ndarray:
        return np.array([self._theta[v] for v in self._vertices], dtype=float)

    @cached_property
    def laplacian_matrix(self) -> sparse.csr_matrix:
        """Sparse matrix of Δ in the sorted vertex order: entry (x, y) is δ_x(y)."""
        rows, cols, vals = [], [], []
        index = self.index
        for x in self._vertices:
            i = index[x]
            th = self._theta[x]
            rows.append(i)
            cols.append(i)
            vals.append(self.mu(x) / th)
            for y, w in self._adjacency[x]:
                rows.append(i)
                cols.append(index[y])
                vals.append(-w / th)
        n = len(self._vertices)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def hop_distances(self, center: Vertex, max_radius: float = math.inf) -> dict[Vertex, int]:
        """Breadth-first hop counts from ``center`` (neighbours visited in id order)."""
        self._require(center)
        dist = {center: 0}
        queue = deque([center])
        while queue:
            u = queue.popleft()
            if dist[u] >= max_radius:
                continue
            for v, _ in self._adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def ball(self, center: Vertex, radius: float) -> WeightedGraph:
        """Sub-window of all vertices within ``radius`` hops of ``center``."""
        inside = self.hop_distances(center, radius)
        adjacency = {v: [(u, w) for u, w in self._adjacency[v] if u in inside] for v in inside}
        boundary = {
            v for v in inside
            if v in self._boundary or len(adjacency[v]) < len(self._adjacency[v])
        }
        theta = {v: self._theta[v] for v in inside}
        return WeightedGraph(theta, adjacency, boundary, self._meta)

    def as_finite(self) -> WeightedGraph:
        """The same vertices and edges, treated as a finite graph in its own right."""
        if not self._boundary:
            return self
        return WeightedGraph(self._theta, self._adjacency, (), self._meta)

    def with_theta(self, theta: Mapping[Vertex, float]) -> WeightedGraph:
        for v in self._vertices:
            _check_theta(v, theta.get(v, float("nan")))
        return WeightedGraph(
            {v: float(theta[v]) for v in self._vertices}, self._adjacency, self._boundary, self._meta
        )


class IntensionalGraph:
    """Graph given by callbacks; explored lazily and cached.

    ``neighbors_fn(v)`` must return the (neighbour, weight) pairs of ``v``
    with positive weights, symmetric across the two endpoints. Unknown
    vertices should raise ``KeyError`` or ``ValueError``.
    """

    def __init__(
        self,
        theta_fn: Callable[[Vertex], float],
        neighbors_fn: Callable[[Vertex], Iterable[tuple[Vertex, float]]],
        *,
        name: str,
        claimed: ClaimedBounds | None = None,
        meta: Mapping | None = None,
    ):
        self._theta_fn = theta_fn
        self._neighbors_fn = neighbors_fn
        self.name = name
        self.claimed = claimed
        self._meta = dict(meta or {})
        self._cache: dict[Vertex, tuple[float, Neighbors]] = {}

    def __repr__(self) -> str:
        return f"IntensionalGraph({self.name!r}, explored={len(self._cache)})"

    @property
    def meta(self) -> Mapping:
        return MappingProxyType(self._meta)

    @property
    def boundary(self) -> frozenset[Vertex]:
        return frozenset()

    def _explore(self, v: Vertex) -> tuple[float, Neighbors]:
        entry = self._cache.get(v)
        if entry is None:
            try:
                th = float(self._theta_fn(v))
                nbrs = tuple(sorted((u, float(w)) for u, w in self._neighbors_fn(v)))
            except (KeyError, ValueError) as exc:
                raise UnknownVertex(f"vertex {v!r} is not in {self.name}") from exc
            _check_theta(v, th)
            for u, w in nbrs:
                if u == v:
                    raise SelfLoop(f"generator produced a loop at {v!r}")
                _check_weight(v, u, w)
            entry = (th, nbrs)
            # idempotent write: the callbacks are deterministic
            self._cache[v] = entry
        return entry

    def theta(self, x: Vertex) -> float:
        return self._explore(x)[0]

    def neighbors(self, x: Vertex) -> Neighbors:
        return self._explore(x)[1]

    def w(self, x: Vertex, y: Vertex) -> float:
        return dict(self.neighbors(x)).get(y, 0.0)

    def degree(self, x: Vertex) -> int:
        return len(self.neighbors(x))

    def mu(self, x: Vertex) -> float:
        return math.fsum(w for _, w in self.neighbors(x))

    def hop_distances(self, center: Vertex, max_radius: float) -> dict[Vertex, int]:
        if not math.isfinite(max_radius):
            raise ValueError("an intensional graph can only be explored to a finite radius")
        dist = {center: 0}
        queue = deque([center])
        while queue:
            u = queue.popleft()
            if dist[u] >= max_radius:
                continue
            for v, _ in self.neighbors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def hop_distance(self, x: Vertex, y: Vertex, max_radius: int) -> float:
        return self.hop_distances(x, max_radius).get(y, math.inf)

    def ball(self, center: Vertex, radius: float) -> WeightedGraph:
        inside = self.hop_distances(center, radius)
        adjacency: dict[Vertex, list[tuple[Vertex, float]]] = {}
        boundary = set()
        for v in inside:
            nbrs = self.neighbors(v)
            kept = []
            for u, w in nbrs:
                if u not in inside:
                    continue
                back = self.w(u, v)
                if back != w:
                    raise NonSymmetricWeight(f"w({v!r},{u!r})={w} but w({u!r},{v!r})={back}")
                kept.append((u, w))
            if len(kept) < len(nbrs):
                boundary.add(v)
            adjacency[v] = kept
        theta = {v: self.theta(v) for v in inside}
        meta = dict(self._meta, center=center, radius=radius)
        return WeightedGraph(theta, adjacency, boundary, meta)


GraphSource = Union[WeightedGraph, IntensionalGraph]


def _check_theta(v: Vertex, theta: float) -> None:
    if not (math.isfinite(theta) and theta > 0):
        raise NonPositiveTheta(f"theta({v!r}) = {theta} must be positive and finite")


def _check_weight(u: Vertex, v: Vertex, w: float) -> None:
    if not math.isfinite(w):
        raise NonFiniteWeight(f"w({u!r},{v!r}) = {w} is not finite")
    if w <= 0:
        raise NonFiniteWeight(f"w({u!r},{v!r}) = {w} must be positive (absent edges have weight 0)")


def build_graph(
    vertex_list: Sequence[tuple[Vertex, float]],
    edge_list: Sequence[tuple[Vertex, Vertex, float]],
    *,
    boundary: Iterable[Vertex] = (),
    meta: Mapping | None = None,
) -> WeightedGraph:
    """Validate vertex and edge lists and return the immutable graph."""
    theta: dict[Vertex, float] = {}
    for v, th in vertex_list:
        th = float(th)
        _check_theta(v, th)
        if v in theta:
            raise DuplicateVertex(f"vertex {v!r} listed twice")
        theta[v] = th

    adjacency: dict[Vertex, list[tuple[Vertex, float]]] = {v: [] for v in theta}
    seen: set[frozenset[Vertex]] = set()
    for u, v, w in edge_list:
        w = float(w)
        if u == v:
            raise SelfLoop(f"edge ({u!r},{u!r}) is a loop")
        for end in (u, v):
            if end not in theta:
                raise UnknownVertex(f"edge ({u!r},{v!r}) uses unknown vertex {end!r}")
        _check_weight(u, v, w)
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateEdge(f"edge ({u!r},{v!r}) given twice")
        seen.add(key)
        adjacency[u].append((v, w))
        adjacency[v].append((u, w))

    boundary = frozenset(boundary)
    for b in boundary:
        if b not in theta:
            raise UnknownVertex(f"boundary vertex {b!r} is not in the graph")
    return WeightedGraph(theta, adjacency, boundary, meta)


def mu(g: GraphSource, x: Vertex) -> float:
    """μ(x), the sum of the weights of the edges at x."""
    return g.mu(x)


def apply_laplacian(g: GraphSource, f: Mapping[Vertex, float], x: Vertex) -> float:
    theta_x = g.theta(x)
    nbrs = g.neighbors(x)
    try:
        fx = f[x]
        total = math.fsum((fx - f[y]) * w for y, w in nbrs)
    except KeyError as exc:
        raise MissingFunctionValue(f"f is not defined at {exc.args[0]!r} (needed for Δf({x!r}))") from exc
    return total / theta_x


def delta_kernel(g: GraphSource, x: Vertex, y: Vertex) -> float:
    """δ_x(y): μ(x)/θ(x) on the diagonal, −w_xy/θ(x) for neighbours, else 0."""
    theta_x = g.theta(x)
    g.theta(y)
    if x == y:
        return g.mu(x) / theta_x
    return -g.w(x, y) / theta_x


def with_degree_theta(g: WeightedGraph) -> WeightedGraph:
    """Replace θ by μ (the degree measure). Isolated vertices keep their θ."""
    return g.with_theta({v: (g.mu(v) or g.theta(v)) for v in g.vertices})
