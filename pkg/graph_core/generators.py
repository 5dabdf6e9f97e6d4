"""Graph families: ℤ^d lattice windows, (q+1)-regular tree balls and their
radial quotient, random bounded-degree graphs, plus the intensional
(infinite) ℤ and tree."""

from __future__ import annotations

import itertools
import logging
from typing import Callable

import numpy as np

from .assumptions import ClaimedBounds
from .errors import InvalidParams
from .graph import IntensionalGraph, Vertex, WeightedGraph, build_graph

log = logging.getLogger(__name__)

TREE_ROOT = "o"


def lattice_id(coords: tuple[int, ...]) -> Vertex:
    return ",".join(str(c) for c in coords)


def lattice_coords(v: Vertex) -> tuple[int, ...]:
    return tuple(int(c) for c in v.split(","))


def lattice_window(radius: int, dim: int = 1) -> WeightedGraph:
    """The cube {−radius..radius}^dim of ℤ^dim with θ ≡ 1 and w ≡ 1."""
    if radius < 1 or dim < 1:
        raise InvalidParams(f"lattice_window needs radius >= 1 and dim >= 1, got {radius}, {dim}")
    span = range(-radius, radius + 1)
    points = list(itertools.product(span, repeat=dim))
    vertices = [(lattice_id(p), 1.0) for p in points]
    edges = []
    boundary = []
    for p in points:
        if any(abs(c) == radius for c in p):
            boundary.append(lattice_id(p))
        for axis in range(dim):
            if p[axis] < radius:
                q = p[:axis] + (p[axis] + 1,) + p[axis + 1:]
                edges.append((lattice_id(p), lattice_id(q), 1.0))
    meta = {"generator": "lattice_window", "params": {"radius": radius, "dim": dim}}
    return build_graph(vertices, edges, boundary=boundary, meta=meta)


def _tree_children(v: Vertex, q: int) -> list[Vertex]:
    fan = q + 1 if v == TREE_ROOT else q
    return [f"{v}.{i}" for i in range(fan)]


def _tree_parent(v: Vertex) -> Vertex | None:
    if v == TREE_ROOT:
        return None
    return v.rsplit(".", 1)[0]


def _check_tree_id(v: Vertex, q: int) -> None:
    parts = v.split(".")
    if parts[0] != TREE_ROOT:
        raise ValueError(v)
    for depth, label in enumerate(parts[1:]):
        fan = q + 1 if depth == 0 else q
        if not label.isdigit() or int(label) >= fan:
            raise ValueError(v)


def tree_distance(u: Vertex, v: Vertex) -> int:
    """Hop distance between two tree vertex ids (path labels from the root)."""
    a, b = u.split("."), v.split(".")
    common = 0
    for x, y in zip(a, b):
        if x != y:
            break
        common += 1
    return (len(a) - common) + (len(b) - common)


def tree_ball(q: int, radius: int) -> WeightedGraph:
    """Ball of the given radius around the root of the (q+1)-regular tree."""
    if q < 1 or radius < 0:
        raise InvalidParams(f"tree_ball needs q >= 1 and radius >= 0, got {q}, {radius}")
    vertices = [(TREE_ROOT, 1.0)]
    edges = []
    shell = [TREE_ROOT]
    for _ in range(radius):
        nxt = []
        for v in shell:
            for c in _tree_children(v, q):
                vertices.append((c, 1.0))
                edges.append((v, c, 1.0))
                nxt.append(c)
        shell = nxt
    boundary = shell if radius > 0 else [TREE_ROOT]
    meta = {"generator": "tree_ball", "params": {"q": q, "radius": radius}}
    return build_graph(vertices, edges, boundary=boundary, meta=meta)


def tree_shell_size(q: int, n: int) -> int:
    return 1 if n == 0 else (q + 1) * q ** (n - 1)


def tree_shells(q: int, radius: int) -> WeightedGraph:
    """Radial quotient of the (q+1)-regular tree: the path 0..radius with
    θ(n) = |S_n| and w(n, n+1) = |S_{n+1}|, one vertex per sphere.

    On functions of the distance to the root its Laplacian is the tree's, so
    H(0, n; t) is the tree kernel at distance n.
    """
    if q < 1 or radius < 1:
        raise InvalidParams(f"tree_shells needs q >= 1 and radius >= 1, got {q}, {radius}")
    vertices = [(str(n), float(tree_shell_size(q, n))) for n in range(radius + 1)]
    edges = [(str(n), str(n + 1), float(tree_shell_size(q, n + 1))) for n in range(radius)]
    meta = {"generator": "tree_shells", "params": {"q": q, "radius": radius}}
    return build_graph(vertices, edges, boundary=[str(radius)], meta=meta)


def random_bounded_degree(
    n: int,
    N: int,
    theta_range: tuple[float, float] = (1.0, 1.0),
    w_range: tuple[float, float] = (1.0, 1.0),
    seed: int = 0,
    extra_edge_fraction: float = 0.5,
) -> WeightedGraph:
    """Connected random graph on n vertices with every degree ≤ N.

    A random spanning tree (each new vertex attached to an earlier vertex
    with spare degree) is completed with random extra edges. Identical
    arguments give identical graphs.
    """
    if n < 1 or N < 1 or (n > 2 and N < 2):
        raise InvalidParams(f"random_bounded_degree needs n >= 1 and N >= 2 (N >= 1 for n <= 2), got n={n}, N={N}")
    lo, hi = theta_range
    if not 0 < lo <= hi:
        raise InvalidParams(f"theta range {theta_range} must satisfy 0 < lo <= hi")
    wlo, whi = w_range
    if not 0 < wlo <= whi:
        raise InvalidParams(f"weight range {w_range} must satisfy 0 < lo <= hi")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    width = len(str(n - 1))
    names = [f"v{i:0{width}d}" for i in range(n)]
    degree = [0] * n
    pairs: set[tuple[int, int]] = set()

    for i in range(1, n):
        candidates = [j for j in range(i) if degree[j] < N]
        j = candidates[int(rng.integers(len(candidates)))]
        pairs.add((j, i))
        degree[i] += 1
        degree[j] += 1

    attempts = int(extra_edge_fraction * n * N)
    for _ in range(attempts):
        a, b = (int(v) for v in rng.integers(n, size=2))
        if a == b:
            continue
        a, b = min(a, b), max(a, b)
        if (a, b) in pairs or degree[a] >= N or degree[b] >= N:
            continue
        pairs.add((a, b))
        degree[a] += 1
        degree[b] += 1

    thetas = rng.uniform(lo, hi, size=n) if hi > lo else np.full(n, lo)
    ordered = sorted(pairs)
    weights = rng.uniform(wlo, whi, size=len(ordered)) if whi > wlo else np.full(len(ordered), wlo)
    vertices = [(names[i], float(thetas[i])) for i in range(n)]
    edges = [(names[a], names[b], float(w)) for (a, b), w in zip(ordered, weights)]
    meta = {
        "generator": "random_bounded_degree",
        "params": {"n": n, "N": N, "theta_range": list(theta_range), "w_range": list(w_range), "seed": seed},
    }
    log.debug("random graph: n=%d, edges=%d, max degree=%d", n, len(edges), max(degree))
    return build_graph(vertices, edges, meta=meta)


def lattice_Z() -> IntensionalGraph:
    """The infinite path ℤ with θ ≡ 1, w ≡ 1 (vertex ids are integers as strings)."""

    def neighbors(v: Vertex):
        i = int(v)
        return [(str(i - 1), 1.0), (str(i + 1), 1.0)]

    def theta(v: Vertex) -> float:
        int(v)
        return 1.0

    return IntensionalGraph(
        theta, neighbors, name="Z", claimed=ClaimedBounds(2.0, 1.0, 2),
        meta={"generator": "lattice_Z", "params": {}},
    )


def regular_tree(q: int) -> IntensionalGraph:
    """The infinite (q+1)-regular tree with θ ≡ 1, w ≡ 1, rooted at ``"o"``."""
    if q < 1:
        raise InvalidParams(f"regular_tree needs q >= 1, got {q}")

    def neighbors(v: Vertex):
        _check_tree_id(v, q)
        out = [(c, 1.0) for c in _tree_children(v, q)]
        parent = _tree_parent(v)
        if parent is not None:
            out.append((parent, 1.0))
        return out

    def theta(v: Vertex) -> float:
        _check_tree_id(v, q)
        return 1.0

    return IntensionalGraph(
        theta, neighbors, name=f"T{q + 1}", claimed=ClaimedBounds(float(q + 1), 1.0, q + 1),
        meta={"generator": "regular_tree", "params": {"q": q}},
    )


def two_vertex(theta_a: float = 1.0, theta_b: float = 1.0, w: float = 1.0) -> WeightedGraph:
    meta = {"generator": "two_vertex", "params": {"theta_a": theta_a, "theta_b": theta_b, "w": w}}
    return build_graph([("a", theta_a), ("b", theta_b)], [("a", "b", w)], meta=meta)


GENERATORS: dict[str, Callable[..., WeightedGraph]] = {
    "lattice_window": lattice_window,
    "tree_ball": tree_ball,
    "tree_shells": tree_shells,
    "random_bounded_degree": random_bounded_degree,
    "two_vertex": two_vertex,
}
