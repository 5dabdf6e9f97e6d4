"""Closed-form heat kernels with θ ≡ 1, w ≡ 1.

* ℤ:                 H(x,y;t) = e^{-2t} I_{|x−y|}(2t)
* (q+1)-regular tree: H = e^{-(q+1)t} [q^{-r/2} I_r(2√q t)
                          − (q−1) Σ_{j≥1} q^{-(r+2j)/2} I_{2j+r}(2√q t)]
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from graph_core.errors import InvalidParams, NoClosedFormForGraph, NonFiniteInput
from graph_core.generators import lattice_coords, tree_distance
from graph_core.graph import GraphSource, Vertex

from .bessel import BESSEL_RTOL, log_bessel_i
from .walks import SeriesValue, walk_series_kernel

log = logging.getLogger(__name__)

MAX_TREE_TERMS = 10_000


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise NonFiniteInput(f"t must be finite and >= 0, got {t}")
    return t


def lattice_Z_kernel(j: int, t: float) -> float:
    """e^{-2t} I_{|j|}(2t)."""
    t = _check_time(t)
    j = abs(int(j))
    if t == 0:
        return 1.0 if j == 0 else 0.0
    return math.exp(log_bessel_i(j, 2 * t) - 2 * t)


def _scaled_tree_term(q: int, nu: int, t: float) -> float:
    """e^{-(q+1)t} q^{-ν/2} I_ν(2√q t)."""
    return math.exp(log_bessel_i(nu, 2 * math.sqrt(q) * t) - (q + 1) * t - 0.5 * nu * math.log(q))


def tree_kernel_series(q: int, r: int, t: float, tail_tol: float = 1e-12) -> SeriesValue:
    """Bessel series for the tree kernel with a certified tail.

    I_ν decreases in ν at fixed argument, so the omitted terms from index j
    on are bounded by q·e^{-(q+1)t} q^{-(r+2j)/2} I_{2j+r}(2√q t).
    """
    if q < 1 or r < 0:
        raise InvalidParams(f"tree kernel needs q >= 1 and r >= 0, got q={q}, r={r}")
    t = _check_time(t)
    if t == 0:
        return SeriesValue(1.0 if r == 0 else 0.0, 0.0, 0)
    lead = _scaled_tree_term(q, r, t)
    if q == 1:
        return SeriesValue(lead, BESSEL_RTOL * lead, 1)
    terms = []
    j = 1
    while True:
        term = _scaled_tree_term(q, r + 2 * j, t)
        tail = q * term
        if tail <= tail_tol or j > MAX_TREE_TERMS:
            break
        terms.append(term)
        j += 1
    value = lead - (q - 1) * math.fsum(terms)
    log.debug("tree kernel q=%d r=%d t=%g: %d series terms, tail %.3g", q, r, t, len(terms), tail)
    return SeriesValue(value, tail + BESSEL_RTOL * lead, len(terms) + 1)


def tree_kernel(q: int, r: int, t: float, tail_tol: float = 1e-12) -> float:
    return tree_kernel_series(q, r, t, tail_tol).value


class ClosedFormFamily(str, enum.Enum):
    LATTICE_Z = "lattice_Z"
    REGULAR_TREE = "regular_tree"


@dataclass(frozen=True)
class ClosedFormKernel:
    """Heat kernel of a family with a known formula, evaluated by distance."""

    family: ClosedFormFamily
    params: Mapping = field(default_factory=dict)
    tail_tol: float = 1e-12

    def eval(self, r: int, t: float) -> SeriesValue:
        if self.family is ClosedFormFamily.LATTICE_Z:
            value = lattice_Z_kernel(r, t)
            return SeriesValue(value, BESSEL_RTOL * value, 1)
        return tree_kernel_series(self.params["q"], r, t, self.tail_tol)

    def walk_series(self, r: int, t: float) -> SeriesValue:
        """Second route for trees: the exponential walk-count series."""
        if self.family is not ClosedFormFamily.REGULAR_TREE:
            raise NoClosedFormForGraph("the walk-count series is only available for trees")
        return walk_series_kernel(self.params["q"], r, t, self.tail_tol)

    @property
    def distance(self) -> Callable[[Vertex, Vertex], int]:
        if self.family is ClosedFormFamily.LATTICE_Z:
            return lambda x, y: abs(lattice_coords(x)[0] - lattice_coords(y)[0])
        return tree_distance

    def kernel(self, x: Vertex, y: Vertex, t: float) -> SeriesValue:
        return self.eval(self.distance(x, y), t)


def closed_form_for(g: GraphSource, tail_tol: float = 1e-12) -> ClosedFormKernel:
    """The closed form matching a generated graph, read from its metadata."""
    meta = g.meta
    generator = meta.get("generator")
    params = meta.get("params", {})
    if generator in ("lattice_window", "lattice_Z") and params.get("dim", 1) == 1:
        return ClosedFormKernel(ClosedFormFamily.LATTICE_Z, {}, tail_tol)
    if generator in ("tree_ball", "regular_tree"):
        return ClosedFormKernel(ClosedFormFamily.REGULAR_TREE, {"q": int(params["q"])}, tail_tol)
    raise NoClosedFormForGraph(f"no closed-form kernel for graphs from generator {generator!r}")
