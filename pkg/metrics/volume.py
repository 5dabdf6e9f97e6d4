"""Ball volumes V_d(x,r) = Σ_{d(x,y)<r} θ(y) and the volume doubling check."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from graph_core.errors import InvalidParams, RegionTooSmall
from graph_core.graph import GraphSource, IntensionalGraph, Vertex, WeightedGraph

from .metric import Metric

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BallVolumeReport:
    center: Vertex
    radii: list[float]
    volumes: list[float]
    doubling_ratios: list[float]

    @property
    def doubling_constant(self) -> float:
        """Empirical C_d: the largest observed V(x,2r)/V(x,r)."""
        return max(self.doubling_ratios, default=1.0)

    def as_dict(self) -> dict:
        return {
            "center": self.center,
            "radii": self.radii,
            "volumes": self.volumes,
            "doubling_ratios": self.doubling_ratios,
            "doubling_constant": self.doubling_constant,
        }


def _explored_region(g: GraphSource, m: Metric, x: Vertex, reach: float) -> WeightedGraph:
    """Finite region holding every vertex within metric distance ``reach``."""
    if isinstance(g, IntensionalGraph):
        hops = math.floor(reach / m.delta_lower) + 1
        return g.ball(x, hops)
    g.theta(x)
    return g


def ball_volume(g: GraphSource, m: Metric, x: Vertex, radii: list[float]) -> BallVolumeReport:
    """Volumes of the open balls of the given radii and of twice those radii.

    Raises :class:`RegionTooSmall` when a window boundary vertex lies closer
    to ``x`` than the largest doubled radius allows: vertices outside the
    window could then belong to the ball.
    """
    radii = [float(r) for r in radii]
    if not radii or any(not (r > 0 and math.isfinite(r)) for r in radii):
        raise InvalidParams(f"radii must be positive and finite, got {radii}")
    reach = 2 * max(radii)
    region = _explored_region(g, m, x, reach)
    vertices = list(region.vertices)
    d = m.distance_matrix([x], vertices)[0]

    if isinstance(region, WeightedGraph) and region.boundary and not isinstance(g, IntensionalGraph):
        d_boundary = min(d[region.index[b]] for b in region.boundary)
        # anything outside is at least one more edge beyond some boundary vertex
        if d_boundary + m.delta_lower < reach:
            raise RegionTooSmall(
                f"window boundary is {d_boundary:.6g} from {x!r}; a ball of radius {reach:.6g} needs more"
            )

    theta = region.theta_array
    order = np.argsort(d, kind="stable")
    d_sorted = d[order]
    cum = np.concatenate(([0.0], np.cumsum(theta[order])))

    def volume(r: float) -> float:
        return float(cum[np.searchsorted(d_sorted, r, side="left")])

    volumes = [volume(r) for r in radii]
    ratios = [volume(2 * r) / v for r, v in zip(radii, volumes)]
    log.debug("ball volumes at %r: %s", x, volumes)
    return BallVolumeReport(x, radii, volumes, ratios)
