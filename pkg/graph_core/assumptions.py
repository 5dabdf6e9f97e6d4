"""Standing assumptions on the weighted graph.

* (G1) boundedness of the Laplacian: A = sup μ/θ ≤ M
* (G2) uniform lower bound of the vertex weights: inf θ ≥ η
* (G3') uniformly bounded combinatorial degree: deg ≤ N
* (E1) edge weights bounded below, used by the edge-weighted distance

On a finite graph the suprema are maxima over the stored vertices. On an
intensional graph they are taken over an exploration ball and the report
records the radius; it cannot certify the global values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import AssumptionViolated
from .graph import GraphSource, IntensionalGraph, Vertex

log = logging.getLogger(__name__)


class ClaimedBounds(NamedTuple):
    M: float | None = None
    eta: float | None = None
    N: int | None = None


@dataclass(frozen=True)
class AssumptionReport:
    A: float
    theta_inf: float
    max_degree: int
    w_inf: float
    g1_bound_M: float | None
    g2_bound_eta: float | None
    g3p_bound_N: int | None
    g1_satisfied: bool
    g2_satisfied: bool
    g3p_satisfied: bool
    vertex_count: int
    exploration_center: Vertex | None = None
    exploration_radius: float | None = None

    @property
    def M(self) -> float:
        """Bound used downstream for sup μ/θ: the claim if given, else A."""
        return self.g1_bound_M if self.g1_bound_M is not None else self.A

    @property
    def eta(self) -> float:
        return self.g2_bound_eta if self.g2_bound_eta is not None else self.theta_inf

    @property
    def N(self) -> int:
        return self.g3p_bound_N if self.g3p_bound_N is not None else self.max_degree

    @property
    def all_satisfied(self) -> bool:
        return self.g1_satisfied and self.g2_satisfied and self.g3p_satisfied

    def as_dict(self) -> dict:
        return {
            "A": self.A,
            "theta_inf": self.theta_inf,
            "max_degree": self.max_degree,
            "w_inf": self.w_inf,
            "g1_bound_M": self.g1_bound_M,
            "g2_bound_eta": self.g2_bound_eta,
            "g3p_bound_N": self.g3p_bound_N,
            "g1_satisfied": self.g1_satisfied,
            "g2_satisfied": self.g2_satisfied,
            "g3p_satisfied": self.g3p_satisfied,
            "vertex_count": self.vertex_count,
            "exploration_center": self.exploration_center,
            "exploration_radius": self.exploration_radius,
        }


def check_assumptions(
    g: GraphSource,
    claimed: ClaimedBounds | tuple | None = None,
    *,
    center: Vertex | None = None,
    radius: float | None = None,
) -> AssumptionReport:
    """Compute A, inf θ, max degree (and min edge weight) and flag each
    assumption against ``claimed`` bounds when given.

    Without claims the flags only state that the computed finite-region
    values are finite and positive.
    """
    if isinstance(g, IntensionalGraph):
        if center is None or radius is None:
            raise ValueError("an intensional graph needs an exploration center and radius")
        if claimed is None:
            claimed = g.claimed
        region = g.ball(center, radius)
        # vertices on the rim of the ball still report their full degree
        stats = [(g.mu(v), g.theta(v), g.degree(v), g.neighbors(v)) for v in region.vertices]
    else:
        if center is not None:
            region = g.ball(center, math.inf if radius is None else radius)
        else:
            region = g
        stats = [(region.mu(v), region.theta(v), region.degree(v), region.neighbors(v)) for v in region.vertices]

    claimed = ClaimedBounds(*claimed) if claimed is not None else ClaimedBounds()
    A = max((m / th for m, th, _, _ in stats), default=0.0)
    theta_inf = min((th for _, th, _, _ in stats), default=math.inf)
    max_degree = max((d for _, _, d, _ in stats), default=0)
    w_inf = min((w for *_, nbrs in stats for _, w in nbrs), default=math.inf)

    if claimed.M is not None:
        g1 = A <= claimed.M
    else:
        g1 = math.isfinite(A)
    if claimed.eta is not None:
        g2 = claimed.eta > 0 and theta_inf >= claimed.eta
    else:
        g2 = theta_inf > 0
    if claimed.N is not None:
        g3p = max_degree <= claimed.N
    else:
        g3p = True

    report = AssumptionReport(
        A=A,
        theta_inf=theta_inf,
        max_degree=max_degree,
        w_inf=w_inf,
        g1_bound_M=claimed.M,
        g2_bound_eta=claimed.eta,
        g3p_bound_N=claimed.N,
        g1_satisfied=g1,
        g2_satisfied=g2,
        g3p_satisfied=g3p,
        vertex_count=len(stats),
        exploration_center=center,
        exploration_radius=radius,
    )
    if not report.all_satisfied:
        log.warning("assumption check failed: G1=%s G2=%s G3'=%s", g1, g2, g3p)
    return report


def standing_bounds(g: GraphSource, *, center: Vertex | None = None, radius: float | None = None) -> AssumptionReport:
    """Bounds (M, η, N) the kernel constructions run on.

    A finite graph supplies its computed values. An intensional graph must
    carry claimed bounds; they are checked on the exploration ball when a
    center is given.
    """
    if isinstance(g, IntensionalGraph):
        if g.claimed is None or None in g.claimed:
            raise AssumptionViolated(f"{g.name} carries no claimed bounds (M, eta, N)")
        if center is None:
            claimed = ClaimedBounds(*g.claimed)
            return AssumptionReport(
                A=claimed.M, theta_inf=claimed.eta, max_degree=claimed.N, w_inf=math.nan,
                g1_bound_M=claimed.M, g2_bound_eta=claimed.eta, g3p_bound_N=claimed.N,
                g1_satisfied=True, g2_satisfied=True, g3p_satisfied=True, vertex_count=0,
            )
        report = check_assumptions(g, center=center, radius=1 if radius is None else radius)
    else:
        report = check_assumptions(g)
    if not report.all_satisfied:
        raise AssumptionViolated(f"standing assumptions fail: {report.as_dict()}")
    if not report.eta > 0:
        raise AssumptionViolated("vertex weights have no positive lower bound")
    return report
