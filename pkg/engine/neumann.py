"""Truncation of the Neumann series F = Σ_{ℓ≥1} (−1)^ℓ (L_{G,x}H)^{*ℓ} and the
estimate type every kernel evaluation returns."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from graph_core.errors import InvalidParams

MAX_SERIES_ORDER = 10_000


def _log_majorant(C: float, norm1: float, t: float, k: int, L: int) -> float:
    """log of C t^k (n t)^{L−1} e^{n t} / (L−1)!, an upper bound for
    Σ_{ℓ≥L} C n^{ℓ−1} t^{k+ℓ−1}/(k+ℓ−1)!."""
    nt = norm1 * t
    value = math.log(C) + k * math.log(t) + nt - math.lgamma(L)
    if L > 1:
        value += (L - 1) * math.log(nt) if nt > 0 else -math.inf
    return value


def neumann_tail_order(C: float, norm1: float, t: float, k: int, tol: float) -> int:
    """Smallest L whose omitted tail Σ_{ℓ≥L} C‖f‖₁^{ℓ−1} t^{k+ℓ−1}/(k+ℓ−1)!
    is at most ``tol`` by the exponential majorant; 0 when the whole series is."""
    for name, value in (("C", C), ("norm1", norm1), ("t", t), ("tol", tol)):
        if not (math.isfinite(value) and value >= 0):
            raise InvalidParams(f"{name} must be finite and >= 0, got {value}")
    if k < 0 or tol <= 0:
        raise InvalidParams(f"need k >= 0 and tol > 0, got k={k}, tol={tol}")
    if C == 0 or t == 0:
        return 0
    log_tol = math.log(tol)
    if math.log(C) + k * math.log(t) + norm1 * t <= log_tol:
        return 0
    for L in range(1, MAX_SERIES_ORDER + 1):
        if _log_majorant(C, norm1, t, k, L) <= log_tol:
            return L
    raise InvalidParams(f"series order for tol={tol} exceeds {MAX_SERIES_ORDER}")


def series_tail(C: float, norm1: float, t: float, k: int, L: int) -> float:
    """Bound on Σ_{ℓ>L} |(f)^{*ℓ}| (terms left out when summing through L)."""
    if C == 0 or t == 0:
        return 0.0
    return math.exp(_log_majorant(C, norm1, t, k, L + 1))


@dataclass(frozen=True)
class KernelEstimate:
    value: float
    series_order_L: int
    series_tail_bound: float
    spatial_tail_bound: float = 0.0
    quadrature_error_estimate: float = 0.0
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def total_bound(self) -> float:
        return self.series_tail_bound + self.spatial_tail_bound + self.quadrature_error_estimate

    def as_row(self) -> dict:
        return {
            "value": self.value,
            "series_order": self.series_order_L,
            "series_tail": self.series_tail_bound,
            "spatial_tail": self.spatial_tail_bound,
            "quad_err": self.quadrature_error_estimate,
            "total_bound": self.total_bound,
        }
