"""Walk counts on the (q+1)-regular tree.

b_k(r) is the number of walks of length k between two fixed vertices at
distance r. Two independent routes are provided: the radial recurrence and
the exact power-series expansion of the ordinary generating function

    f_{q+1}(t) = 2q / (q − 1 + (q + 1)√(1 − 4qt²)) · ((1 − √(1 − 4qt²)) / (2qt))^r
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from graph_core.errors import InvalidParams, NonFiniteInput

log = logging.getLogger(__name__)


class SeriesValue(NamedTuple):
    value: float
    tail_bound: float
    terms: int


def _check_tree(q: int, r: int) -> None:
    if q < 1 or r < 0:
        raise InvalidParams(f"walk counts need q >= 1 and r >= 0, got q={q}, r={r}")


@lru_cache(maxsize=64)
def _radial_table(q: int, k_max: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds b_k(0..k_max) with exact integers."""
    width = k_max + 2
    row = [0] * width
    row[0] = 1
    rows = [tuple(row[: k_max + 1])]
    for _ in range(k_max):
        nxt = [0] * width
        nxt[0] = (q + 1) * row[1]
        for r in range(1, width - 1):
            nxt[r] = row[r - 1] + q * row[r + 1]
        row = nxt
        rows.append(tuple(row[: k_max + 1]))
    return tuple(rows)


def tree_walk_counts(q: int, r: int, k_max: int) -> list[int]:
    """[b_0(r), …, b_{k_max}(r)] from the radial recurrence
    b_{k+1}(r) = b_k(r−1) + q·b_k(r+1), b_{k+1}(0) = (q+1)·b_k(1)."""
    _check_tree(q, r)
    if k_max < 0:
        return []
    if r > k_max:
        return [0] * (k_max + 1)
    return [row[r] for row in _radial_table(q, k_max)]


def _mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, ai in enumerate(a[:n]):
        if ai:
            for j, bj in enumerate(b[: n - i]):
                out[i + j] += ai * bj
    return out


def _inverse(a: list[Fraction], n: int) -> list[Fraction]:
    inv = [Fraction(0)] * n
    inv[0] = 1 / a[0]
    for m in range(1, n):
        acc = sum((a[j] * inv[m - j] for j in range(1, min(m, len(a) - 1) + 1)), Fraction(0))
        inv[m] = -acc / a[0]
    return inv


def generating_function_counts(q: int, r: int, k_max: int) -> list[int]:
    """Taylor coefficients of f_{q+1} up to t^{k_max}, in exact rational arithmetic."""
    _check_tree(q, r)
    n = k_max + 1
    if n <= 0:
        return []
    # √(1 − 4qt²) = Σ_m binom(1/2, m) (−4q)^m t^{2m}
    sqrt_series = [Fraction(0)] * (n + 1)
    coeff = Fraction(1)
    for m in range(0, n // 2 + 1):
        if 2 * m <= n:
            sqrt_series[2 * m] = coeff * (-4 * q) ** m
        coeff = coeff * (Fraction(1, 2) - m) / (m + 1)
    denominator = [(q + 1) * c for c in sqrt_series[:n]]
    denominator[0] += q - 1
    front = [2 * q * c for c in _inverse(denominator, n)]
    # (1 − √(1 − 4qt²)) / (2qt): drop the constant, shift down one power
    hitting = [-sqrt_series[k + 1] / (2 * q) for k in range(n)]
    series = front
    for _ in range(r):
        series = _mul(series, hitting, n)
    counts = []
    for c in series:
        if c.denominator != 1:
            raise ArithmeticError(f"non-integral walk count coefficient {c}")
        counts.append(int(c))
    return counts


def walk_series_kernel(q: int, r: int, t: float, tol: float = 1e-12) -> SeriesValue:
    """e^{-(q+1)t} Σ_k b_k(r) t^k/k!, truncated at the first K with
    ((q+1)t)^{K+1}/(K+1)! ≤ tol (b_k(r) ≤ (q+1)^k)."""
    _check_tree(q, r)
    if not math.isfinite(t) or t < 0:
        raise NonFiniteInput(f"t must be finite and >= 0, got {t}")
    if t == 0:
        return SeriesValue(1.0 if r == 0 else 0.0, 0.0, 1)
    s = (q + 1) * t
    bound = s
    K = 0
    while bound > tol:
        K += 1
        bound *= s / (K + 1)
    K = max(K, r)
    counts = tree_walk_counts(q, r, K)
    weights = []
    c = 1.0
    for k in range(K + 1):
        if k:
            c *= t / k
        weights.append(float(counts[k]) * c)
    value = math.exp(-s) * math.fsum(weights)
    tail = bound
    log.debug("walk series q=%d r=%d t=%g: %d terms", q, r, t, K + 1)
    return SeriesValue(value, tail, K + 1)
