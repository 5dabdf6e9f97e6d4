"""Modified Bessel functions of the first kind of integer order.

I_n(t) = Σ_{k≥0} (t/2)^{n+2k} / (k! (n+k)!)

The ascending series is summed term by term through the ratio
(t/2)² / ((k+1)(n+k+1)); the prefactor (t/2)^n / n! is kept in the log
domain, so large orders do not overflow before the scaled results are formed.
"""

from __future__ import annotations

import math

from graph_core.errors import NonFiniteInput

BESSEL_RTOL = 1e-16
EXACT_FACTORIAL_MAX = 150
MAX_TERMS = 100_000


def _check(n: int, t: float) -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise NonFiniteInput(f"Bessel order must be a natural number, got {n!r}")
    if not math.isfinite(t) or t < 0:
        raise NonFiniteInput(f"Bessel argument must be finite and >= 0, got {t!r}")


def log_bessel_i(n: int, t: float) -> float:
    """log I_n(t); ``-inf`` for I_n(0) with n ≥ 1."""
    t = float(t)
    _check(n, t)
    if t == 0.0:
        return 0.0 if n == 0 else -math.inf
    half = t / 2
    if n <= EXACT_FACTORIAL_MAX:
        log_prefix = n * math.log(half) - math.log(math.factorial(n))
    else:
        log_prefix = n * math.log(half) - math.lgamma(n + 1)

    q = half * half
    terms = [1.0]
    term = total = 1.0
    k = 0
    while k < MAX_TERMS:
        ratio = q / ((k + 1) * (n + k + 1))
        term *= ratio
        k += 1
        if not math.isfinite(term):
            raise NonFiniteInput(f"I_{n}({t}) overflows the ascending series")
        terms.append(term)
        total += term
        # once the ratio is below 1/2 the remaining tail is below the last term
        if ratio < 0.5 and term < BESSEL_RTOL * total:
            break
    return log_prefix + math.log(math.fsum(terms))


def bessel_i(n: int, t: float) -> float:
    """I_n(t) for natural n and t ≥ 0."""
    value = log_bessel_i(n, t)
    if value > 709.0:
        raise NonFiniteInput(f"I_{n}({t}) overflows a double")
    return math.exp(value)


def bessel_i_scaled(n: int, t: float, shift: float | None = None) -> float:
    """e^{-shift} I_n(t), default shift = t (the exponentially scaled function)."""
    shift = float(t) if shift is None else shift
    return math.exp(log_bessel_i(n, t) - shift)
