"""
Dilogarithm and trigamma for real arguments.
"""

from __future__ import annotations

import math

from .core import ParameterError

__all__ = ["dilog", "trigamma"]

_ZETA2 = math.pi ** 2 / 6.0
# B_{2k} for k = 1..8 in the asymptotic trigamma series
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


def _dilog_series(z: float) -> float:
    total, term, k = 0.0, z, 1
    while True:
        inc = term / (k * k)
        total += inc
        if abs(inc) < 1e-17 * max(abs(total), 1e-300):
            return total
        k += 1
        term *= z


def dilog(z: float) -> float:
    """
    Real dilogarithm ``Li2(z) = sum_k z**k / k**2`` on ``[0, 1]``.

    Uses the power series for ``z <= 1/2`` and the reflection
    ``Li2(z) + Li2(1-z) = pi**2/6 - ln z ln(1-z)`` above.
    """
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise ParameterError(f"dilog argument {z} outside [0, 1]")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return _ZETA2
    if z <= 0.5:
        return _dilog_series(z)
    return _ZETA2 - math.log(z) * math.log1p(-z) - _dilog_series(1.0 - z)


def trigamma(z: float) -> float:
    """
    Trigamma ``psi_1(z) = sum_n 1/(z+n)**2`` for ``z > 0``.

    The argument is shifted above 10 with ``psi_1(z) = psi_1(z+1) + 1/z**2``
    and the asymptotic Bernoulli series finishes the job.
    """
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise ParameterError(f"trigamma needs a positive finite argument, got {z}")
    acc = 0.0
    while z < 10.0:
        acc += 1.0 / (z * z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    tail = 0.0
    power = inv * inv2
    for b in _BERNOULLI:
        tail += b * power
        power *= inv2
    return acc + inv + 0.5 * inv2 + tail
