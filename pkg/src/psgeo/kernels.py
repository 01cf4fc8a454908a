"""
Regularized quadrant time integrals of correlator series.

The double integral over ``t1 < 0 < t2`` of ``exp(i nu (t1 - t2))`` is made
convergent with the damping ``exp(eps t1) exp(-eps t2)``, giving
``1 / (i nu + eps)**2``.  Its ``eps -> 0`` limit ``-1/nu**2`` is the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FREQ_TOL, DivergentDCError, ParameterError
from .harmonics import CorrelatorSeries

__all__ = ["KernelConfig", "quadrant_kernel", "damped_kernel", "integrate_correlator",
           "richardson_limit", "cos_product_kernel"]

ANALYTIC = "analytic-limit"
DAMPED = "damped-numeric"


@dataclass(frozen=True)
class KernelConfig:
    """
    Options for :func:`integrate_correlator`.

    Parameters
    ----------
    epsilon : float
        Largest damping rate used in ``damped-numeric`` mode.
    mode : {"analytic-limit", "damped-numeric"}
    richardson_orders : int
        Number of damping rates ``epsilon / 2**n`` fed to the extrapolation.
    """

    epsilon: float = 0.1
    mode: str = ANALYTIC
    richardson_orders: int = 8

    def __post_init__(self):
        if self.mode not in (ANALYTIC, DAMPED):
            raise ParameterError(f"unknown kernel mode {self.mode!r}")
        if self.mode == DAMPED and not self.epsilon > 0:
            raise ParameterError("epsilon must be positive in damped-numeric mode")
        if self.richardson_orders < 1:
            raise ParameterError("richardson_orders must be at least 1")

    @property
    def epsilons(self) -> np.ndarray:
        return self.epsilon * 0.5 ** np.arange(self.richardson_orders)


def quadrant_kernel(nu: float) -> float:
    """
    ``lim_{eps -> 0+} 1/(i nu + eps)**2 = -1/nu**2``.

    Raises
    ------
    DivergentDCError
        For ``nu == 0``.
    """
    nu = float(nu)
    if nu == 0.0:
        raise DivergentDCError("zero-frequency component reached the quadrant kernel")
    return -1.0 / nu ** 2


def damped_kernel(nu, eps: float):
    """Damped kernel ``1/(i nu + eps)**2`` (vectorized over ``nu``)."""
    return 1.0 / (1j * np.asarray(nu, dtype=float) + eps) ** 2


def cos_product_kernel(w1: float, w2: float) -> float:
    """Quadrant integral of ``cos(w1 t12) cos(w2 t12)`` via the half-sum identity."""
    total = 0.0
    for nu in (w1 + w2, w1 - w2):
        # cos(nu t) = (e^{i nu t} + e^{-i nu t}) / 2 and K is even
        total += 0.5 * quadrant_kernel(nu)
    return total


def richardson_limit(eps, values) -> complex:
    """
    Extrapolate ``values(eps)`` to ``eps = 0`` with Neville's algorithm.

    The values are treated as a polynomial in ``eps`` (odd powers appear
    whenever sine components are present, so an even-only fit is not used).
    """
    x = np.asarray(eps, dtype=float)
    p = np.array(values, dtype=complex)
    n = x.size
    for m in range(1, n):
        # P_{i..i+m}(0) from its two parents
        p[: n - m] = (x[m:] * p[: n - m] - x[: n - m] * p[1: n - m + 1]) / (x[m:] - x[: n - m])
    return complex(p[0])


def integrate_correlator(c: CorrelatorSeries, cfg: KernelConfig | None = None) -> complex:
    """
    Apply the quadrant kernel to every term of ``c``.

    Raises
    ------
    DivergentDCError
        If ``c`` has a zero-frequency term in analytic-limit mode.
    """
    cfg = cfg or KernelConfig()
    if len(c) == 0:
        return 0.0 + 0.0j
    if cfg.mode == ANALYTIC:
        if np.any(np.abs(c.nu) < FREQ_TOL):
            raise DivergentDCError("zero-frequency component reached the quadrant kernel")
        return complex(np.sum(c.amp * (-1.0 / c.nu ** 2)))
    eps = cfg.epsilons
    vals = [np.sum(c.amp * damped_kernel(c.nu, e)) for e in eps]
    return richardson_limit(eps, vals)
