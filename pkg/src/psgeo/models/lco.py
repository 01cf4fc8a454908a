"""
Linearly coupled oscillators ``H = (p1^2 + p2^2)/2 + (A q1^2 + B q2^2 + C q1 q2)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import DegeneracyError, ParameterError, ParameterPoint
from .base import QuadraticModel

__all__ = ["LCOModel", "lco_model", "lco_geometry", "LCOGeometry", "mnl_matrices"]

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class LCOGeometry:
    """Rotation angle, normal frequencies and their gradients in ``(A, B, C)``."""

    alpha: float
    omega1: float
    omega2: float
    d_alpha: np.ndarray
    d_omega1: np.ndarray
    d_omega2: np.ndarray

    @property
    def mu(self) -> float:
        return float(np.cos(2 * self.alpha))

    @property
    def nu(self) -> float:
        return float(np.sin(2 * self.alpha))


def lco_geometry(A: float, B: float, C: float) -> LCOGeometry:
    """
    Diagonalize the potential ``[[A, C/2], [C/2, B]]`` by a rotation.

    The angle is taken on the branch ``alpha in (-pi/4, pi/4)``, i.e.
    ``tan(2 alpha) = C / (B - A)``; mode 1 is ``(cos a, -sin a)``.
    """
    if A == B:
        raise ParameterError("A must differ from B (the rotation angle is undefined)")
    if C == 0:
        raise ParameterError("C must be nonzero")
    alpha = 0.5 * np.arctan(C / (B - A))
    t = np.tan(alpha)
    w1s = A - 0.5 * C * t
    w2s = B + 0.5 * C * t
    if not (w1s > 0 and w2s > 0):
        raise ParameterError(
            f"both normal frequencies must be real (omega1^2={w1s:.6g}, omega2^2={w2s:.6g})")
    w1, w2 = np.sqrt(w1s), np.sqrt(w2s)
    if abs(w1 - w2) <= DEGENERACY_TOL * max(w1, w2):
        raise DegeneracyError("omega1 and omega2 coincide; the mixed kernel is singular")
    c, s = np.cos(alpha), np.sin(alpha)
    D = (B - A) ** 2 + C ** 2
    d_alpha = np.array([C, -C, B - A]) / (2 * D)
    d_w1 = np.array([c * c, s * s, -s * c]) / (2 * w1)
    d_w2 = np.array([s * s, c * c, s * c]) / (2 * w2)
    return LCOGeometry(float(alpha), float(w1), float(w2), d_alpha, d_w1, d_w2)


def mnl_matrices(mu: float, nu: float):
    """The three parameter matrices of the closed-form metric."""
    M = 0.25 * np.array([[(1 + mu) ** 2, nu ** 2, -(1 + mu) * nu],
                         [nu ** 2, (1 - mu) ** 2, -(1 - mu) * nu],
                         [-(1 + mu) * nu, -(1 - mu) * nu, nu ** 2]])
    N = 0.25 * np.array([[(1 - mu) ** 2, nu ** 2, (1 - mu) * nu],
                         [nu ** 2, (1 + mu) ** 2, (1 + mu) * nu],
                         [(1 - mu) * nu, (1 + mu) * nu, nu ** 2]])
    L = np.array([[nu ** 2, -nu ** 2, nu * mu],
                  [-nu ** 2, nu ** 2, -nu * mu],
                  [nu * mu, -nu * mu, mu ** 2]])
    return M, N, L


class LCOModel(QuadraticModel):
    """
    Linearly coupled oscillators with parameters ``(A, B, C)``.

    Requires ``A != B``, ``C != 0``, a positive-definite potential and
    non-degenerate normal frequencies.
    """

    id = "lco"
    param_names = ("A", "B", "C")
    action_names = ("I1", "I2")
    n_angles = 2

    def __init__(self, A: float, B: float, C: float):
        point = ParameterPoint(self.param_names, [A, B, C])
        self.A, self.B, self.C = (float(v) for v in point.values)
        self.geometry = lco_geometry(self.A, self.B, self.C)
        self.omega1, self.omega2 = self.geometry.omega1, self.geometry.omega2
        self.alpha = self.geometry.alpha
        super().__init__(point)

    def _kernel(self):
        V = np.array([[self.A, 0.5 * self.C], [0.5 * self.C, self.B]])
        return np.block([[V, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]])

    def _kernel_derivatives(self):
        z = np.zeros((2, 2))
        out = []
        for V in (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]),
                  np.array([[0.0, 0.5], [0.5, 0.0]])):
            out.append(np.block([[V, z], [z, z]]))
        return out

    def _modes(self):
        c, s = np.cos(self.alpha), np.sin(self.alpha)
        vecs = (np.array([c, -s]), np.array([s, c]))
        w = np.array([self.omega1, self.omega2])
        C = np.zeros((2, 4))
        S = np.zeros((2, 4))
        for a in range(2):
            C[a, 2:] = np.sqrt(2 * w[a]) * vecs[a]
            S[a, :2] = np.sqrt(2 / w[a]) * vecs[a]
        return w, C, S

    def metric_structure(self):
        g = self.geometry
        w1, w2 = g.omega1, g.omega2
        M, N, L = mnl_matrices(g.mu, g.nu)
        cross = (w1 / w2 + w2 / w1) * 8 * L / (32 * (w2 ** 2 - w1 ** 2) ** 2)
        return {"I1^2": M / (32 * w1 ** 4), "I2^2": N / (32 * w2 ** 4), "I1*I2": cross}

    def curvature_structure(self):
        return {}

    def metric_closed(self, actions):
        I1, I2 = self.action_vector(actions).actions
        s = self.metric_structure()
        return I1 ** 2 * s["I1^2"] + I2 ** 2 * s["I2^2"] + I1 * I2 * s["I1*I2"]

    def metric_from_gradients(self, actions):
        """The same metric assembled from ``d omega_a`` and ``d alpha`` directly."""
        I1, I2 = self.action_vector(actions).actions
        g = self.geometry
        w1, w2 = g.omega1, g.omega2
        return (np.outer(g.d_omega1, g.d_omega1) * I1 ** 2 / (8 * w1 ** 2)
                + np.outer(g.d_omega2, g.d_omega2) * I2 ** 2 / (8 * w2 ** 2)
                + np.outer(g.d_alpha, g.d_alpha) * (w1 / w2 + w2 / w1) * I1 * I2)

    def curvature_closed(self, actions):
        self.action_vector(actions)
        return np.zeros((3, 3))

    def anomaly_expected(self) -> np.ndarray:
        """Residual ``-1/2 d alpha (x) d alpha`` left by operator ordering."""
        da = self.geometry.d_alpha
        return -0.5 * np.outer(da, da)

    def _registry_rules(self):
        return {"I1^2": (1.0, 2), "I2^2": (1.0, 2), "I1*I2": (0.25, 2),
                "I1": (0.5, 1), "I2": (0.5, 1)}


def lco_model(A: float, B: float, C: float) -> LCOModel:
    """Build the linearly coupled oscillators at ``(A, B, C)``."""
    return LCOModel(A, B, C)
