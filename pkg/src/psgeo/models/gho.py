"""
Generalized harmonic oscillator ``H = (X q^2 + 2 Y q p + Z p^2) / 2``.
"""

from __future__ import annotations

import numpy as np

from ..core import ParameterError, ParameterPoint
from .base import QuadraticModel

__all__ = ["GHOModel", "gho_model", "gho_structure_matrix"]


def gho_structure_matrix(X: float, Y: float, Z: float) -> np.ndarray:
    """The parameter matrix shared by the classical and quantum GHO metrics."""
    return np.array([[Z * Z, -2 * Y * Z, 2 * Y * Y - X * Z],
                     [-2 * Y * Z, 4 * X * Z, -2 * X * Y],
                     [2 * Y * Y - X * Z, -2 * X * Y, X * X]], dtype=float)


class GHOModel(QuadraticModel):
    """
    One degree of freedom with deformations ``q^2/2``, ``q p`` and ``p^2/2``.

    Requires ``omega^2 = XZ - Y^2 > 0`` and ``Z > 0`` so that the
    action-angle map ``q = sqrt(2 Z I / omega) sin(theta)`` is real.
    """

    id = "gho"
    param_names = ("X", "Y", "Z")
    action_names = ("I",)
    n_angles = 1

    def __init__(self, X: float, Y: float, Z: float):
        point = ParameterPoint(self.param_names, [X, Y, Z])
        X, Y, Z = point.values
        omega2 = X * Z - Y * Y
        if not omega2 > 0:
            raise ParameterError(
                f"omega^2 = XZ - Y^2 must be positive (got {omega2:.6g})")
        if not Z > 0:
            raise ParameterError("Z must be positive for a real action-angle map")
        self.X, self.Y, self.Z = float(X), float(Y), float(Z)
        self.omega = float(np.sqrt(omega2))
        super().__init__(point)

    def _kernel(self):
        return np.array([[self.X, self.Y], [self.Y, self.Z]])

    def _kernel_derivatives(self):
        return [np.array([[1.0, 0.0], [0.0, 0.0]]),
                np.array([[0.0, 1.0], [1.0, 0.0]]),
                np.array([[0.0, 0.0], [0.0, 1.0]])]

    def _modes(self):
        w, Y, Z = self.omega, self.Y, self.Z
        r = np.sqrt(2 * Z / w)
        C = np.array([[0.0, r * w / Z]])
        S = np.array([[r, -r * Y / Z]])
        return np.array([w]), C, S

    def metric_structure(self):
        return {"I^2": gho_structure_matrix(self.X, self.Y, self.Z) / (32 * self.omega ** 4)}

    def curvature_structure(self):
        w3 = 4 * self.omega ** 3
        f = np.zeros((3, 3))
        f[0, 1] = -self.Z / w3
        f[0, 2] = self.Y / w3
        f[1, 2] = -self.X / w3
        return {"I": f - f.T}

    def metric_closed(self, actions):
        I = self.action_vector(actions).actions[0]
        return I * I * self.metric_structure()["I^2"]

    def curvature_closed(self, actions):
        I = self.action_vector(actions).actions[0]
        return I * self.curvature_structure()["I"]

    def _registry_rules(self):
        return {"I^2": (1.0, 2), "I": (0.5, 1)}


def gho_model(X: float, Y: float, Z: float) -> GHOModel:
    """Build the generalized harmonic oscillator at ``(X, Y, Z)``."""
    return GHOModel(X, Y, Z)
