"""
Two identical oscillators with a symmetric spring,
``H = (p1^2 + p2^2)/2 + k (q1^2 + q2^2)/2 + k' (q1 - q2)^2 / 2``.
"""

from __future__ import annotations

import numpy as np

from ..core import ParameterError, ParameterPoint
from .base import QuadraticModel

__all__ = ["SCOModel", "sco_model"]

_R = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


class SCOModel(QuadraticModel):
    """
    Symmetric coupled oscillators with parameters ``(k, kp)``.

    Normal modes ``Q1 = (q1 + q2)/sqrt(2)`` and ``Q2 = (q1 - q2)/sqrt(2)``
    oscillate at ``omega1^2 = k`` and ``omega2^2 = k + 2 kp``.
    """

    id = "sco"
    param_names = ("k", "kp")
    action_names = ("I1", "I2")
    n_angles = 2

    def __init__(self, k: float, kp: float):
        point = ParameterPoint(self.param_names, [k, kp])
        k, kp = point.values
        if not k > 0:
            raise ParameterError("omega1^2 = k must be positive")
        if not k + 2 * kp > 0:
            raise ParameterError("omega2^2 = k + 2 kp must be positive")
        self.k, self.kp = float(k), float(kp)
        self.omega1 = float(np.sqrt(k))
        self.omega2 = float(np.sqrt(k + 2 * kp))
        super().__init__(point)

    def _kernel(self):
        k, kp = self.k, self.kp
        V = np.array([[k + kp, -kp], [-kp, k + kp]])
        return np.block([[V, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]])

    def _kernel_derivatives(self):
        z = np.zeros((2, 2))
        return [np.block([[np.eye(2), z], [z, z]]),
                np.block([[np.array([[1.0, -1.0], [-1.0, 1.0]]), z], [z, z]])]

    def _modes(self):
        w = np.array([self.omega1, self.omega2])
        C = np.zeros((2, 4))
        S = np.zeros((2, 4))
        for a in range(2):
            C[a, 2:] = np.sqrt(2 * w[a]) * _R[:, a]
            S[a, :2] = np.sqrt(2 / w[a]) * _R[:, a]
        return w, C, S

    def frequency_gradients(self) -> np.ndarray:
        """Rows ``d omega_a / d (k, kp)``."""
        return np.array([[1 / (2 * self.omega1), 0.0],
                         [1 / (2 * self.omega2), 1 / self.omega2]])

    def metric_decomposition(self, actions) -> list[np.ndarray]:
        """Per-mode contributions ``d w_a d w_a I_a^2 / (8 w_a^2)``; they sum to the metric."""
        I = self.action_vector(actions).actions
        grads = self.frequency_gradients()
        w = (self.omega1, self.omega2)
        return [np.outer(grads[a], grads[a]) * I[a] ** 2 / (8 * w[a] ** 2) for a in range(2)]

    def metric_structure(self):
        w1, w2 = self.omega1, self.omega2
        return {"I1^2": np.array([[1.0, 0.0], [0.0, 0.0]]) / (32 * w1 ** 4),
                "I2^2": np.array([[1.0, 2.0], [2.0, 4.0]]) / (32 * w2 ** 4)}

    def curvature_structure(self):
        return {}

    def metric_closed(self, actions):
        I1, I2 = self.action_vector(actions).actions
        s = self.metric_structure()
        return I1 ** 2 * s["I1^2"] + I2 ** 2 * s["I2^2"]

    def curvature_closed(self, actions):
        self.action_vector(actions)
        return np.zeros((2, 2))

    def determinant_closed(self, actions) -> float:
        I1, I2 = self.action_vector(actions).actions
        return I1 ** 2 * I2 ** 2 / (256 * self.omega1 ** 4 * self.omega2 ** 4)

    def _registry_rules(self):
        return {"I1^2": (1.0, 2), "I2^2": (1.0, 2), "I1": (0.5, 1), "I2": (0.5, 1)}


def sco_model(k: float, kp: float) -> SCOModel:
    """Build the symmetric coupled oscillators at ``(k, kp)``."""
    return SCOModel(k, kp)
