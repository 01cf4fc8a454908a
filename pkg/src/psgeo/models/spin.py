"""
Spin one-half in a magnetic field, ``H = psi^dagger (B . sigma) psi``.
"""

from __future__ import annotations

import numpy as np

from ..core import ParameterError, ParameterPoint, QuantizationRegistry
from ..fermionic import PAULI, fermionic_system
from .base import ModelSpec

__all__ = ["SpinModel", "SpinSphericalModel", "spin_model", "cartesian_metric",
           "cartesian_curvature", "spherical_jacobian"]


def cartesian_metric(B, I1: float, I2: float) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    b2 = B @ B
    return -(I1 * I2 / (2 * b2 * b2)) * (b2 * np.eye(3) - np.outer(B, B))


def cartesian_curvature(B, I1: float, I2: float) -> np.ndarray:
    """``F_ij = (I1 - I2) eps_ijk B_k / (2 |B|^3)``."""
    B = np.asarray(B, dtype=float)
    b = np.linalg.norm(B)
    c = (I1 - I2) / (2 * b ** 3)
    return c * np.array([[0.0, B[2], -B[1]], [-B[2], 0.0, B[0]], [B[1], -B[0], 0.0]])


def spherical_jacobian(B: float, theta: float, phi: float) -> np.ndarray:
    """``d(B1, B2, B3) / d(B, theta, phi)``."""
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    return np.array([[st * cp, B * ct * cp, -B * st * sp],
                     [st * sp, B * ct * sp, B * st * cp],
                     [ct, -B * st, 0.0]])


class SpinModel(ModelSpec):
    """Cartesian field components ``(B1, B2, B3)`` as parameters."""

    id = "spin"
    param_names = ("B1", "B2", "B3")
    action_names = ("I1", "I2")
    n_angles = 2
    fermionic = True
    sampler_capable = False

    def __init__(self, B1: float, B2: float, B3: float):
        point = ParameterPoint(self.param_names, [B1, B2, B3])
        super().__init__(point)
        self._set_field(point.values)

    def _set_field(self, B):
        self.field = np.asarray(B, dtype=float)
        self.B = float(np.linalg.norm(self.field))
        if not self.B > 0:
            raise ParameterError("the field magnitude B must be positive")

    def _field_jacobian(self) -> np.ndarray:
        return np.eye(3)

    def frequencies(self, actions=None):
        return np.array([self.B, -self.B])

    def hamiltonian_matrix(self) -> np.ndarray:
        return sum(b * s for b, s in zip(self.field, PAULI))

    def deformation_matrices(self) -> list[np.ndarray]:
        """``d M / d x_j`` by the chain rule through the Cartesian field."""
        J = self._field_jacobian()
        return [sum(J[i, j] * PAULI[i] for i in range(3)) for j in range(3)]

    def fermionic_system(self, actions, phase_shift=None):
        I = self.action_vector(actions).actions
        return fermionic_system(self.hamiltonian_matrix(), self.deformation_matrices(), I,
                                phase_shift=phase_shift)

    def metric_closed(self, actions):
        I1, I2 = self.action_vector(actions).actions
        return cartesian_metric(self.field, I1, I2)

    def curvature_closed(self, actions):
        I1, I2 = self.action_vector(actions).actions
        return cartesian_curvature(self.field, I1, I2)

    def metric_structure(self):
        return {"I1*I2": cartesian_metric(self.field, 1.0, 1.0)}

    def curvature_structure(self):
        unit = cartesian_curvature(self.field, 1.0, 0.0)
        return {"I1": unit, "I2": -unit}

    def registry(self, hbar: float = 1.0) -> QuantizationRegistry:
        return QuantizationRegistry(hbar, {})


class SpinSphericalModel(SpinModel):
    """Spherical field coordinates ``(B, theta, phi)`` as parameters."""

    param_names = ("B", "theta", "phi")

    def __init__(self, B: float, theta: float, phi: float):
        point = ParameterPoint(self.param_names, [B, theta, phi])
        ModelSpec.__init__(self, point)
        if not point["B"] > 0:
            raise ParameterError("the field magnitude B must be positive")
        self.theta, self.phi = point["theta"], point["phi"]
        st = np.sin(self.theta)
        self._set_field(point["B"] * np.array([st * np.cos(self.phi), st * np.sin(self.phi),
                                               np.cos(self.theta)]))

    def _field_jacobian(self):
        return spherical_jacobian(self.B, self.theta, self.phi)

    def metric_closed(self, actions):
        I1, I2 = self.action_vector(actions).actions
        return -(I1 * I2 / 2) * np.diag([0.0, 1.0, np.sin(self.theta) ** 2])

    def curvature_closed(self, actions):
        I1, I2 = self.action_vector(actions).actions
        F = np.zeros((3, 3))
        F[1, 2] = (I1 - I2) * np.sin(self.theta) / 2
        return F - F.T

    def metric_structure(self):
        return {"I1*I2": self.metric_closed([1.0, 1.0])}

    def curvature_structure(self):
        unit = self.curvature_closed([1.0, 0.0])
        return {"I1": unit, "I2": -unit}


def spin_model(**params) -> SpinModel:
    """
    Build the spin model from ``B1, B2, B3`` or from ``B, theta, phi``.
    """
    keys = set(params)
    if keys == {"B1", "B2", "B3"}:
        return SpinModel(params["B1"], params["B2"], params["B3"])
    if keys == {"B", "theta", "phi"}:
        return SpinSphericalModel(params["B"], params["theta"], params["phi"])
    raise ParameterError(
        f"spin parameters must be B1,B2,B3 or B,theta,phi; got {sorted(keys)}")
