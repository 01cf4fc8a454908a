"""
Closed-form quantum metric tensors and Berry curvatures of the built-in models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .core import ParameterError, ParameterPoint, TENSOR_TOL
from .special import dilog, trigamma

__all__ = ["QuantumReference", "quantum_tensors", "dilog", "trigamma"]


@dataclass(frozen=True)
class QuantumReference:
    """Quantum metric ``g0`` and curvature ``F0`` of one eigenstate."""

    model_id: str
    metric: np.ndarray
    curvature: np.ndarray
    state: str = "ground"
    hbar: float = 1.0
    param_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        g = np.asarray(self.metric, dtype=float)
        F = np.asarray(self.curvature, dtype=float)
        scale = max(1.0, float(np.max(np.abs(g))), float(np.max(np.abs(F))))
        if np.max(np.abs(g - g.T)) > TENSOR_TOL * scale:
            raise ValueError("quantum metric is not symmetric")
        if np.max(np.abs(F + F.T)) > TENSOR_TOL * scale:
            raise ValueError("quantum curvature is not antisymmetric")
        object.__setattr__(self, "metric", g)
        object.__setattr__(self, "curvature", F)


def _gho(p, hbar, state):
    from .models.gho import gho_structure_matrix
    X, Y, Z = p["X"], p["Y"], p["Z"]
    w2 = X * Z - Y * Y
    if not w2 > 0:
        raise ParameterError("omega^2 = XZ - Y^2 must be positive")
    w = np.sqrt(w2)
    g = gho_structure_matrix(X, Y, Z) / (32 * w ** 4)
    F = np.zeros((3, 3))
    F[0, 1], F[0, 2], F[1, 2] = -Z / (8 * w ** 3), Y / (8 * w ** 3), -X / (8 * w ** 3)
    return g, F - F.T


def _sco(p, hbar, state):
    k, kp = p["k"], p["kp"]
    if not (k > 0 and k + 2 * kp > 0):
        raise ParameterError("both normal frequencies must be real")
    w1, w2 = np.sqrt(k), np.sqrt(k + 2 * kp)
    g = np.array([[1 / w1 ** 4 + 1 / w2 ** 4, 2 / w2 ** 4],
                  [2 / w2 ** 4, 4 / w2 ** 4]]) / 32
    return g, np.zeros((2, 2))


def _lco(p, hbar, state):
    from .models.lco import lco_geometry
    geo = lco_geometry(p["A"], p["B"], p["C"])
    w1, w2 = geo.omega1, geo.omega2
    g = (np.outer(geo.d_omega1, geo.d_omega1) / (8 * w1 ** 2)
         + np.outer(geo.d_omega2, geo.d_omega2) / (8 * w2 ** 2)
         + np.outer(geo.d_alpha, geo.d_alpha) * (0.25 * (w1 / w2 + w2 / w1) - 0.5))
    return g, np.zeros((3, 3))


def _singular(p, hbar, state):
    w, al = p["omega"], p["alpha"]
    if not w > 0:
        raise ParameterError("omega must be positive")
    if not al > 0:
        raise ParameterError("the quantum ground state needs alpha > 0")
    g11 = (al + hbar) / (4 * hbar * w ** 2)
    g12 = -1 / (4 * hbar * w)
    g22 = trigamma(1 + al / hbar) / (4 * hbar ** 2)
    return np.array([[g11, g12], [g12, g22]]), np.zeros((2, 2))


def _spin(p, hbar, state):
    sign = {"+": 1.0, "-": -1.0, "ground": 1.0}.get(state or "+")
    if sign is None:
        raise ParameterError(f"spin state must be '+' or '-', got {state!r}")
    if set(p) == {"B", "theta", "phi"}:
        if not p["B"] > 0:
            raise ParameterError("the field magnitude B must be positive")
        s = np.sin(p["theta"])
        g = 0.25 * np.diag([0.0, 1.0, s * s])
        F = np.zeros((3, 3))
        F[1, 2] = -sign * s
        return g, F - F.T
    if set(p) == {"B1", "B2", "B3"}:
        B = np.array([p["B1"], p["B2"], p["B3"]])
        b2 = B @ B
        if not b2 > 0:
            raise ParameterError("the field magnitude B must be positive")
        g = (b2 * np.eye(3) - np.outer(B, B)) / (4 * b2 * b2)
        c = -sign / b2 ** 1.5
        F = c * np.array([[0.0, B[2], -B[1]], [-B[2], 0.0, B[0]], [B[1], -B[0], 0.0]])
        return g, F
    raise ParameterError("spin parameters must be B1,B2,B3 or B,theta,phi")


_TABLE = {"gho": _gho, "sco": _sco, "lco": _lco, "singular": _singular, "spin": _spin}


def quantum_tensors(model_id: str, x: ParameterPoint | Mapping[str, float],
                    hbar: float = 1.0, state: str | None = None) -> QuantumReference:
    """
    Evaluate the quantum metric and curvature of a built-in model.

    Parameters
    ----------
    model_id : {"gho", "sco", "lco", "singular", "spin"}
    x : ParameterPoint or mapping
        Parameter values by name.
    hbar : float
    state : str, optional
        ``"+"`` or ``"-"`` for the spin model; ground state otherwise.
    """
    if model_id not in _TABLE:
        raise ParameterError(f"no quantum reference for model {model_id!r}")
    if not hbar > 0:
        raise ParameterError("hbar must be positive")
    params = x.as_dict() if isinstance(x, ParameterPoint) else dict(x)
    g, F = _TABLE[model_id](params, float(hbar), state)
    label = state or ("+" if model_id == "spin" else "ground")
    return QuantumReference(model_id, g, F, label, float(hbar), tuple(params))
