"""
Built-in integrable models and a name-based factory.
"""

from __future__ import annotations

from typing import Mapping

from ..core import ParameterError
from .base import ModelSpec, QuadraticModel, ShiftedModel
from .gho import GHOModel, gho_model
from .lco import LCOModel, lco_geometry, lco_model
from .sco import SCOModel, sco_model
from .singular import SingularModel, singular_model
from .spin import SpinModel, SpinSphericalModel, spin_model

__all__ = [
    "ModelSpec", "QuadraticModel", "ShiftedModel", "GHOModel", "SCOModel", "LCOModel",
    "SingularModel", "SpinModel", "SpinSphericalModel", "gho_model", "sco_model",
    "lco_model", "singular_model", "spin_model", "lco_geometry", "build_model",
    "MODEL_IDS", "DEFAULT_PARAMS", "canonical_order",
]

MODEL_IDS = ("gho", "sco", "lco", "singular", "spin")

DEFAULT_PARAMS = {
    "gho": {"X": 1.0, "Y": 0.0, "Z": 1.0},
    "sco": {"k": 1.0, "kp": 0.5},
    "lco": {"A": 2.0, "B": 1.0, "C": 1.0},
    "singular": {"omega": 1.0, "alpha": 1.0},
    "spin": {"B": 1.0, "theta": 1.0, "phi": 0.5},
}


_ORDERS = {"gho": [("X", "Y", "Z")], "sco": [("k", "kp")], "lco": [("A", "B", "C")],
           "singular": [("omega", "alpha")],
           "spin": [("B1", "B2", "B3"), ("B", "theta", "phi")]}


def canonical_order(model_id: str, names) -> list[str]:
    """The model's own parameter order for the given set of names."""
    names = list(names)
    for order in _ORDERS.get(model_id, []):
        if set(order) == set(names):
            return list(order)
    return list(names)


def build_model(model_id: str, params: Mapping[str, float]) -> ModelSpec:
    """Construct a built-in model from its id and a name -> value mapping."""
    params = dict(params)
    if model_id == "spin":
        return spin_model(**params)
    factories = {"gho": (GHOModel, ("X", "Y", "Z")), "sco": (SCOModel, ("k", "kp")),
                 "lco": (LCOModel, ("A", "B", "C")),
                 "singular": (SingularModel, ("omega", "alpha"))}
    if model_id not in factories:
        raise ParameterError(f"unknown model {model_id!r}; choose from {', '.join(MODEL_IDS)}")
    cls, names = factories[model_id]
    if set(params) != set(names):
        raise ParameterError(
            f"{model_id} expects parameters {', '.join(names)}; got {', '.join(params) or 'none'}")
    return cls(*(params[n] for n in names))
