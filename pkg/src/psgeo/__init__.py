"""
Classical analogs of the quantum metric tensor and Berry curvature for
integrable systems, computed from exact harmonic series in action-angle
variables.
"""

from .core import (ActionVector, GeometricTensor, HarmonicTerm, ParameterPoint,
                   PsgeoError, QuantizationRegistry)
from .engine import (RelationReport, check_semiclassical, classical_curvature,
                     classical_metric, gauge_shift, tensor_transform)
from .harmonics import (CorrelatorSeries, HarmonicSeries, angle_average,
                        connected_correlator, make_series, poisson_bracket, series_product)
from .kernels import KernelConfig, integrate_correlator, quadrant_kernel
from .models import build_model, gho_model, lco_model, sco_model, singular_model, spin_model
from .quantum_ref import QuantumReference, quantum_tensors

__version__ = "0.1.0"

__all__ = [
    "ActionVector", "GeometricTensor", "HarmonicTerm", "ParameterPoint", "PsgeoError",
    "QuantizationRegistry", "RelationReport", "check_semiclassical", "classical_curvature",
    "classical_metric", "gauge_shift", "tensor_transform", "CorrelatorSeries",
    "HarmonicSeries", "angle_average", "connected_correlator", "make_series",
    "poisson_bracket", "series_product", "KernelConfig", "integrate_correlator",
    "quadrant_kernel", "build_model", "gho_model", "lco_model", "sco_model",
    "singular_model", "spin_model", "QuantumReference", "quantum_tensors", "__version__",
]
