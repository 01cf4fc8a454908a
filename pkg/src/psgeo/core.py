"""
Shared domain types, error classes and numeric conventions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

# Amplitudes below this magnitude are dropped when a series is built.
AMP_DROP_TOL = 1e-15
# Relative tolerance for conjugation closure and nu == k . Omega checks.
CONJ_TOL = 1e-12
FREQ_TOL = 1e-12
# Relative tolerance used to decide that two frequencies coincide.
MERGE_FREQ_TOL = 1e-9
# Incommensurate-pair tolerance on |nu_r + nu_s| / max(|nu_r|, 1).
PAIR_FREQ_TOL = 1e-9
# Symmetry / antisymmetry / imaginary-residue assertions on assembled tensors.
TENSOR_TOL = 1e-10


class PsgeoError(Exception):
    """Base class for all errors raised by the package."""


class DimensionError(PsgeoError, ValueError):
    """Wavevector or matrix shapes do not match."""


class ParameterError(PsgeoError, ValueError):
    """Model parameters or actions violate a model precondition."""


class DegeneracyError(ParameterError):
    """Two eigenfrequencies coincide where the construction needs them apart."""


class CapabilityError(PsgeoError):
    """The model or series lacks data needed by the requested operation."""


class UnsupportedBackendError(CapabilityError):
    """The requested backend cannot evaluate this model."""


class NumericalQualityError(PsgeoError, ArithmeticError):
    """A numerical-quality guard failed (drift, asymmetry, DC leakage...)."""


class IncommensurateFrequencyError(NumericalQualityError):
    """A wavevector-matched pair has frequencies that do not cancel."""


class DivergentDCError(NumericalQualityError):
    """A zero-frequency component reached the quadrant kernel."""


class SecularTermError(CapabilityError):
    """Action-dependent frequencies would produce secular brackets."""


class EnergyDriftError(NumericalQualityError):
    """Trajectory energy drifted beyond the allowed bound."""


class ConditioningError(NumericalQualityError):
    """A least-squares design matrix is too ill-conditioned to trust."""


class RegistryError(PsgeoError, KeyError):
    """An action monomial has no quantization rule."""


@dataclass(frozen=True)
class ParameterPoint:
    """Named adiabatic parameters ``x`` at which tensors are evaluated."""

    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        names = tuple(self.names)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if len(names) != values.size:
            raise DimensionError(
                f"{len(names)} parameter names but {values.size} values")
        if not np.all(np.isfinite(values)):
            raise ParameterError("parameter values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        if not isinstance(other, ParameterPoint):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.names, self.values.tobytes()))

    def __getitem__(self, name):
        return float(self.values[self.names.index(name)])

    def as_dict(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.values)}

    @classmethod
    def from_dict(cls, d: Mapping[str, float]) -> "ParameterPoint":
        return cls(tuple(d), np.array(list(d.values()), dtype=float))


@dataclass(frozen=True)
class ActionVector:
    """Action variables ``I_a`` together with their frequencies ``Omega_a``."""

    actions: np.ndarray
    frequencies: np.ndarray
    names: tuple[str, ...] = ()
    bosonic: bool = True

    def __post_init__(self):
        actions = np.asarray(self.actions, dtype=float).reshape(-1)
        freqs = np.asarray(self.frequencies, dtype=float).reshape(-1)
        if actions.size != freqs.size:
            raise DimensionError(
                f"{actions.size} actions but {freqs.size} frequencies")
        if not np.all(np.isfinite(freqs)) or not np.all(np.isfinite(actions)):
            raise ParameterError("actions and frequencies must be finite")
        if self.bosonic and np.any(actions < 0):
            raise ParameterError("bosonic actions must be nonnegative")
        names = tuple(self.names) or tuple(f"I{a + 1}" for a in range(actions.size))
        if len(names) != actions.size:
            raise DimensionError("action names do not match actions")
        actions.setflags(write=False)
        freqs.setflags(write=False)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "names", names)

    def __len__(self):
        return self.actions.size

    def as_dict(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.actions)}


@dataclass(frozen=True)
class HarmonicTerm:
    """
    One term ``amp * exp(i (k . phi0 + nu t))`` of a harmonic series.

    Parameters
    ----------
    k : tuple of int
        Integer wavevector over the angle variables.
    nu : float
        Time frequency; equals ``k . Omega`` for model-built terms.
    amp : complex
        Amplitude.
    amp_dI : tuple of complex, optional
        Derivatives of ``amp`` with respect to each action.
    degree : tuple of Fraction, optional
        Homogeneity exponents of ``amp`` in each action.
    """

    k: tuple[int, ...]
    nu: float
    amp: complex
    amp_dI: tuple[complex, ...] | None = None
    degree: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "amp", complex(self.amp))
        if not np.isfinite(self.amp):
            raise NumericalQualityError("harmonic amplitude is not finite")
        if self.amp_dI is not None:
            object.__setattr__(self, "amp_dI", tuple(complex(v) for v in self.amp_dI))
        if self.degree is not None:
            object.__setattr__(self, "degree", tuple(Fraction(v) for v in self.degree))


@dataclass(frozen=True)
class GeometricTensor:
    """
    A metric (symmetric) or curvature (antisymmetric) tensor on parameter space.
    """

    kind: str
    matrix: np.ndarray
    point: ParameterPoint | None = None
    actions: ActionVector | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("metric", "curvature"):
            raise ValueError(f"unknown tensor kind {self.kind!r}")
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"tensor must be square, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
        sign = 1.0 if self.kind == "metric" else -1.0
        if np.max(np.abs(m - sign * m.T), initial=0.0) > TENSOR_TOL * scale:
            raise NumericalQualityError(
                f"{self.kind} tensor violates its symmetry by "
                f"{np.max(np.abs(m - sign * m.T)):.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def eigenvalues(self) -> np.ndarray:
        if self.kind == "metric":
            return np.linalg.eigvalsh(self.matrix)
        return np.linalg.eigvals(self.matrix)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _parse_monomial(key: str) -> tuple[tuple[str, int], ...]:
    factors = []
    for part in key.replace(" ", "").split("*"):
        if not part:
            raise RegistryError(f"malformed monomial {key!r}")
        name, _, power = part.partition("^")
        factors.append((name, int(power) if power else 1))
    return tuple(sorted(factors))


@dataclass(frozen=True)
class QuantizationRegistry:
    """
    Replacement rules for action monomials, in powers of ``hbar``.

    ``rules`` maps a monomial key such as ``"I^2"`` or ``"I1*I2"`` to a pair
    ``(coefficient, power)`` meaning ``coefficient * hbar**power``.
    """

    hbar: float = 1.0
    rules: Mapping[str, tuple[float, int]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.hbar > 0:
            raise ParameterError("hbar must be positive")
        normalized = {_parse_monomial(k): (float(c), int(p))
                      for k, (c, p) in dict(self.rules).items()}
        object.__setattr__(self, "_table", normalized)

    def value(self, key: str) -> float:
        try:
            coef, power = self._table[_parse_monomial(key)]
        except KeyError:
            raise RegistryError(f"no quantization rule for monomial {key!r}") from None
        return coef * self.hbar ** power

    def power(self, key: str) -> int:
        try:
            return self._table[_parse_monomial(key)][1]
        except KeyError:
            raise RegistryError(f"no quantization rule for monomial {key!r}") from None

    def with_hbar(self, hbar: float) -> "QuantizationRegistry":
        return QuantizationRegistry(hbar, dict(self.rules))

    def keys(self):
        return list(self.rules)


def as_float_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=float).reshape(-1)
