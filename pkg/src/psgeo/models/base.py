"""
Model interface and the shared machinery for quadratic Hamiltonians.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ..core import (ActionVector, CapabilityError, DimensionError, ParameterError,
                    ParameterPoint, QuantizationRegistry)
from ..harmonics import HarmonicSeries

__all__ = ["ModelSpec", "QuadraticModel", "ShiftedModel", "symplectic_unit"]


def symplectic_unit(n: int) -> np.ndarray:
    """``J = [[0, 1], [-1, 0]]`` in blocks of size ``n``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


class ModelSpec:
    """
    A parametrized integrable system bound to one parameter point.

    Subclasses fill in the class attributes and override the capability
    methods they support.  Unsupported capabilities raise
    :class:`CapabilityError`.
    """

    id: str = "model"
    param_names: tuple[str, ...] = ()
    action_names: tuple[str, ...] = ()
    n_angles: int = 0
    fermionic: bool = False
    bracket_capable: bool = True
    sampler_capable: bool = False

    def __init__(self, point: ParameterPoint):
        self.point = point

    def __repr__(self):
        params = ", ".join(f"{k}={v:g}" for k, v in self.point.as_dict().items())
        return f"{type(self).__name__}({params})"

    # -- parameters and actions --------------------------------------------

    @property
    def params(self) -> dict[str, float]:
        return self.point.as_dict()

    def with_params(self, **updates) -> "ModelSpec":
        """A new model of the same family with some parameters replaced."""
        values = self.params
        unknown = set(updates) - set(values)
        if unknown:
            raise ParameterError(f"unknown parameters {sorted(unknown)} for {self.id}")
        values.update(updates)
        return type(self)(**values)

    @property
    def n_params(self) -> int:
        return len(self.point)

    def frequencies(self, actions=None) -> np.ndarray:
        raise NotImplementedError

    def action_vector(self, actions) -> ActionVector:
        """Coerce a mapping, sequence or :class:`ActionVector` to this model's actions."""
        if isinstance(actions, ActionVector):
            vals = actions.actions
        elif isinstance(actions, Mapping):
            missing = set(self.action_names) - set(actions)
            extra = set(actions) - set(self.action_names)
            if missing or extra:
                raise ParameterError(
                    f"{self.id} expects actions {list(self.action_names)}, got {list(actions)}")
            vals = [actions[n] for n in self.action_names]
        else:
            vals = np.atleast_1d(np.asarray(actions, dtype=float))
        vals = np.asarray(vals, dtype=float).reshape(-1)
        if vals.size != len(self.action_names):
            raise DimensionError(
                f"{self.id} expects {len(self.action_names)} actions, got {vals.size}")
        self._check_actions(vals)
        return ActionVector(vals, self.frequencies(vals), self.action_names,
                            bosonic=not self.fermionic)

    def _check_actions(self, vals: np.ndarray):
        if not self.fermionic and np.any(vals < 0):
            raise ParameterError("actions must be nonnegative")

    # -- harmonic representation -------------------------------------------

    def observables(self, actions) -> list[HarmonicSeries]:
        """The deformation functions ``lambda_i`` as harmonic series."""
        raise CapabilityError(f"{self.id} has no harmonic-series observables")

    # -- closed forms ------------------------------------------------------

    def metric_closed(self, actions) -> np.ndarray:
        raise CapabilityError(f"{self.id} has no closed-form metric")

    def curvature_closed(self, actions) -> np.ndarray:
        raise CapabilityError(f"{self.id} has no closed-form curvature")

    def metric_structure(self) -> dict[str, np.ndarray]:
        """Closed-form metric as ``{action monomial: coefficient matrix}``."""
        raise CapabilityError(f"{self.id} exposes no monomial structure")

    def curvature_structure(self) -> dict[str, np.ndarray]:
        raise CapabilityError(f"{self.id} exposes no monomial structure")

    def registry(self, hbar: float = 1.0) -> QuantizationRegistry:
        raise CapabilityError(f"{self.id} has no quantization registry")

    def quantum(self, hbar: float = 1.0, state: str | None = None):
        from ..quantum_ref import quantum_tensors
        return quantum_tensors(self.id, self.point, hbar=hbar, state=state)

    # -- phase space (sampler) ---------------------------------------------

    linear_generator: np.ndarray | None = None

    def phase_space_point(self, phi, actions) -> np.ndarray:
        raise CapabilityError(f"{self.id} provides no action-angle map")

    def hamiltonian(self, z) -> np.ndarray:
        raise CapabilityError(f"{self.id} provides no Hamiltonian")

    def vector_field(self, z) -> np.ndarray:
        raise CapabilityError(f"{self.id} provides no vector field")

    def observables_at(self, z) -> np.ndarray:
        """Deformation functions ``O_i(z)`` at phase-space points, shape ``(..., N)``."""
        raise CapabilityError(f"{self.id} provides no phase-space observables")

    def observable_gradients(self, z) -> np.ndarray:
        """``d O_i / d z``, shape ``(..., N, 2n)``."""
        raise CapabilityError(f"{self.id} provides no observable gradients")


class QuadraticModel(ModelSpec):
    """
    ``H = z^T K z / 2`` with ``z = (q_1..q_n, p_1..p_n)`` and linear deformations.

    Subclasses provide ``K`` (:meth:`_kernel`), its parameter derivatives
    ``dK_i`` (:meth:`_kernel_derivatives`) and the normal-mode map
    (:meth:`_modes`): for each mode ``a`` two phase-space vectors ``C_a, S_a``
    with

        z(t) = sum_a sqrt(I_a) (C_a cos th_a + S_a sin th_a),  th_a = phi_a + w_a t.
    """

    sampler_capable = True

    def __init__(self, point: ParameterPoint):
        super().__init__(point)
        self._K = self._kernel()
        self._dK = self._kernel_derivatives()
        self._omega, self._C, self._S = self._modes()
        n = self.n_angles
        self.linear_generator = symplectic_unit(n) @ self._K

    def _kernel(self) -> np.ndarray:
        raise NotImplementedError

    def _kernel_derivatives(self) -> list[np.ndarray]:
        raise NotImplementedError

    def _modes(self):
        raise NotImplementedError

    @property
    def kernel_matrix(self) -> np.ndarray:
        return self._K

    @property
    def deformation_matrices(self) -> list[np.ndarray]:
        return list(self._dK)

    @property
    def mode_vectors(self):
        """``(omega, C, S)`` with ``C``, ``S`` of shape ``(n_angles, 2n)``."""
        return self._omega, self._C, self._S

    def frequencies(self, actions=None) -> np.ndarray:
        return self._omega.copy()

    def observables(self, actions) -> list[HarmonicSeries]:
        av = self.action_vector(actions)
        I = av.actions
        n = self.n_angles
        # z = sum_a sqrt(I_a) (w_a e^{i th_a} + conj(w_a) e^{-i th_a})
        w = 0.5 * (self._C - 1j * self._S)
        vecs, ks, nus, modes = [], [], [], []
        for a in range(n):
            for sign in (1, -1):
                vecs.append(w[a] if sign > 0 else np.conj(w[a]))
                k = np.zeros(n, dtype=np.int64)
                k[a] = sign
                ks.append(k)
                nus.append(sign * self._omega[a])
                modes.append(a)
        vecs = np.array(vecs)
        ks = np.array(ks)
        nus = np.array(nus)
        modes = np.array(modes)
        sq = np.sqrt(I)
        half = Fraction(1, 2)

        out = []
        for dK in self._dK:
            bil = 0.5 * vecs @ dK @ vecs.T  # (2n, 2n) bilinear coefficients
            k_all, nu_all, amp_all, dI_all, deg_all = [], [], [], [], []
            for r in range(len(vecs)):
                for s in range(len(vecs)):
                    a, b = modes[r], modes[s]
                    amp = bil[r, s] * sq[a] * sq[b]
                    dI = np.zeros(n, dtype=complex)
                    deg = [Fraction(0)] * n
                    if a == b:
                        dI[a] = bil[r, s]
                        deg[a] = Fraction(1)
                    else:
                        for x, y in ((a, b), (b, a)):
                            deg[x] = half
                            if I[x] > 0:
                                dI[x] = amp / (2.0 * I[x])
                            elif I[y] > 0 and bil[r, s] != 0:
                                dI[x] = np.nan
                    k_all.append(ks[r] + ks[s])
                    nu_all.append(nus[r] + nus[s])
                    amp_all.append(amp)
                    dI_all.append(dI)
                    deg_all.append(deg)
            dI_arr = np.array(dI_all)
            if np.any(np.isnan(dI_arr)):
                # The angle-action chart is singular at I_a = 0 for cross terms.
                dI_arr = None
            out.append(HarmonicSeries.from_arrays(
                np.array(k_all), np.array(nu_all), np.array(amp_all), dI_arr,
                np.array(deg_all, dtype=object), n_angles=n, frequencies=self._omega,
                real=True))
        return out

    # -- phase space -------------------------------------------------------

    def phase_space_point(self, phi, actions) -> np.ndarray:
        """Map angles ``phi`` (shape ``(..., n)``) and actions to ``z``."""
        I = self.action_vector(actions).actions
        phi = np.asarray(phi, dtype=float)
        if phi.shape[-1] != self.n_angles:
            raise DimensionError("angle array has the wrong trailing dimension")
        amp = np.sqrt(I)
        return (np.einsum("...a,a,ad->...d", np.cos(phi), amp, self._C)
                + np.einsum("...a,a,ad->...d", np.sin(phi), amp, self._S))

    def hamiltonian(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", z, self._K, z)

    def vector_field(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) @ self.linear_generator.T

    def observables_at(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.stack([0.5 * np.einsum("...i,ij,...j->...", z, dK, z) for dK in self._dK],
                        axis=-1)

    def observable_gradients(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.stack([z @ dK for dK in self._dK], axis=-2)

    def registry(self, hbar: float = 1.0) -> QuantizationRegistry:
        return QuantizationRegistry(hbar, self._registry_rules())

    def _registry_rules(self):
        raise NotImplementedError


class ShiftedModel(ModelSpec):
    """
    A model whose initial angles are shifted, ``phi0 -> phi0 + c(I)``.

    ``shift_dI`` optionally supplies ``d c_a / d I_b``; an action-dependent
    shift is still a canonical (gauge) transformation.
    """

    def __init__(self, base: ModelSpec, shift: Sequence[float], shift_dI=None):
        self.base = base
        self.shift = np.asarray(shift, dtype=float).reshape(-1)
        if self.shift.size != base.n_angles:
            raise DimensionError(
                f"{base.id} has {base.n_angles} angles, shift has {self.shift.size}")
        self.shift_dI = None if shift_dI is None else np.asarray(shift_dI, dtype=float)
        super().__init__(base.point)
        for name in ("id", "param_names", "action_names", "n_angles", "fermionic",
                     "bracket_capable", "sampler_capable", "linear_generator"):
            setattr(self, name, getattr(base, name))

    def __repr__(self):
        return f"ShiftedModel({self.base!r}, shift={self.shift.tolist()})"

    def with_params(self, **updates):
        return ShiftedModel(self.base.with_params(**updates), self.shift, self.shift_dI)

    def frequencies(self, actions=None):
        return self.base.frequencies(actions)

    def action_vector(self, actions):
        return self.base.action_vector(actions)

    def observables(self, actions):
        return [s.phase_shift(self.shift, self.shift_dI) for s in self.base.observables(actions)]

    def fermionic_system(self, actions):
        return self.base.fermionic_system(actions, phase_shift=self.shift)

    def phase_space_point(self, phi, actions):
        phi = np.asarray(phi, dtype=float) + self.shift
        return self.base.phase_space_point(phi, actions)

    def __getattr__(self, name):
        # delegate everything else (closed forms, registry, sampler hooks)
        if name == "base":
            raise AttributeError(name)
        return getattr(self.base, name)

    def metric_closed(self, actions):
        return self.base.metric_closed(actions)

    def curvature_closed(self, actions):
        return self.base.curvature_closed(actions)

    def metric_structure(self):
        return self.base.metric_structure()

    def curvature_structure(self):
        return self.base.curvature_structure()

    def registry(self, hbar=1.0):
        return self.base.registry(hbar)

    def quantum(self, hbar=1.0, state=None):
        return self.base.quantum(hbar, state)

    def hamiltonian(self, z):
        return self.base.hamiltonian(z)

    def vector_field(self, z):
        return self.base.vector_field(z)

    def observables_at(self, z):
        return self.base.observables_at(z)

    def observable_gradients(self, z):
        return self.base.observable_gradients(z)
