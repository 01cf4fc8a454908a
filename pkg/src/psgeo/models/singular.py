"""
Singular oscillator on the plane,
``H = (p_r^2 + p_theta^2 / r^2)/2 + alpha^2 / (2 r^2) + omega^2 r^2 / 2``.

Only the radial angle enters the deformation functions
``lambda_1 = omega r^2`` and ``lambda_2 = alpha / r^2``.
"""

from __future__ import annotations

import numpy as np

from ..core import (CapabilityError, NumericalQualityError, ParameterError,
                    ParameterPoint, QuantizationRegistry)
from ..harmonics import HarmonicSeries
from ..special import dilog
from .base import ModelSpec

__all__ = ["SingularModel", "singular_model"]


class SingularModel(ModelSpec):
    """
    Parameters ``(omega, alpha)``, actions ``(Ir, Itheta)``.

    Writing ``pt = sqrt(Itheta^2 + alpha^2)``, ``E = omega (2 Ir + pt)`` and
    ``a = sqrt(1 - omega^2 pt^2 / E^2)``, the radius obeys
    ``omega^2 r^2 = E (1 + a sin(phi + 2 omega t))``.

    Parameters
    ----------
    omega, alpha : float
    truncation : float
        Relative cutoff for Fourier coefficients of ``lambda_2``.
    n_fft : int
        Number of samples used to compute those coefficients.
    """

    id = "singular"
    param_names = ("omega", "alpha")
    action_names = ("Ir", "Itheta")
    n_angles = 1
    sampler_capable = False

    def __init__(self, omega: float, alpha: float, truncation: float = 1e-14,
                 n_fft: int = 4096):
        point = ParameterPoint(self.param_names, [omega, alpha])
        omega, alpha = point.values
        if not omega > 0:
            raise ParameterError("omega must be positive")
        if alpha == 0:
            raise ParameterError("alpha must be nonzero")
        self.omega, self.alpha = float(omega), float(alpha)
        self.truncation = float(truncation)
        self.n_fft = int(n_fft)
        super().__init__(point)

    def with_params(self, **updates):
        vals = self.params
        vals.update(updates)
        return SingularModel(vals["omega"], vals["alpha"], self.truncation, self.n_fft)

    def _check_actions(self, vals):
        if not vals[0] > 0:
            raise ParameterError(
                "Ir must be positive (a = sqrt(1 - omega^2 pt^2 / E^2) must lie in (0, 1))")
        if vals[1] < 0:
            raise ParameterError("Itheta must be nonnegative (only its square enters)")

    def frequencies(self, actions=None):
        if actions is None:
            return np.array([2 * self.omega, 0.0])
        Ith = np.asarray(actions, dtype=float).reshape(-1)[1]
        return np.array([2 * self.omega, self.omega * Ith / np.hypot(Ith, self.alpha)])

    def orbit(self, actions):
        """``(pt, E, a)`` for the given actions."""
        Ir, Ith = self.action_vector(actions).actions
        pt = float(np.hypot(Ith, self.alpha))
        E = self.omega * (2 * Ir + pt)
        a = float(np.sqrt(1 - (self.omega * pt / E) ** 2))
        if not 0 < a < 1:
            raise ParameterError(f"orbit eccentricity a={a:.6g} outside (0, 1)")
        return pt, E, a

    # -- harmonic series ---------------------------------------------------

    def _fourier(self, values: np.ndarray) -> np.ndarray:
        return np.fft.fft(values) / values.size

    def observables(self, actions):
        pt, E, a = self.orbit(actions)
        w, al = self.omega, self.alpha
        freq = np.array([2 * w])
        dE = 2 * w
        da = 2 * w ** 3 * pt ** 2 / (E ** 3 * a)
        dEa = 2 * w / a

        # lambda_1 = (E/w) (1 + a sin th)
        k1 = np.array([[0], [1], [-1]])
        amp1 = np.array([E / w, -0.5j * E * a / w, 0.5j * E * a / w])
        dI1 = np.zeros((3, 1), dtype=complex)
        dI1[:, 0] = [dE / w, -0.5j * dEa / w, 0.5j * dEa / w]
        lam1 = HarmonicSeries.from_arrays(k1, k1[:, 0] * 2 * w, amp1, dI1, n_angles=1,
                                          frequencies=freq, real=True)

        # lambda_2 = al w^2 / (E (1 + a sin th)) via FFT
        N = self.n_fft
        th = 2 * np.pi * np.arange(N) / N
        s = np.sin(th)
        den = 1 + a * s
        c = self._fourier(al * w ** 2 / (E * den))
        dc = self._fourier(al * w ** 2 * (-dE / (E ** 2 * den) - s * da / (E * den ** 2)))
        m = np.fft.fftfreq(N, d=1.0 / N).astype(np.int64)
        scale = abs(c[0])
        tail = np.abs(c[np.abs(m) >= N // 2 - 1])
        if np.max(tail) > self.truncation * scale:
            raise NumericalQualityError(
                f"{N}-point FFT cannot resolve lambda_2 at a={a:.6g}; increase n_fft")
        keep = np.abs(c) >= self.truncation * scale
        # enforce exact conjugate symmetry of the real function
        c = 0.5 * (c + np.conj(c[(-np.arange(N)) % N]))
        dc = 0.5 * (dc + np.conj(dc[(-np.arange(N)) % N]))
        keep = keep | keep[(-np.arange(N)) % N]
        lam2 = HarmonicSeries.from_arrays(m[keep, None], 2 * w * m[keep], c[keep],
                                          dc[keep, None], n_angles=1, frequencies=freq,
                                          real=True, drop_tol=0.0)
        return [lam1, lam2]

    # -- closed forms ------------------------------------------------------

    def metric_closed(self, actions):
        Ir, _ = self.action_vector(actions).actions
        pt, _, _ = self.orbit(actions)
        w, al = self.omega, self.alpha
        g11 = (Ir ** 2 + Ir * pt) / (2 * w ** 2)
        g12 = -al * Ir / (2 * w * pt)
        g22 = al ** 2 / (2 * pt ** 2) * dilog(Ir / (Ir + pt))
        return np.array([[g11, g12], [g12, g22]])

    def curvature_closed(self, actions):
        self.action_vector(actions)
        return np.zeros((2, 2))

    def determinant_closed(self, actions) -> float:
        Ir, _ = self.action_vector(actions).actions
        pt, _, _ = self.orbit(actions)
        x = Ir / (Ir + pt)
        return (self.alpha ** 2 * Ir ** 2 / (4 * self.omega ** 2 * pt ** 2)
                * ((1 + pt / Ir) * dilog(x) - 1))

    def metric_structure(self):
        """
        Metric at ``Itheta = 0`` as monomials in ``Ir``.

        ``g11`` and ``g12`` are exact; ``g22`` is its expansion to second order.
        """
        w, al = self.omega, self.alpha
        p = abs(al)
        s1 = np.array([[p / (2 * w ** 2), -al / (2 * w * p)],
                       [-al / (2 * w * p), 1 / (2 * p)]])
        s2 = np.array([[1 / (2 * w ** 2), 0.0], [0.0, -3 / (8 * al ** 2)]])
        return {"Ir": s1, "Ir^2": s2}

    def curvature_structure(self):
        return {}

    def g22_expansion(self) -> tuple[float, float]:
        """Coefficients ``(c1, c2)`` of ``g22 = c1 Ir + c2 Ir^2 + ...`` at ``Itheta = 0``."""
        s = self.metric_structure()
        return float(s["Ir"][1, 1]), float(s["Ir^2"][1, 1])

    def registry(self, hbar: float = 1.0) -> QuantizationRegistry:
        return QuantizationRegistry(hbar, {"Ir": (0.5, 1), "Ir^2": (0.5, 2)})

    # -- phase space -------------------------------------------------------

    def phase_space_point(self, phi, actions):
        """Radial ``(r, p_r)`` at radial angle ``phi``."""
        pt, E, a = self.orbit(actions)
        phi = np.asarray(phi, dtype=float)[..., 0]
        u = E + E * a * np.sin(phi)
        return np.stack([np.sqrt(u) / self.omega, E * a * np.cos(phi) / np.sqrt(u)], axis=-1)

    def radius(self, t, phi0, actions):
        """Closed-form ``r(t)`` on the orbit starting at radial angle ``phi0``."""
        pt, E, a = self.orbit(actions)
        return np.sqrt(E + E * a * np.sin(phi0 + 2 * self.omega * np.asarray(t))) / self.omega

    def _pt2(self, actions):
        if actions is None:
            raise CapabilityError("the radial dynamics needs Itheta")
        return np.hypot(self.action_vector(actions).actions[1], self.alpha) ** 2

    def radial_system(self, actions):
        """``(hamiltonian, vector_field)`` of the reduced radial motion."""
        pt2 = self._pt2(actions)
        w2 = self.omega ** 2

        def hamiltonian(z):
            z = np.asarray(z, dtype=float)
            r, p = z[..., 0], z[..., 1]
            return 0.5 * p * p + 0.5 * pt2 / (r * r) + 0.5 * w2 * r * r

        def vector_field(z):
            z = np.asarray(z, dtype=float)
            r, p = z[..., 0], z[..., 1]
            return np.stack([p, pt2 / r ** 3 - w2 * r], axis=-1)

        return hamiltonian, vector_field

    def observables_at(self, z):
        r = np.asarray(z, dtype=float)[..., 0]
        return np.stack([self.omega * r * r, self.alpha / (r * r)], axis=-1)


def singular_model(omega: float, alpha: float, truncation: float = 1e-14,
                   n_fft: int = 4096) -> SingularModel:
    """Build the singular oscillator at ``(omega, alpha)``."""
    return SingularModel(omega, alpha, truncation, n_fft)
