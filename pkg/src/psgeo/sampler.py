"""
Trajectory-sampling backend.

Hamilton's equations are integrated from an angle grid of initial
conditions, the damped double time integral is accumulated by Simpson
quadrature and extrapolated to zero damping.  This path never touches the
harmonic series and serves as an oracle for them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .core import (ActionVector, ConditioningError, EnergyDriftError, GeometricTensor,
                   NumericalQualityError, ParameterError, UnsupportedBackendError)
from .kernels import richardson_limit
from .models.base import ModelSpec, symplectic_unit

__all__ = ["TrajectoryBatch", "integrate_trajectory", "sample_tensor", "extract_harmonics",
           "HarmonicFit", "angle_grid", "simpson_weights", "composition_coefficients"]

DRIFT_TOL = 1e-8
TRUNCATION = 1e-8


@dataclass(frozen=True)
class TrajectoryBatch:
    """States ``(n_traj, n_times, 2n)`` on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray
    energy_drift: float
    method: str
    model_id: str = ""
    meta: dict = field(default_factory=dict)


# -- integrators -------------------------------------------------------------

def composition_coefficients(order: int) -> np.ndarray:
    """
    Substep fractions turning a symmetric second-order step into one of
    ``order`` (2, 4, 6, ...) by recursive triple jumps.
    """
    if order < 2 or order % 2:
        raise ParameterError("composition order must be an even integer >= 2")
    coeffs = np.array([1.0])
    for p in range(2, order, 2):
        root = 2.0 ** (1.0 / (p + 1))
        outer = 1.0 / (2.0 - root)
        inner = -root * outer
        coeffs = np.concatenate([coeffs * outer, coeffs * inner, coeffs * outer])
    return coeffs


def _midpoint_step(f, z, h, tol=1e-15, max_iter=100):
    z1 = z + h * f(z)
    for _ in range(max_iter):
        z_new = z + h * f(0.5 * (z + z1))
        if np.max(np.abs(z_new - z1)) <= tol * max(1.0, float(np.max(np.abs(z_new)))):
            return z_new
        z1 = z_new
    raise NumericalQualityError("implicit midpoint iteration did not converge")


def _resolve_system(system, actions=None):
    """Return ``(hamiltonian, vector_field, generator_or_None, model_id)``."""
    if isinstance(system, ModelSpec):
        if system.linear_generator is not None:
            return system.hamiltonian, system.vector_field, system.linear_generator, system.id
        if hasattr(system, "radial_system"):
            if actions is None:
                raise ParameterError(f"{system.id} trajectories need the actions")
            H, f = system.radial_system(actions)
            return H, f, None, system.id
        raise UnsupportedBackendError(f"{system.id} has no phase-space dynamics")
    if isinstance(system, np.ndarray):
        A = np.asarray(system, dtype=float)
        n = A.shape[0] // 2
        J = symplectic_unit(n)
        K = -J @ A  # A = J K
        return (lambda z: 0.5 * np.einsum("...i,ij,...j->...", z, K, z),
                lambda z: z @ A.T, A, "")
    H, f = system
    return H, f, None, ""


def integrate_trajectory(system, z0, T: float, dt: float, *, method: str = "auto",
                         order: int = 6, actions=None,
                         drift_tol: float = DRIFT_TOL) -> TrajectoryBatch:
    """
    Integrate Hamilton's equations from ``z0`` over ``[0, T]`` (``T`` may be negative).

    Parameters
    ----------
    system : ModelSpec, ndarray or (hamiltonian, vector_field)
        A model, a linear generator ``A`` with ``dz/dt = A z``, or callables.
    z0 : array_like, shape (2n,) or (n_traj, 2n)
    T, dt : float
        Horizon and nominal step; the step is shrunk so that it divides ``T``.
    method : {"auto", "exact", "midpoint"}
        ``exact`` uses the matrix exponential of a linear generator;
        ``midpoint`` is the implicit midpoint rule composed to ``order``.
        ``auto`` picks ``exact`` when available.
    actions : optional
        Needed for models whose reduced dynamics depends on the actions.

    Raises
    ------
    EnergyDriftError
        If the relative energy drift exceeds ``drift_tol``.
    """
    H, f, A, model_id = _resolve_system(system, actions)
    z0 = np.atleast_2d(np.asarray(z0, dtype=float))
    n_steps = max(1, int(np.ceil(abs(T) / dt - 1e-12)))
    h = T / n_steps
    if method == "auto":
        method = "exact" if A is not None else "midpoint"
    states = np.empty((z0.shape[0], n_steps + 1, z0.shape[1]))
    states[:, 0] = z0
    if method == "exact":
        if A is None:
            raise ParameterError("exact propagation needs a linear generator")
        P = expm(h * A)
        z = z0
        for s in range(1, n_steps + 1):
            z = z @ P.T
            states[:, s] = z
    elif method == "midpoint":
        fracs = composition_coefficients(order)
        z = z0
        for s in range(1, n_steps + 1):
            for c in fracs:
                z = _midpoint_step(f, z, c * h)
            states[:, s] = z
    else:
        raise ParameterError(f"unknown integration method {method!r}")
    energy = H(states)
    e0 = energy[:, :1]
    drift = float(np.max(np.abs(energy - e0) / np.maximum(np.abs(e0), 1e-300)))
    if drift > drift_tol:
        raise EnergyDriftError(f"relative energy drift {drift:.3g} exceeds {drift_tol:.1g}")
    times = np.arange(n_steps + 1) * h
    return TrajectoryBatch(times, states, drift, method, model_id,
                           {"dt": h, "order": order if method == "midpoint" else None})


# -- quadrature helpers ------------------------------------------------------

def angle_grid(M: int, n_angles: int) -> np.ndarray:
    """Uniform ``M``-point grid per angle, flattened to ``(M**n, n)``."""
    axis = 2 * np.pi * np.arange(M) / M
    mesh = np.meshgrid(*([axis] * n_angles), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def simpson_weights(n_intervals: int, h: float) -> np.ndarray:
    """Composite Simpson weights for an even number of intervals."""
    if n_intervals % 2:
        raise ParameterError("Simpson's rule needs an even number of intervals")
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def _beat_frequencies(omega: np.ndarray) -> np.ndarray:
    nus = [2 * abs(w) for w in omega]
    for a in range(len(omega)):
        for b in range(a + 1, len(omega)):
            nus += [abs(omega[a] + omega[b]), abs(omega[a] - omega[b])]
    nus = np.array(nus)
    return nus[nus > 1e-9 * nus.max()]


def _accumulate(model, A, z0, h, n_intervals, epsilons, obs_fn, with_tangent, chunk,
                drift_tol):
    """Damped Simpson integrals of centred observables (and tangent vectors)."""
    d = z0.shape[1]
    n_obs = obs_fn(z0[:1]).shape[-1]
    K = len(epsilons)
    weights = simpson_weights(n_intervals, abs(h))
    acc = np.zeros((K, z0.shape[0], n_obs))
    tan = np.zeros((K, z0.shape[0], n_obs, d)) if with_tangent else None
    step = expm(h * A)
    powers = np.empty((chunk, d, d))
    powers[0] = np.eye(d)
    for j in range(1, chunk):
        powers[j] = step @ powers[j - 1]
    e0 = model.hamiltonian(z0)
    drift = 0.0
    phi_start = np.eye(d)
    z_start = z0
    for start in range(0, n_intervals + 1, chunk):
        L = min(chunk, n_intervals + 1 - start)
        P = powers[:L]
        Z = np.einsum("jde,te->jtd", P, z_start)
        t = (start + np.arange(L)) * abs(h)
        W = weights[start:start + L, None] * np.exp(-np.outer(t, epsilons))  # (L, K)
        O = obs_fn(Z)
        O = O - O.mean(axis=1, keepdims=True)
        acc += np.einsum("jk,jti->kti", W, O)
        if with_tangent:
            Phi = np.einsum("jde,ef->jdf", P, phi_start)
            grads = model.observable_gradients(Z)  # (L, traj, n_obs, d)
            U = np.einsum("jdf,jtid->jtif", Phi, grads)  # Phi^T grad
            tan += np.einsum("jk,jtif->ktif", W, U)
        drift = max(drift, float(np.max(np.abs(model.hamiltonian(Z[-1]) - e0)
                                        / np.maximum(np.abs(e0), 1e-300))))
        z_start = Z[-1] @ step.T
        phi_start = step @ P[-1] @ phi_start
    if drift > drift_tol:
        raise EnergyDriftError(f"relative energy drift {drift:.3g} exceeds {drift_tol:.1g}")
    return acc, tan, drift


def sample_tensor(model: ModelSpec, actions, grid: int | None = None,
                  horizon: float | None = None, epsilons: Sequence[float] | None = None,
                  *, kind: str = "metric", dt: float | None = None,
                  observable_fn: Callable | None = None, chunk: int = 256,
                  drift_tol: float = DRIFT_TOL, check_grid: bool = False,
                  grid_tol: float = 1e-6) -> GeometricTensor:
    """
    Metric or curvature from sampled trajectories.

    Parameters
    ----------
    model : ModelSpec
        Must provide a linear generator and an action-angle map.
    actions : array_like, mapping or ActionVector
    grid : int, optional
        Points per angle ``M``; default 8, exact for quadratic observables.
    horizon : float, optional
        Integration horizon ``T``; default makes ``exp(-eps_min T) < 1e-8``.
    epsilons : sequence of float, optional
        Damping rates; default ``0.2 nu_min / 2**k`` for ``k = 0..4`` with
        ``nu_min`` the slowest correlator frequency.
    kind : {"metric", "curvature"}
        The curvature uses tangent dynamics ``d z(t) / d z0``.
    dt : float, optional
        Time step; default ``0.1 / nu_max``.
    observable_fn : callable, optional
        Replaces the model's deformation functions ``z -> (..., N)``.
    check_grid : bool
        Recompute with ``2M`` and fail if any entry moves by more than
        ``10 * grid_tol``.

    Raises
    ------
    UnsupportedBackendError
        For models without linear phase-space dynamics.
    EnergyDriftError
    """
    if kind not in ("metric", "curvature"):
        raise ParameterError(f"unknown tensor kind {kind!r}")
    if not model.sampler_capable or model.linear_generator is None:
        raise UnsupportedBackendError(f"sampler backend does not support model {model.id}")
    if kind == "curvature" and observable_fn is not None:
        raise ParameterError("custom observables are only supported for the metric")
    av = model.action_vector(actions)
    M = int(grid or 8)
    nus = _beat_frequencies(model.frequencies())
    if epsilons is None:
        epsilons = 0.2 * nus.min() * 0.5 ** np.arange(5)
    epsilons = np.sort(np.asarray(epsilons, dtype=float))[::-1]
    if np.any(epsilons <= 0):
        raise ParameterError("damping rates must be positive")
    T = float(horizon) if horizon is not None else np.log(1 / TRUNCATION) / epsilons[-1]
    h0 = float(dt) if dt is not None else 0.1 / nus.max()
    n_int = int(np.ceil(T / h0))
    n_int += n_int % 2
    h = T / n_int

    phi = angle_grid(M, model.n_angles)
    z0 = model.phase_space_point(phi, av)
    A = model.linear_generator
    obs = observable_fn or model.observables_at
    tangent = kind == "curvature"
    fwd, tfwd, d1 = _accumulate(model, A, z0, h, n_int, epsilons, obs, tangent, chunk, drift_tol)
    bwd, tbwd, d2 = _accumulate(model, A, z0, -h, n_int, epsilons, obs, tangent, chunk,
                                drift_tol)
    if kind == "metric":
        per_eps = -np.einsum("kti,ktj->kij", bwd, fwd) / z0.shape[0]
    else:
        J = symplectic_unit(model.n_angles)
        per_eps = np.einsum("ktid,de,ktje->kij", tbwd, J, tfwd) / z0.shape[0]
    n = per_eps.shape[1]
    m = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m[i, j] = richardson_limit(epsilons, per_eps[:, i, j]).real
    sign = 1.0 if kind == "metric" else -1.0
    asym = float(np.max(np.abs(m - sign * m.T)))
    m = 0.5 * (m + sign * m.T)
    meta = {"backend": "sampler", "grid": M, "horizon": T, "dt": h, "n_steps": n_int,
            "epsilons": epsilons.tolist(), "energy_drift": max(d1, d2), "asymmetry": asym}
    if check_grid:
        finer = sample_tensor(model, av, 2 * M, T, epsilons, kind=kind, dt=h,
                              observable_fn=observable_fn, chunk=chunk, drift_tol=drift_tol)
        change = float(np.max(np.abs(finer.matrix - m)))
        meta["grid_change"] = change
        if change > 10 * grid_tol:
            raise NumericalQualityError(
                f"angle grid M={M} too coarse: doubling changes entries by {change:.3g}")
    return GeometricTensor(kind, m, model.point, av, meta)


# -- harmonic extraction -----------------------------------------------------

@dataclass(frozen=True)
class HarmonicFit:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    residual: float
    condition: float


def extract_harmonics(t, samples, frequencies, max_condition: float = 1e8) -> HarmonicFit:
    """
    Least-squares fit ``samples(t) ~ sum_nu a_nu exp(i nu t)``.

    Raises
    ------
    ConditioningError
        If the design matrix condition number exceeds ``max_condition``.
    """
    t = np.asarray(t, dtype=float).reshape(-1)
    y = np.asarray(samples, dtype=complex).reshape(-1)
    nu = np.asarray(frequencies, dtype=float).reshape(-1)
    design = np.exp(1j * np.outer(t, nu))
    cond = float(np.linalg.cond(design))
    if not np.isfinite(cond) or cond > max_condition:
        raise ConditioningError(f"harmonic design matrix is ill-conditioned (cond={cond:.3g})")
    amps, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.max(np.abs(design @ amps - y), initial=0.0))
    return HarmonicFit(nu, amps, resid, cond)
