"""
Two-mode Grassmann bilinear ``H = psi^dagger M(x) psi``.

In the eigenframe ``H = Omega_1 I_1 + Omega_2 I_2`` and the deformation
functions are ``lambda_i(t) = sum_ab psi_a^* psi_b sigma~_iab e^{i(Omega_a - Omega_b) t}``
with ``sigma~_i = U^dagger (d_i M) U``.  Averaging over the mode phases
collapses the metric and curvature to closed sums over the single
frequency ``Omega_1 - Omega_2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .core import (DegeneracyError, DimensionError, GeometricTensor, NumericalQualityError,
                   ParameterError, TENSOR_TOL)
from .harmonics import CorrelatorSeries
from .kernels import quadrant_kernel

__all__ = [
    "FermionicSystem", "fermionic_system", "diagonalize", "tilde_matrices",
    "fermionic_metric", "fermionic_curvature", "fermionic_correlator", "fermionic_bracket",
    "moment_rules", "grassmann_average", "moment_rule_metric", "bracket_sum_curvature",
    "PAULI",
]

PAULI = (np.array([[0, 1], [1, 0]], dtype=complex),
         np.array([[0, -1j], [1j, 0]], dtype=complex),
         np.array([[1, 0], [0, -1]], dtype=complex))

HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-10


def _check_hermitian(M: np.ndarray, what: str = "M"):
    if M.shape != (2, 2):
        raise DimensionError(f"{what} must be 2x2, got {M.shape}")
    if np.max(np.abs(M - M.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(M))):
        raise ParameterError(f"{what} is not Hermitian")


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    for comp in v:
        if abs(comp) > 1e-14:
            return v * (abs(comp) / comp)
    return v


def diagonalize(M) -> tuple[np.ndarray, np.ndarray]:
    """
    Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Returns
    -------
    U : ndarray, shape (2, 2)
        Unitary with eigenvectors as columns; the first nonzero component of
        each column is real and positive.
    Omega : ndarray, shape (2,)
        Eigenvalues in descending order.

    Raises
    ------
    DegeneracyError
        If ``|Omega_1 - Omega_2| < 1e-10 ||M||``.
    """
    M = np.asarray(M, dtype=complex)
    _check_hermitian(M)
    a, d = M[0, 0].real, M[1, 1].real
    b = M[0, 1]
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    r = float(np.hypot(half, abs(b)))
    norm = float(np.linalg.norm(M, 2))
    if 2 * r <= DEGENERACY_TOL * norm or norm == 0.0:
        raise DegeneracyError("degenerate eigenvalues (e.g. vanishing field)")
    omega = np.array([mean + r, mean - r])
    cols = []
    for lam in omega:
        # two candidate null vectors of (M - lam); keep the better conditioned one
        v1 = np.array([b, lam - a])
        v2 = np.array([lam - d, np.conj(b)])
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        cols.append(_fix_phase(v))
    U = np.column_stack(cols)
    return U, omega


@dataclass(frozen=True)
class FermionicSystem:
    """Eigenframe data of a two-mode bilinear at one parameter point."""

    M: np.ndarray
    dM: tuple
    U: np.ndarray
    Omega: np.ndarray
    I: np.ndarray

    def __post_init__(self):
        U, M = self.U, self.M
        if np.max(np.abs(U.conj().T @ U - np.eye(2))) > 1e-12:
            raise NumericalQualityError("eigenframe is not unitary")
        D = U.conj().T @ M @ U
        scale = max(1.0, float(np.max(np.abs(M))))
        if np.max(np.abs(D - np.diag(self.Omega))) > 1e-12 * scale:
            raise NumericalQualityError("eigenframe does not diagonalize M")
        if self.Omega[0] < self.Omega[1]:
            raise NumericalQualityError("eigenvalues must be in descending order")

    @property
    def n_params(self) -> int:
        return len(self.dM)

    @property
    def gap(self) -> float:
        return float(self.Omega[0] - self.Omega[1])


def fermionic_system(M, dM: Sequence, I, phase_shift=None) -> FermionicSystem:
    """
    Diagonalize ``M`` and bundle it with its gradients and occupations.

    ``phase_shift`` multiplies the eigenvector columns by ``exp(i c_a)``;
    every output is independent of it.
    """
    M = np.asarray(M, dtype=complex)
    dM = tuple(np.asarray(m, dtype=complex) for m in dM)
    for n, m in enumerate(dM):
        _check_hermitian(m, f"dM[{n}]")
    I = np.asarray(I, dtype=float).reshape(-1)
    if I.size != 2:
        raise DimensionError("two occupations are required")
    U, omega = diagonalize(M)
    if phase_shift is not None:
        U = U * np.exp(1j * np.asarray(phase_shift, dtype=float).reshape(1, 2))
    return FermionicSystem(M, dM, U, omega, I)


def tilde_matrices(sys: FermionicSystem) -> list[np.ndarray]:
    """``sigma~_i = U^dagger (d_i M) U`` for every parameter."""
    Uh = sys.U.conj().T
    return [Uh @ m @ sys.U for m in sys.dM]


def _pair_products(sys: FermionicSystem):
    st = tilde_matrices(sys)
    up = np.array([s[0, 1] for s in st])  # sigma~_i12
    dn = np.array([s[1, 0] for s in st])  # sigma~_i21
    return up, dn


def _real_part(m: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if np.max(np.abs(m.imag), initial=0.0) > TENSOR_TOL * scale:
        raise NumericalQualityError(f"{what} has a non-negligible imaginary part")
    return m.real


def fermionic_metric(sys: FermionicSystem) -> GeometricTensor:
    """``g_ij = -(I1 I2 / gap^2) (s_i12 s_j21 + s_i21 s_j12)``."""
    up, dn = _pair_products(sys)
    I1, I2 = sys.I
    g = -(I1 * I2 / sys.gap ** 2) * (np.outer(up, dn) + np.outer(dn, up))
    g = _real_part(g, "fermionic metric")
    return GeometricTensor("metric", 0.5 * (g + g.T))


def fermionic_curvature(sys: FermionicSystem) -> GeometricTensor:
    """``F_ij = i (I1 - I2) / gap^2 (s_i21 s_j12 - s_i12 s_j21)``."""
    up, dn = _pair_products(sys)
    I1, I2 = sys.I
    F = 1j * (I1 - I2) / sys.gap ** 2 * (np.outer(dn, up) - np.outer(up, dn))
    F = _real_part(F, "fermionic curvature")
    return GeometricTensor("curvature", 0.5 * (F - F.T))


def fermionic_correlator(sys: FermionicSystem, i: int, j: int) -> CorrelatorSeries:
    """Connected correlator of ``lambda_i(t1)`` and ``lambda_j(t2)`` as a series in ``t12``."""
    up, dn = _pair_products(sys)
    I1, I2 = sys.I
    return CorrelatorSeries([sys.gap, -sys.gap],
                            [-I1 * I2 * up[i] * dn[j], -I1 * I2 * dn[i] * up[j]])


def fermionic_bracket(sys: FermionicSystem, i: int, j: int) -> CorrelatorSeries:
    """Phase average of the Grassmann bracket ``{lambda_i(t1), lambda_j(t2)}``."""
    up, dn = _pair_products(sys)
    I1, I2 = sys.I
    return CorrelatorSeries([sys.gap, -sys.gap],
                            [1j * (I1 - I2) * up[i] * dn[j], -1j * (I1 - I2) * dn[i] * up[j]])


# -- moment-rule oracle -----------------------------------------------------

def moment_rules(*idx: int) -> float:
    """
    Phase averages of ``exp(i(phi_a - phi_b))`` and
    ``exp(i(phi_a - phi_b + phi_c - phi_d))`` for mode indices in ``{1, 2}``.
    """
    if len(idx) not in (2, 4):
        raise ParameterError("moment rules take two or four mode indices")
    if any(i not in (1, 2) for i in idx):
        raise ParameterError("mode indices must be 1 or 2")
    if len(idx) == 2:
        a, b = idx
        return float(a == b)
    a, b, c, d = idx
    return float((a == b and c == d) + (a == 1 and b == 2 and c == 2 and d == 1)
                 + (a == 2 and b == 1 and c == 1 and d == 2))


def grassmann_average(word: Sequence[tuple[int, bool]], I) -> float:
    """
    Value of a product of phase-stripped Grassmann generators.

    ``word`` lists ``(mode, conjugated)`` pairs (modes 1-based).  The product
    is reordered into ``psi_1^* psi_1 psi_2^* psi_2 ...`` counting sign flips;
    repeated generators vanish, each ``psi_a^* psi_a`` contributes ``I_a``.
    Words that are not fully paired return 0.
    """
    keys = [(m, 0 if conj else 1) for m, conj in word]
    if len(set(keys)) != len(keys):
        return 0.0
    sign = 1.0
    keys = list(keys)
    for n in range(len(keys)):
        for m in range(len(keys) - 1 - n):
            if keys[m] > keys[m + 1]:
                keys[m], keys[m + 1] = keys[m + 1], keys[m]
                sign = -sign
    value = sign
    for n in range(0, len(keys), 2):
        if n + 1 >= len(keys):
            return 0.0
        (m1, c1), (m2, c2) = keys[n], keys[n + 1]
        if m1 != m2 or (c1, c2) != (0, 1):
            return 0.0
        value *= I[m1 - 1]
    return value


def moment_rule_metric(sys: FermionicSystem) -> np.ndarray:
    """
    Metric re-derived term by term from the phase moment rules.

    Each product ``psi_a^* psi_b psi_c^* psi_d`` is weighted by its phase
    average and its Grassmann value; the disconnected part is the Grassmann
    product of the two one-point averages.  Every surviving frequency is
    passed through :func:`quadrant_kernel`.
    """
    st = tilde_matrices(sys)
    n = len(st)
    om = sys.Omega
    g = np.zeros((n, n), dtype=complex)
    for i, j in product(range(n), repeat=2):
        total = 0.0 + 0.0j
        for a, b, c, d in product((1, 2), repeat=4):
            coef = st[i][a - 1, b - 1] * st[j][c - 1, d - 1]
            word = [(a, True), (b, False), (c, True), (d, False)]
            full = moment_rules(a, b, c, d) * grassmann_average(word, sys.I)
            disc = moment_rules(a, b) * moment_rules(c, d) * grassmann_average(
                [(a, True), (a, False), (c, True), (c, False)], sys.I)
            weight = full - disc
            if weight == 0:
                continue
            nu1 = om[a - 1] - om[b - 1]
            nu2 = om[c - 1] - om[d - 1]
            if abs(nu1 + nu2) > 1e-12 * max(1.0, abs(nu1)):
                raise NumericalQualityError("non-stationary term survived the phase average")
            total += coef * weight * quadrant_kernel(nu1)
        g[i, j] = -total
    return _real_part(g, "oracle metric")


def bracket_sum_curvature(sys: FermionicSystem) -> np.ndarray:
    """
    Curvature from the averaged bracket written as a double sum over modes,
    ``i sum_ab I_b [-e^{i w_ab t} s_iab s_jba + e^{-i w_ab t} s_iba s_jab]``.
    """
    st = tilde_matrices(sys)
    n = len(st)
    om = sys.Omega
    F = np.zeros((n, n), dtype=complex)
    for i, j in product(range(n), repeat=2):
        total = 0.0 + 0.0j
        for a, b in product(range(2), repeat=2):
            if a == b:
                continue  # zero frequency: the two pieces cancel identically
            w = om[a] - om[b]
            K = quadrant_kernel(w)
            total += 1j * sys.I[b] * (-st[i][a, b] * st[j][b, a] + st[i][b, a] * st[j][a, b]) * K
        F[i, j] = total
    return _real_part(F, "oracle curvature")
