"""
Exact algebra on finite harmonic series.

A series represents a function of the initial angles ``phi0`` and time ``t``

    s(t, phi0) = sum_r amp_r * exp(i (k_r . phi0 + nu_r t))

where the amplitudes may depend on the actions ``I``.  Averages over the angle
torus pick out ``k = 0`` terms, so connected correlators and non-equal-time
Poisson brackets reduce to sums over wavevector-matched pairs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (AMP_DROP_TOL, CONJ_TOL, FREQ_TOL, MERGE_FREQ_TOL, PAIR_FREQ_TOL,
                   CapabilityError, DimensionError, HarmonicTerm,
                   IncommensurateFrequencyError, NumericalQualityError,
                   SecularTermError)

__all__ = [
    "HarmonicSeries", "CorrelatorSeries", "make_series", "angle_average",
    "connected_correlator", "poisson_bracket", "series_product", "trig_series",
]


def _cluster(nus: np.ndarray, tol: float = MERGE_FREQ_TOL) -> np.ndarray:
    """Label frequencies so that values within ``tol`` (relative) share a label."""
    order = np.argsort(nus, kind="stable")
    labels = np.empty(nus.size, dtype=int)
    label = -1
    prev = None
    for idx in order:
        nu = nus[idx]
        if prev is None or abs(nu - prev) > tol * max(1.0, abs(nu)):
            label += 1
        labels[idx] = label
        prev = nu
    return labels


class HarmonicSeries:
    """
    Immutable finite harmonic series over ``n_angles`` angle variables.

    Use :func:`make_series` or :meth:`from_arrays` to build one; both merge
    terms sharing ``(k, nu)`` and drop negligible terms.

    Attributes
    ----------
    k : ndarray of int, shape (n_terms, n_angles)
    nu : ndarray of float, shape (n_terms,)
    amp : ndarray of complex, shape (n_terms,)
    amp_dI : ndarray of complex, shape (n_terms, n_angles) or None
    degree : ndarray of object (Fraction), shape (n_terms, n_angles) or None
    frequencies : ndarray or None
        Model frequencies ``Omega``; when given every term obeys
        ``nu == k . Omega``.
    real : bool
        Whether the series is flagged as a real function (conjugation closed).
    action_dependent : bool
        True when ``Omega`` depends on the actions; brackets then refuse.
    """

    __slots__ = ("k", "nu", "amp", "amp_dI", "degree", "n_angles", "frequencies",
                 "real", "action_dependent")

    def __init__(self, k, nu, amp, amp_dI, degree, n_angles, frequencies, real,
                 action_dependent):
        self.k = k
        self.nu = nu
        self.amp = amp
        self.amp_dI = amp_dI
        self.degree = degree
        self.n_angles = n_angles
        self.frequencies = frequencies
        self.real = real
        self.action_dependent = action_dependent
        for arr in (k, nu, amp, amp_dI, degree, frequencies):
            if isinstance(arr, np.ndarray):
                arr.setflags(write=False)

    @classmethod
    def from_arrays(cls, k, nu, amp, amp_dI=None, degree=None, *, n_angles=None,
                    frequencies=None, real=False, action_dependent=False,
                    drop_tol=AMP_DROP_TOL) -> "HarmonicSeries":
        """Build a series from parallel arrays, merging duplicates."""
        amp = np.asarray(amp, dtype=complex).reshape(-1)
        n_terms = amp.size
        if n_angles is None:
            n_angles = np.asarray(k).shape[-1] if np.ndim(k) == 2 else 1
        k = np.asarray(k, dtype=np.int64).reshape(n_terms, -1) if n_terms else \
            np.zeros((0, n_angles), dtype=np.int64)
        if k.shape[1] != n_angles:
            raise DimensionError(
                f"wavevectors have length {k.shape[1]}, expected {n_angles}")
        nu = np.asarray(nu, dtype=float).reshape(-1)
        if nu.size != n_terms:
            raise DimensionError("nu and amp lengths differ")
        if not np.all(np.isfinite(amp)):
            raise NumericalQualityError("harmonic amplitude is not finite")
        if amp_dI is not None:
            amp_dI = np.asarray(amp_dI, dtype=complex).reshape(n_terms, n_angles)
        if degree is not None:
            degree = np.asarray(degree, dtype=object).reshape(n_terms, n_angles)
        if frequencies is not None:
            frequencies = np.asarray(frequencies, dtype=float).reshape(-1)
            if frequencies.size != n_angles:
                raise DimensionError("frequencies length differs from n_angles")
            expected = k @ frequencies
            bad = np.abs(nu - expected) > FREQ_TOL * np.maximum(1.0, np.abs(expected))
            if np.any(bad):
                raise NumericalQualityError(
                    "term frequency inconsistent with k . Omega "
                    f"(nu={nu[bad][0]!r}, k.Omega={expected[bad][0]!r})")

        k, nu, amp, amp_dI, degree = _merge(k, nu, amp, amp_dI, degree, drop_tol)
        series = cls(k, nu, amp, amp_dI, degree, n_angles, frequencies, bool(real),
                     bool(action_dependent))
        if real:
            series._check_real()
        return series

    # -- inspection ---------------------------------------------------------

    def __len__(self):
        return self.amp.size

    def __repr__(self):
        return (f"HarmonicSeries(n_terms={len(self)}, n_angles={self.n_angles}, "
                f"real={self.real})")

    @property
    def terms(self) -> list[HarmonicTerm]:
        out = []
        for r in range(len(self)):
            out.append(HarmonicTerm(
                tuple(self.k[r]), self.nu[r], self.amp[r],
                None if self.amp_dI is None else tuple(self.amp_dI[r]),
                None if self.degree is None else tuple(self.degree[r])))
        return out

    @property
    def has_derivatives(self) -> bool:
        return self.amp_dI is not None

    def _check_real(self):
        index = {}
        for r in range(len(self)):
            index.setdefault(tuple(self.k[r]), []).append(r)
        for r in range(len(self)):
            match = False
            for s in index.get(tuple(-self.k[r]), ()):
                scale = max(1.0, abs(self.nu[r]))
                if (abs(self.nu[s] + self.nu[r]) <= MERGE_FREQ_TOL * scale and
                        abs(self.amp[s] - np.conj(self.amp[r]))
                        <= CONJ_TOL * max(abs(self.amp[r]), AMP_DROP_TOL)):
                    match = True
                    break
            if not match:
                raise NumericalQualityError(
                    f"series flagged real lacks the conjugate of term k={tuple(self.k[r])}")

    def _like(self, k, nu, amp, amp_dI, degree, real=None, **kw):
        return HarmonicSeries.from_arrays(
            k, nu, amp, amp_dI, degree, n_angles=self.n_angles,
            frequencies=kw.get("frequencies", self.frequencies),
            real=self.real if real is None else real,
            action_dependent=kw.get("action_dependent", self.action_dependent))

    # -- algebra ------------------------------------------------------------

    def scale(self, c: complex) -> "HarmonicSeries":
        c = complex(c)
        real = self.real and c.imag == 0
        return self._like(self.k, self.nu, self.amp * c,
                          None if self.amp_dI is None else self.amp_dI * c,
                          self.degree, real=real)

    def __mul__(self, other):
        if isinstance(other, HarmonicSeries):
            return series_product(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def __add__(self, other: "HarmonicSeries") -> "HarmonicSeries":
        if not isinstance(other, HarmonicSeries):
            return NotImplemented
        _check_compatible(self, other)
        amp_dI = None
        if self.amp_dI is not None and other.amp_dI is not None:
            amp_dI = np.concatenate([self.amp_dI, other.amp_dI])
        degree = None
        if self.degree is not None and other.degree is not None:
            degree = np.concatenate([self.degree, other.degree])
        return self._like(np.concatenate([self.k, other.k]),
                          np.concatenate([self.nu, other.nu]),
                          np.concatenate([self.amp, other.amp]), amp_dI, degree,
                          real=self.real and other.real,
                          action_dependent=self.action_dependent or other.action_dependent)

    def __sub__(self, other):
        return self + (-other)

    def phase_shift(self, shift, shift_dI=None) -> "HarmonicSeries":
        """
        Shift the initial angles, ``phi0 -> phi0 + c(I)``.

        Parameters
        ----------
        shift : array_like, shape (n_angles,)
            Angle offsets ``c_a``.
        shift_dI : array_like, shape (n_angles, n_angles), optional
            Jacobian ``d c_a / d I_b``; zero when omitted.
        """
        shift = np.asarray(shift, dtype=float).reshape(-1)
        if shift.size != self.n_angles:
            raise DimensionError("shift length differs from n_angles")
        phase = np.exp(1j * (self.k @ shift))
        amp = self.amp * phase
        amp_dI = None
        if self.amp_dI is not None:
            amp_dI = self.amp_dI * phase[:, None]
            if shift_dI is not None:
                jac = np.asarray(shift_dI, dtype=float).reshape(self.n_angles, self.n_angles)
                amp_dI = amp_dI + 1j * (self.k @ jac) * amp[:, None]
        return self._like(self.k, self.nu, amp, amp_dI, self.degree)

    def evaluate(self, t, phi0) -> np.ndarray:
        """
        Evaluate the series at times ``t`` and angles ``phi0``.

        ``phi0`` has trailing dimension ``n_angles``; ``t`` and the leading
        dimensions of ``phi0`` broadcast.
        """
        phi0 = np.asarray(phi0, dtype=float)
        t = np.asarray(t, dtype=float)
        phase = np.tensordot(phi0, self.k.T.astype(float), axes=([-1], [0]))
        phase = phase + t[..., None] * self.nu
        return np.exp(1j * phase) @ self.amp


def _check_compatible(a: HarmonicSeries, b: HarmonicSeries):
    if a.n_angles != b.n_angles:
        raise DimensionError(f"series have {a.n_angles} and {b.n_angles} angles")


def _merge(k, nu, amp, amp_dI, degree, drop_tol):
    n = amp.size
    if n == 0:
        return k, nu, amp, amp_dI, degree
    groups = defaultdict(list)
    for r in range(n):
        groups[k[r].tobytes()].append(r)
    out_idx, out_amp, out_dI, out_deg = [], [], [], []
    degree_ok = degree is not None
    for rows in groups.values():
        rows = np.asarray(rows)
        labels = _cluster(nu[rows]) if rows.size > 1 else np.zeros(1, dtype=int)
        for lab in np.unique(labels):
            members = rows[labels == lab]
            out_idx.append(members[0])
            out_amp.append(amp[members].sum())
            if amp_dI is not None:
                out_dI.append(amp_dI[members].sum(axis=0))
            if degree_ok:
                first = tuple(degree[members[0]])
                if any(tuple(degree[m]) != first for m in members[1:]):
                    degree_ok = False
                else:
                    out_deg.append(first)
    idx = np.asarray(out_idx)
    amp_m = np.asarray(out_amp, dtype=complex)
    dI_m = np.asarray(out_dI, dtype=complex).reshape(idx.size, -1) if amp_dI is not None else None
    keep = np.abs(amp_m) >= drop_tol
    if dI_m is not None:
        keep |= np.any(np.abs(dI_m) >= drop_tol, axis=1)
    order = np.lexsort(np.vstack([nu[idx], k[idx].T[::-1]]))
    order = order[keep[order]]
    k_out = k[idx][order]
    nu_out = nu[idx][order]
    deg_out = None
    if degree_ok:
        deg_arr = np.empty((idx.size, k.shape[1]), dtype=object)
        for r, d in enumerate(out_deg):
            deg_arr[r, :] = d
        deg_out = deg_arr[order]
    return (k_out, nu_out, amp_m[order],
            None if dI_m is None else dI_m[order], deg_out)


def make_series(terms: Iterable[HarmonicTerm], n_angles: int, *, frequencies=None,
                real=False, action_dependent=False,
                drop_tol=AMP_DROP_TOL) -> HarmonicSeries:
    """
    Build a :class:`HarmonicSeries` from terms.

    Duplicate ``(k, nu)`` pairs are merged by adding amplitudes and terms with
    ``|amp| < drop_tol`` (and negligible derivatives) are dropped.

    Raises
    ------
    DimensionError
        If a wavevector length differs from ``n_angles``.
    """
    terms = list(terms)
    for term in terms:
        if len(term.k) != n_angles:
            raise DimensionError(
                f"wavevector {term.k} has length {len(term.k)}, expected {n_angles}")
    if not terms:
        return HarmonicSeries.from_arrays(np.zeros((0, n_angles)), [], [],
                                          n_angles=n_angles, frequencies=frequencies,
                                          real=real, action_dependent=action_dependent)
    with_dI = all(t.amp_dI is not None for t in terms)
    with_deg = all(t.degree is not None for t in terms)
    return HarmonicSeries.from_arrays(
        [t.k for t in terms], [t.nu for t in terms], [t.amp for t in terms],
        [t.amp_dI for t in terms] if with_dI else None,
        [t.degree for t in terms] if with_deg else None,
        n_angles=n_angles, frequencies=frequencies, real=real,
        action_dependent=action_dependent, drop_tol=drop_tol)


def trig_series(axis: int, n_angles: int, omega: float, cos_amp: complex = 0.0,
                sin_amp: complex = 0.0, cos_dI=None, sin_dI=None,
                degree=None, frequencies=None) -> HarmonicSeries:
    """
    ``cos_amp cos(phi_a + omega t) + sin_amp sin(phi_a + omega t)`` as a series.

    ``cos_dI`` and ``sin_dI`` are the action gradients of the two amplitudes.
    """
    k = np.zeros((2, n_angles), dtype=np.int64)
    k[0, axis], k[1, axis] = 1, -1
    plus = 0.5 * cos_amp - 0.5j * sin_amp
    minus = 0.5 * cos_amp + 0.5j * sin_amp
    amp_dI = None
    if cos_dI is not None or sin_dI is not None:
        cd = np.zeros(n_angles, complex) if cos_dI is None else np.asarray(cos_dI, complex)
        sd = np.zeros(n_angles, complex) if sin_dI is None else np.asarray(sin_dI, complex)
        amp_dI = np.vstack([0.5 * cd - 0.5j * sd, 0.5 * cd + 0.5j * sd])
    deg = None if degree is None else [tuple(degree), tuple(degree)]
    real = np.isreal(cos_amp) and np.isreal(sin_amp)
    return HarmonicSeries.from_arrays(k, [omega, -omega], [plus, minus], amp_dI, deg,
                                      n_angles=n_angles, frequencies=frequencies,
                                      real=bool(real))


def constant_series(value: complex, n_angles: int, value_dI=None, degree=None,
                    frequencies=None) -> HarmonicSeries:
    """The constant ``value`` as a single ``k = 0`` term."""
    dI = None if value_dI is None else np.asarray(value_dI, complex).reshape(1, n_angles)
    deg = None if degree is None else [tuple(degree)]
    return HarmonicSeries.from_arrays(np.zeros((1, n_angles), dtype=np.int64), [0.0],
                                      [value], dI, deg, n_angles=n_angles,
                                      frequencies=frequencies,
                                      real=bool(np.isreal(value)))


def series_product(a: HarmonicSeries, b: HarmonicSeries) -> HarmonicSeries:
    """Pointwise product: wavevectors and frequencies add, amplitudes multiply."""
    _check_compatible(a, b)
    k = (a.k[:, None, :] + b.k[None, :, :]).reshape(-1, a.n_angles)
    nu = (a.nu[:, None] + b.nu[None, :]).reshape(-1)
    amp = (a.amp[:, None] * b.amp[None, :]).reshape(-1)
    amp_dI = None
    if a.amp_dI is not None and b.amp_dI is not None:
        amp_dI = (a.amp_dI[:, None, :] * b.amp[None, :, None]
                  + a.amp[:, None, None] * b.amp_dI[None, :, :]).reshape(-1, a.n_angles)
    degree = None
    if a.degree is not None and b.degree is not None:
        degree = (a.degree[:, None, :] + b.degree[None, :, :]).reshape(-1, a.n_angles)
    freqs = a.frequencies if a.frequencies is not None else b.frequencies
    return HarmonicSeries.from_arrays(
        k, nu, amp, amp_dI, degree, n_angles=a.n_angles, frequencies=freqs,
        real=a.real and b.real, action_dependent=a.action_dependent or b.action_dependent)


def angle_average(s: HarmonicSeries) -> HarmonicSeries:
    """Average over the angle torus: keep only ``k = 0`` terms."""
    keep = np.all(s.k == 0, axis=1)
    return HarmonicSeries.from_arrays(
        s.k[keep], s.nu[keep], s.amp[keep],
        None if s.amp_dI is None else s.amp_dI[keep],
        None if s.degree is None else s.degree[keep],
        n_angles=s.n_angles, frequencies=s.frequencies, real=s.real,
        action_dependent=s.action_dependent)


@dataclass(frozen=True)
class CorrelatorSeries:
    """
    A function of ``t12 = t1 - t2``: ``C(t12) = sum amp * exp(i nu t12)``.
    """

    nu: np.ndarray
    amp: np.ndarray

    def __post_init__(self):
        nu = np.asarray(self.nu, dtype=float).reshape(-1)
        amp = np.asarray(self.amp, dtype=complex).reshape(-1)
        if nu.size != amp.size:
            raise DimensionError("nu and amp lengths differ")
        if nu.size:
            labels = _cluster(nu)
            n_lab = labels.max() + 1
            merged_amp = np.zeros(n_lab, dtype=complex)
            np.add.at(merged_amp, labels, amp)
            merged_nu = np.zeros(n_lab)
            first = np.full(n_lab, -1)
            for idx, lab in enumerate(labels):
                if first[lab] < 0:
                    first[lab] = idx
            merged_nu = nu[first]
            order = np.argsort(merged_nu)
            nu, amp = merged_nu[order], merged_amp[order]
        nu.setflags(write=False)
        amp.setflags(write=False)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "amp", amp)

    def __len__(self):
        return self.nu.size

    def __add__(self, other: "CorrelatorSeries") -> "CorrelatorSeries":
        return CorrelatorSeries(np.concatenate([self.nu, other.nu]),
                                np.concatenate([self.amp, other.amp]))

    def scale(self, c: complex) -> "CorrelatorSeries":
        return CorrelatorSeries(self.nu, self.amp * c)

    def reversed(self) -> "CorrelatorSeries":
        """The same function of ``-t12`` (swap of the two time arguments)."""
        return CorrelatorSeries(-self.nu, self.amp)

    def evaluate(self, t12) -> np.ndarray:
        t12 = np.asarray(t12, dtype=float)
        return np.exp(1j * t12[..., None] * self.nu) @ self.amp

    def amplitude_at(self, nu: float) -> complex:
        hit = np.abs(self.nu - nu) <= MERGE_FREQ_TOL * max(1.0, abs(nu))
        return complex(self.amp[hit].sum())

    @property
    def is_real(self) -> bool:
        for nu, amp in zip(self.nu, self.amp):
            if abs(self.amplitude_at(-nu) - np.conj(amp)) > CONJ_TOL * max(abs(amp), 1e-300):
                return False
        return True


def _pairs(a: HarmonicSeries, b: HarmonicSeries):
    """Yield index pairs ``(r, s)`` with ``k_r + k_s = 0`` and ``k_r != 0``."""
    _check_compatible(a, b)
    index = defaultdict(list)
    for s in range(len(b)):
        index[b.k[s].tobytes()].append(s)
    for r in range(len(a)):
        if not np.any(a.k[r]):
            continue
        for s in index.get((-a.k[r]).tobytes(), ()):
            if abs(a.nu[r] + b.nu[s]) > PAIR_FREQ_TOL * max(abs(a.nu[r]), 1.0):
                raise IncommensurateFrequencyError(
                    f"wavevector-matched pair k={tuple(a.k[r])} has frequencies "
                    f"{a.nu[r]!r} and {b.nu[s]!r} that do not cancel")
            yield r, s


def connected_correlator(a: HarmonicSeries, b: HarmonicSeries) -> CorrelatorSeries:
    """
    ``<a(t1) b(t2)> - <a(t1)><b(t2)>`` as a function of ``t12``.

    Only pairs with ``k_r + k_s = 0`` survive the angle average; the
    ``k = 0`` pairs form the disconnected part and are excluded.

    Raises
    ------
    IncommensurateFrequencyError
        If a matched pair violates ``nu_s = -nu_r``.
    """
    nus, amps = [], []
    for r, s in _pairs(a, b):
        nus.append(a.nu[r])
        amps.append(a.amp[r] * b.amp[s])
    return CorrelatorSeries(np.asarray(nus, dtype=float), np.asarray(amps, dtype=complex))


def poisson_bracket(a: HarmonicSeries, b: HarmonicSeries) -> CorrelatorSeries:
    """
    Angle average of the non-equal-time bracket ``{a(t1), b(t2)}``.

    The bracket is taken in angle-action variables,
    ``sum_a (d a/d phi_a  d b/d I_a - d a/d I_a  d b/d phi_a)``, with
    ``d/d phi_a -> i k_a`` and ``d/d I_a`` read from ``amp_dI``.

    Raises
    ------
    CapabilityError
        If either series lacks ``amp_dI``.
    SecularTermError
        If either series has action-dependent frequencies.
    """
    if a.amp_dI is None or b.amp_dI is None:
        raise CapabilityError("poisson_bracket needs amplitude action-derivatives (amp_dI)")
    if a.action_dependent or b.action_dependent:
        raise SecularTermError(
            "frequencies depend on the actions; the bracket would contain secular terms")
    nus, amps = [], []
    for r, s in _pairs(a, b):
        ik = 1j * a.k[r]
        val = np.sum(ik * (a.amp[r] * b.amp_dI[s] + a.amp_dI[r] * b.amp[s]))
        nus.append(a.nu[r])
        amps.append(val)
    return CorrelatorSeries(np.asarray(nus, dtype=float), np.asarray(amps, dtype=complex))


def series_degree_total(s: HarmonicSeries) -> Sequence[Fraction] | None:
    """Common homogeneity degree of all terms, or None when mixed/unknown."""
    if s.degree is None or len(s) == 0:
        return None
    first = tuple(s.degree[0])
    for r in range(1, len(s)):
        if tuple(s.degree[r]) != first:
            return None
    return first
