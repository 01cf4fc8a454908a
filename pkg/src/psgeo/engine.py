"""
Assembly of classical metrics and curvatures from model observables,
tensor transformations and semiclassical comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (CapabilityError, GeometricTensor, NumericalQualityError, ParameterError,
                   QuantizationRegistry, TENSOR_TOL)
from .fermionic import fermionic_bracket, fermionic_correlator
from .harmonics import connected_correlator, poisson_bracket
from .kernels import KernelConfig, integrate_correlator
from .models.base import ModelSpec, ShiftedModel
from .special import trigamma

__all__ = ["classical_metric", "classical_curvature", "gauge_shift", "tensor_transform",
           "check_semiclassical", "RelationReport", "quantized_structure"]


def _finish(raw: np.ndarray, kind: str, what: str) -> tuple[np.ndarray, float]:
    scale = max(1.0, float(np.max(np.abs(raw), initial=0.0)))
    if np.max(np.abs(raw.imag), initial=0.0) > TENSOR_TOL * scale:
        raise NumericalQualityError(
            f"{what} has imaginary residue {np.max(np.abs(raw.imag)):.3g}")
    m = raw.real
    sign = 1.0 if kind == "metric" else -1.0
    asym = float(np.max(np.abs(m - sign * m.T), initial=0.0))
    if asym > TENSOR_TOL * scale:
        raise NumericalQualityError(f"{what} violates its symmetry by {asym:.3g}")
    return 0.5 * (m + sign * m.T), asym


def _assemble(model: ModelSpec, actions, cfg: KernelConfig, kind: str) -> GeometricTensor:
    cfg = cfg or KernelConfig()
    av = model.action_vector(actions)
    if model.fermionic:
        sys = model.fermionic_system(av.actions)
        n = sys.n_params
        pair = fermionic_correlator if kind == "metric" else fermionic_bracket
        series = lambda i, j: pair(sys, i, j)  # noqa: E731
    else:
        if kind == "curvature" and not model.bracket_capable:
            raise CapabilityError(f"{model.id} cannot evaluate brackets")
        lam = model.observables(av.actions)
        n = len(lam)
        pair = connected_correlator if kind == "metric" else poisson_bracket
        series = lambda i, j: pair(lam[i], lam[j])  # noqa: E731
    raw = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            raw[i, j] = integrate_correlator(series(i, j), cfg)
    if kind == "metric":
        raw = -raw
    m, asym = _finish(raw, kind, f"{model.id} {kind}")
    meta = {"backend": "harmonic", "kernel_mode": cfg.mode, "asymmetry": asym}
    if cfg.mode != "analytic-limit":
        meta.update(epsilon=cfg.epsilon, richardson_orders=cfg.richardson_orders)
    return GeometricTensor(kind, m, model.point, av, meta)


def classical_metric(model: ModelSpec, actions, cfg: KernelConfig | None = None) -> GeometricTensor:
    """
    Classical metric ``g_ij = -iint <lambda_i(t1) lambda_j(t2)>_connected``.

    Parameters
    ----------
    model : ModelSpec
        A model bound to its parameter point.
    actions : array_like, mapping or ActionVector
    cfg : KernelConfig, optional
        Kernel evaluation mode; analytic limit by default.

    Raises
    ------
    DivergentDCError, CapabilityError, NumericalQualityError
    """
    return _assemble(model, actions, cfg, "metric")


def classical_curvature(model: ModelSpec, actions, cfg: KernelConfig | None = None) -> GeometricTensor:
    """Classical curvature ``F_ij = iint <{lambda_i(t1), lambda_j(t2)}>``."""
    return _assemble(model, actions, cfg, "curvature")


def gauge_shift(model: ModelSpec, shift, shift_dI=None) -> ShiftedModel:
    """
    Shift the initial angles by ``c`` (optionally action dependent).

    For fermionic models the shift rephases the eigenframe columns.
    """
    return ShiftedModel(model, shift, shift_dI)


def tensor_transform(t: GeometricTensor, jacobian, point=None) -> GeometricTensor:
    """
    Congruence ``t' = J^T t J`` with ``J = d x_old / d x_new``.

    A singular Jacobian is allowed; non-finite entries are not.
    """
    J = np.asarray(jacobian, dtype=float)
    if J.ndim != 2 or J.shape[0] != t.shape[0]:
        raise ParameterError(f"jacobian shape {J.shape} does not match tensor {t.shape}")
    if not np.all(np.isfinite(J)):
        raise ParameterError("jacobian has non-finite entries")
    m = J.T @ t.matrix @ J
    sign = 1.0 if t.kind == "metric" else -1.0
    m = 0.5 * (m + sign * m.T)
    return GeometricTensor(t.kind, m, point, t.actions, dict(t.meta, transformed=True))


# -- semiclassical relations -------------------------------------------------

def quantized_structure(structure: dict, reg: QuantizationRegistry, power: int) -> np.ndarray:
    """``sum_key M_key * reg(key) / hbar**power`` over a monomial structure."""
    total = None
    for key, mat in structure.items():
        term = np.asarray(mat, dtype=float) * reg.value(key)
        total = term if total is None else total + term
    return total / reg.hbar ** power


def _evaluate_structure(structure: dict, names, values) -> np.ndarray:
    env = dict(zip(names, values))
    total = None
    for key, mat in structure.items():
        coef = 1.0
        for part in key.replace(" ", "").split("*"):
            name, _, p = part.partition("^")
            coef *= env[name] ** (int(p) if p else 1)
        term = coef * np.asarray(mat, dtype=float)
        total = term if total is None else total + term
    return total


@dataclass
class RelationReport:
    """
    Comparison of a classical tensor, quantized through a registry, with the
    quantum reference.  ``residual = quantum - quantized`` entrywise.
    """

    model_id: str
    hbar: float
    classical_metric: np.ndarray | None
    quantized_metric: np.ndarray | None
    quantum_metric: np.ndarray
    metric_residual: np.ndarray | None
    classical_curvature: np.ndarray | None
    quantized_curvature: np.ndarray | None
    quantum_curvature: np.ndarray
    curvature_residual: np.ndarray | None
    anomaly_expected: np.ndarray | None = None
    expected_metric_residual: np.ndarray | None = None
    expected_curvature_residual: np.ndarray | None = None
    expansions: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def deviations(self) -> dict[str, float]:
        """Max |residual - expected residual| for each compared tensor."""
        out = {}
        for name, res, exp in (("metric", self.metric_residual, self.expected_metric_residual),
                               ("curvature", self.curvature_residual,
                                self.expected_curvature_residual)):
            if res is None:
                continue
            ref = np.zeros_like(res) if exp is None else exp
            out[name] = float(np.max(np.abs(res - ref), initial=0.0))
        return out

    def holds(self, tol: float = 1e-10) -> bool:
        return all(v <= tol for v in self.deviations().values())


def _singular_expansions(model, hbar: float) -> dict:
    """Order-hbar and order-hbar^2 coefficients of classical and quantum ``g22``."""
    reg = model.registry(hbar)
    c1, c2 = model.g22_expansion()
    classical = (c1 * reg.value("Ir") / hbar, c2 * reg.value("Ir^2") / hbar ** 2)
    model.quantum(hbar=1.0)  # raises for inadmissible parameters
    al = model.alpha
    # fit hbar^2 g0_22(hbar) = q1 hbar + q2 hbar^2 + ... at small hbar
    hs = al * 0.02 * 0.5 ** np.arange(6)
    vals = np.array([trigamma(1 + al / h) / 4 for h in hs])
    design = np.vander(hs, 6, increasing=True)[:, 1:]
    coef = np.linalg.lstsq(design, vals, rcond=None)[0]
    return {"classical": classical, "quantum": (float(coef[0]), float(coef[1]))}


def check_semiclassical(model: ModelSpec, reg: QuantizationRegistry | None = None,
                        actions=None, state: str | None = None) -> RelationReport:
    """
    Quantize the model's closed-form classical tensors and compare with the
    quantum reference.

    Bosonic models substitute action monomials through ``reg`` and divide by
    ``hbar**2`` (metric) or ``hbar`` (curvature).  The spin model uses the
    ratio relations at explicit occupations ``actions`` (default ``(1, 0)``).

    Raises
    ------
    RegistryError
        If a monomial of the closed form has no rule.
    """
    if isinstance(model, ShiftedModel):
        model = model.base
    if model.id == "spin":
        return _check_spin(model, actions, state)
    reg = reg or model.registry()
    hbar = reg.hbar
    qref = model.quantum(hbar=hbar, state=state)
    g_struct = model.metric_structure()
    f_struct = model.curvature_structure()
    gq = quantized_structure(g_struct, reg, 2)
    n = gq.shape[0]
    fq = quantized_structure(f_struct, reg, 1) if f_struct else np.zeros((n, n))
    if actions is None:
        classical_g = classical_f = None
    else:
        vals = model.action_vector(actions).actions
        classical_g = _evaluate_structure(g_struct, model.action_names, vals)
        classical_f = (_evaluate_structure(f_struct, model.action_names, vals)
                       if f_struct else np.zeros((n, n)))
    report = RelationReport(
        model.id, hbar, classical_g, gq, qref.metric, qref.metric - gq,
        classical_f, fq, qref.curvature, qref.curvature - fq)
    if model.id == "lco":
        report.anomaly_expected = model.anomaly_expected()
        report.expected_metric_residual = report.anomaly_expected
    if model.id == "singular":
        # g22 is compared through its hbar expansion only
        report.expected_metric_residual = report.metric_residual.copy()
        report.expected_metric_residual[0, :] = 0.0
        report.expected_metric_residual[:, 0] = 0.0
        report.expansions = _singular_expansions(model, hbar)
        report.notes.append("g22 compared through hbar expansions")
    return report


def _check_spin(model, actions, state) -> RelationReport:
    vals = model.action_vector((1.0, 0.0) if actions is None else actions).actions
    I1, I2 = vals
    sign = -1.0 if state == "-" else 1.0
    qref = model.quantum(state="-" if sign < 0 else "+")
    g = model.metric_closed(vals)
    F = model.curvature_closed(vals)
    notes = []
    gq = res_g = None
    if I1 * I2 != 0:
        gq = -g / (2 * I1 * I2)
        res_g = qref.metric - gq
    else:
        notes.append("metric relation skipped: I1*I2 = 0")
    fq = res_f = None
    if I1 != I2:
        fq = -sign * 2 * F / (I1 - I2)
        res_f = qref.curvature - fq
    else:
        notes.append("curvature relation skipped: I1 = I2")
    return RelationReport("spin", 1.0, g, gq, qref.metric, res_g, F, fq, qref.curvature,
                          res_f, notes=notes)
