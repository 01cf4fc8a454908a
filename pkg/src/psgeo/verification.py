"""
Self-check suite comparing engine output with closed forms, quantum
references and the sampler backend.  Used by ``psgeo verify``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .core import PsgeoError, UnsupportedBackendError
from .engine import check_semiclassical, classical_curvature, classical_metric
from .models import DEFAULT_PARAMS, MODEL_IDS, build_model
from .special import dilog

__all__ = ["CheckResult", "run_checks", "DEFAULT_ACTIONS", "format_table"]

DEFAULT_ACTIONS = {
    "gho": {"I": 1.0},
    "sco": {"I1": 1.0, "I2": 0.5},
    "lco": {"I1": 0.8, "I2": 1.1},
    "singular": {"Ir": 0.5, "Itheta": 0.0},
    "spin": {"I1": 0.8, "I2": 0.3},
}

SAMPLER_POINTS = {
    "gho": {"X": 1.3, "Y": 0.4, "Z": 0.8},
    "sco": {"k": 1.0, "kp": 0.5},
    "lco": {"A": 2.0, "B": 1.0, "C": 1.0},
}


@dataclass(frozen=True)
class CheckResult:
    model: str
    name: str
    deviation: float
    tol: float
    status: str  # "PASS", "FAIL", "unsupported backend" or "error: ..."

    @property
    def ok(self) -> bool:
        return self.status == "PASS" or self.status == "unsupported backend"


def _maxabs(a, b=0.0) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def _rel(a, b) -> float:
    b = np.asarray(b)
    return _maxabs(a, b) / max(float(np.max(np.abs(b), initial=0.0)), 1e-300)


def _harmonic_checks(model_id: str):
    """Yield ``(name, thunk, floor)``; the thunk returns a deviation."""
    m = build_model(model_id, DEFAULT_PARAMS[model_id])
    I = DEFAULT_ACTIONS[model_id]
    g = lambda: classical_metric(m, I).matrix  # noqa: E731
    F = lambda: classical_curvature(m, I).matrix  # noqa: E731

    def relation(kind):
        def run():
            return check_semiclassical(m, actions=I).deviations()[kind]
        return run

    if model_id == "gho":
        yield "metric vs closed form (relative)", lambda: _rel(g(), m.metric_closed(I)), 0.0
        yield "curvature vs closed form", lambda: _maxabs(F(), m.curvature_closed(I)), 0.0
        yield "quantized metric relation", relation("metric"), 0.0
        yield "quantized curvature relation", relation("curvature"), 0.0
    elif model_id == "sco":
        yield "metric vs closed form (relative)", lambda: _rel(g(), m.metric_closed(I)), 0.0
        yield "determinant (relative)", (
            lambda: abs(np.linalg.det(g()) / m.determinant_closed(I) - 1)), 0.0
        yield "curvature vanishes", lambda: _maxabs(F()), 0.0
        yield "frequency-gradient decomposition", (
            lambda: _maxabs(sum(m.metric_decomposition(I)), g())), 0.0
        yield "quantized metric relation", relation("metric"), 0.0
    elif model_id == "lco":
        yield "metric vs M/N/L form (relative)", lambda: _rel(g(), m.metric_closed(I)), 0.0
        yield "metric vs gradient form (relative)", (
            lambda: _rel(g(), m.metric_from_gradients(I))), 0.0
        yield "curvature vanishes", lambda: _maxabs(F()), 0.0
        yield "anomaly residual -1/2 da da", relation("metric"), 0.0
    elif model_id == "singular":
        def g22():
            Ir = I["Ir"]
            pt = np.hypot(I["Itheta"], m.alpha)
            ref = m.alpha ** 2 / (2 * pt ** 2) * dilog(Ir / (Ir + pt))
            return abs(g()[1, 1] - ref)

        def expansion(order):
            def run():
                ex = check_semiclassical(m).expansions
                c, q = ex["classical"], ex["quantum"]
                al = m.alpha
                if order == 1:
                    return abs(c[0] - q[0]) + abs(c[0] - 0.25 / al)
                return abs(c[1] + 3 / (16 * al ** 2)) + abs(q[1] + 1 / (8 * al ** 2))
            return run

        yield "g11, g12 vs closed form", lambda: _maxabs(g()[0], m.metric_closed(I)[0]), 0.0
        yield "g22 vs dilogarithm", g22, 1e-6
        yield "determinant", lambda: abs(np.linalg.det(g()) - m.determinant_closed(I)), 1e-6
        yield "curvature vanishes", lambda: _maxabs(F()), 1e-8
        yield "g11, g12 quantized relation", relation("metric"), 0.0
        yield "order-hbar agreement", expansion(1), 1e-6
        yield "order-hbar^2 mismatch as predicted", expansion(2), 1e-6
    elif model_id == "spin":
        ms = build_model("spin", {"B": 1.3, "theta": 0.7, "phi": 0.4})
        yield "Cartesian metric vs closed form", lambda: _maxabs(g(), m.metric_closed(I)), 0.0
        yield "spherical metric vs closed form", (
            lambda: _maxabs(classical_metric(ms, I).matrix, ms.metric_closed(I))), 0.0
        yield "metric determinant vanishes", lambda: abs(np.linalg.det(g())), 0.0
        yield "curvature vs closed form", lambda: _maxabs(F(), m.curvature_closed(I)), 0.0
        yield "quantum metric relation", relation("metric"), 0.0
        yield "quantum curvature relation", relation("curvature"), 0.0
    return


def _sampler_checks(model_id: str, grid=None, horizon=None):
    from .sampler import sample_tensor

    if model_id not in SAMPLER_POINTS:
        def unsupported():
            raise UnsupportedBackendError(f"sampler backend does not support {model_id}")
        yield "sampler metric vs harmonic", unsupported, 0.0
        return
    m = build_model(model_id, SAMPLER_POINTS[model_id])
    I = DEFAULT_ACTIONS[model_id]
    kw = {"grid": grid, "horizon": horizon}
    yield "sampler metric vs harmonic", (
        lambda: _maxabs(sample_tensor(m, I, **kw).matrix, classical_metric(m, I).matrix)), 0.0
    if model_id == "gho":
        yield "sampler curvature vs closed form", (
            lambda: _maxabs(sample_tensor(m, I, kind="curvature", **kw).matrix,
                            m.curvature_closed(I))), 1e-3


def run_checks(models: Iterable[str] = MODEL_IDS, backend: str = "harmonic",
               tol: float | None = None, **sampler_kw) -> list[CheckResult]:
    """
    Run the self-check suite.

    Parameters
    ----------
    models : iterable of str
    backend : {"harmonic", "closed", "sampler"}
        ``closed`` runs the harmonic suite (closed forms are its reference).
    tol : float, optional
        Default ``1e-8`` (harmonic) or ``1e-4`` (sampler).  Checks whose
        accuracy is limited by truncation use ``max(tol, floor)``.
    """
    if tol is None:
        tol = 1e-4 if backend == "sampler" else 1e-8
    rows = []
    for mid in models:
        gen: Callable = (_sampler_checks(mid, **sampler_kw) if backend == "sampler"
                         else _harmonic_checks(mid))
        for name, thunk, floor in gen:
            t = max(tol, floor)
            try:
                dev = float(thunk())
            except UnsupportedBackendError:
                rows.append(CheckResult(mid, name, float("nan"), t, "unsupported backend"))
                continue
            except PsgeoError as exc:
                rows.append(CheckResult(mid, name, float("nan"), t, f"error: {exc}"))
                continue
            status = "PASS" if np.isfinite(dev) and dev <= t else "FAIL"
            rows.append(CheckResult(mid, name, dev, t, status))
    return rows


def format_table(rows: list[CheckResult]) -> str:
    width = max((len(r.name) for r in rows), default=10)
    lines = [f"{'model':<9} {'check':<{width}} {'deviation':>11} {'tol':>9}  status"]
    for r in rows:
        dev = "-" if not np.isfinite(r.deviation) else f"{r.deviation:.3e}"
        lines.append(f"{r.model:<9} {r.name:<{width}} {dev:>11} {r.tol:>9.1e}  {r.status}")
    return "\n".join(lines)
