import numpy as np
import pytest

from psgeo.core import QuantizationRegistry, RegistryError
from psgeo.engine import (check_semiclassical, classical_curvature, classical_metric,
                          gauge_shift, tensor_transform)
from psgeo.kernels import KernelConfig
from psgeo.models import DEFAULT_PARAMS, build_model, singular_model, spin_model
from psgeo.models.spin import spherical_jacobian

from conftest import random_gho_params

ACTIONS = {"gho": [1.3], "sco": [0.7, 1.2], "lco": [0.8, 1.1], "singular": [0.6, 0.4],
           "spin": [0.9, 0.2]}


@pytest.mark.parametrize("model_id", list(ACTIONS))
def test_gauge_invariance(model_id, rng):
    m = build_model(model_id, DEFAULT_PARAMS[model_id])
    I = ACTIONS[model_id]
    g0 = classical_metric(m, I).matrix
    F0 = classical_curvature(m, I).matrix
    for _ in range(5):
        c = rng.uniform(0, 2 * np.pi, size=m.n_angles)
        dc = None if m.fermionic else rng.normal(size=(m.n_angles, m.n_angles))
        sm = gauge_shift(m, c, dc)
        np.testing.assert_allclose(classical_metric(sm, I).matrix, g0, atol=1e-10)
        np.testing.assert_allclose(classical_curvature(sm, I).matrix, F0, atol=1e-10)


@pytest.mark.parametrize("model_id", list(ACTIONS))
def test_damped_mode_matches_analytic(model_id):
    m = build_model(model_id, DEFAULT_PARAMS[model_id])
    I = ACTIONS[model_id]
    cfg = KernelConfig(0.1, "damped-numeric")
    for f in (classical_metric, classical_curvature):
        exact = f(m, I).matrix
        damped = f(m, I, cfg)
        scale = max(np.max(np.abs(exact)), 1e-10)  # floor for vanishing tensors
        assert np.max(np.abs(damped.matrix - exact)) <= 1e-8 * scale
        assert damped.meta["kernel_mode"] == "damped-numeric"


def test_gho_action_scaling(rng):
    m = build_model("gho", random_gho_params(rng))
    g1, F1 = classical_metric(m, [0.7]).matrix, classical_curvature(m, [0.7]).matrix
    for s in (0.5, 2.0, 3.7):
        np.testing.assert_allclose(classical_metric(m, [0.7 * s]).matrix, s * s * g1,
                                   rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(classical_curvature(m, [0.7 * s]).matrix, s * F1,
                                   rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("model_id", ["gho", "sco", "lco", "singular"])
def test_bosonic_metrics_are_psd(model_id, rng):
    m = build_model(model_id, DEFAULT_PARAMS[model_id])
    for _ in range(5):
        I = rng.uniform(0.1, 2.0, size=len(m.action_names))
        ev = classical_metric(m, I).eigenvalues()
        assert ev.min() >= -1e-12 * ev.max()


def test_spin_transform_congruence():
    B, th, ph = 1.4, 1.1, -0.6
    sph = spin_model(B=B, theta=th, phi=ph)
    cart = spin_model(**dict(zip(("B1", "B2", "B3"), sph.field)))
    I = [0.9, 0.2]
    J = spherical_jacobian(B, th, ph)
    for f in (classical_metric, classical_curvature):
        t = tensor_transform(f(cart, I), J)
        np.testing.assert_allclose(t.matrix, f(sph, I).matrix, atol=1e-12)


def test_spin_sphere_flux():
    I1, I2 = 0.9, 0.2
    x, w = np.polynomial.legendre.leggauss(40)
    th = 0.5 * np.pi * (x + 1)
    F = np.array([classical_curvature(spin_model(B=1.0, theta=t, phi=0.3), [I1, I2]).matrix[1, 2]
                  for t in th])
    flux = 2 * np.pi * 0.5 * np.pi * np.sum(w * F)
    assert flux == pytest.approx(2 * np.pi * (I1 - I2), abs=1e-6)


def test_spin_metric_rank_two(rng):
    B = rng.normal(size=3)
    m = spin_model(B1=B[0], B2=B[1], B3=B[2])
    g = classical_metric(m, [0.9, 0.2])
    assert abs(g.det()) < 1e-14
    assert np.linalg.matrix_rank(g.matrix, tol=1e-10) == 2


def test_transform_validates_jacobian():
    from psgeo.core import ParameterError
    g = classical_metric(build_model("gho", DEFAULT_PARAMS["gho"]), [1.0])
    with pytest.raises(ParameterError):
        tensor_transform(g, np.eye(2))
    with pytest.raises(ParameterError):
        tensor_transform(g, np.full((3, 3), np.nan))
    assert tensor_transform(g, np.zeros((3, 1))).shape == (1, 1)


def test_relations_gho_exact():
    m = build_model("gho", {"X": 1.2, "Y": -0.3, "Z": 0.9})
    rep = check_semiclassical(m, m.registry(0.37))
    assert rep.holds(1e-12)
    np.testing.assert_allclose(rep.quantized_metric, rep.quantum_metric, atol=1e-12)


def test_relations_lco_anomaly():
    m = build_model("lco", {"A": 1.7, "B": 0.6, "C": -0.8})
    rep = check_semiclassical(m)
    geo = m.geometry if hasattr(m, "geometry") else None
    np.testing.assert_allclose(rep.metric_residual, rep.anomaly_expected, atol=1e-10)
    if geo is not None:
        np.testing.assert_allclose(rep.anomaly_expected, -0.5 * np.outer(geo.d_alpha, geo.d_alpha),
                                   atol=1e-14)


def test_relations_singular_expansions():
    m = singular_model(1.0, 1.5)
    rep = check_semiclassical(m, m.registry(0.01))
    c, q = rep.expansions["classical"], rep.expansions["quantum"]
    al = 1.5
    assert c[0] == pytest.approx(1 / (4 * al)) and q[0] == pytest.approx(1 / (4 * al), rel=1e-8)
    assert c[1] == pytest.approx(-3 / (16 * al ** 2))
    assert q[1] == pytest.approx(-1 / (8 * al ** 2), rel=1e-6)
    assert rep.holds(1e-10)


def test_relations_spin_ratios():
    m = spin_model(B=1.0, theta=0.8, phi=0.1)
    for state in ("+", "-"):
        rep = check_semiclassical(m, actions=[0.9, 0.2], state=state)
        assert rep.holds(1e-12)
    rep = check_semiclassical(m, actions=[0.5, 0.5])
    assert "curvature" not in rep.deviations() and rep.notes


def test_missing_registry_rule():
    m = build_model("gho", DEFAULT_PARAMS["gho"])
    with pytest.raises(RegistryError):
        check_semiclassical(m, QuantizationRegistry(1.0, {"I": (0.5, 1)}))
