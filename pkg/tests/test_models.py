import numpy as np
import pytest

from psgeo.core import CapabilityError, DegeneracyError, DimensionError, ParameterError
from psgeo.engine import classical_metric
from psgeo.models import (DEFAULT_PARAMS, MODEL_IDS, build_model, canonical_order,
                          lco_geometry, lco_model, singular_model, spin_model)

from conftest import random_gho_params, random_lco_params, random_sco_params

ACTIONS = {"gho": [1.3], "sco": [0.7, 1.2], "lco": [0.8, 1.1], "singular": [0.6, 0.4],
           "spin": [0.9, 0.2]}


@pytest.mark.parametrize("model_id", ["gho", "sco", "lco"])
def test_series_match_phase_space_observables(model_id, rng):
    """The series lambda_i(t, phi0) agree with O_i evaluated on the flow."""
    gen = {"gho": random_gho_params, "sco": random_sco_params, "lco": random_lco_params}
    m = build_model(model_id, gen[model_id](rng))
    I = ACTIONS[model_id]
    lam = m.observables(I)
    phi = rng.uniform(0, 2 * np.pi, size=(6, m.n_angles))
    t = rng.uniform(-5, 5, size=6)
    z = m.phase_space_point(phi + t[:, None] * m.frequencies(), I)
    direct = m.observables_at(z)
    for i, s in enumerate(lam):
        np.testing.assert_allclose(s.evaluate(t, phi), direct[:, i], atol=1e-12)


@pytest.mark.parametrize("model_id", ["gho", "sco", "lco"])
def test_phase_space_map_preserves_energy(model_id):
    m = build_model(model_id, DEFAULT_PARAMS[model_id])
    I = np.array(ACTIONS[model_id])
    phi = np.random.default_rng(1).uniform(0, 2 * np.pi, size=(8, m.n_angles))
    E = m.hamiltonian(m.phase_space_point(phi, I))
    np.testing.assert_allclose(E, I @ m.frequencies(), rtol=1e-13)


def test_gradients_match_finite_differences():
    m = build_model("lco", {"A": 1.5, "B": 0.7, "C": 0.4})
    z = np.array([0.3, -0.8, 1.1, 0.2])
    h = 1e-6
    grads = m.observable_gradients(z)
    for d in range(4):
        e = np.zeros(4)
        e[d] = h
        fd = (m.observables_at(z + e) - m.observables_at(z - e)) / (2 * h)
        np.testing.assert_allclose(grads[:, d], fd, atol=1e-8)


def test_singular_series_match_orbit():
    m = singular_model(1.3, 0.8)
    I = [0.6, 0.4]
    lam = m.observables(I)
    phi = np.array([[0.1], [1.9], [4.0]])
    t = np.array([0.0, 0.7, -2.2])
    r = m.radius(t, phi[:, 0], I)
    np.testing.assert_allclose(lam[0].evaluate(t, phi).real, m.omega * r * r, rtol=1e-12)
    np.testing.assert_allclose(lam[1].evaluate(t, phi).real, m.alpha / (r * r), rtol=1e-12)


def test_singular_truncation_converges():
    # a = 0.9 at omega = alpha = 1, Itheta = 0
    Ir = (1 / np.sqrt(1 - 0.81) - 1) / 2
    g_a = classical_metric(singular_model(1.0, 1.0, truncation=1e-14), [Ir, 0.0]).matrix
    g_b = classical_metric(singular_model(1.0, 1.0, truncation=5e-15), [Ir, 0.0]).matrix
    assert abs(g_a[1, 1] - g_b[1, 1]) < 1e-8
    _, _, a = singular_model(1.0, 1.0).orbit([Ir, 0.0])
    assert a == pytest.approx(0.9)


def test_singular_frozen_g22():
    # Li2(1/2) / 2 from an independent polylog evaluation
    g = classical_metric(singular_model(1.0, 1.0), [1.0, 0.0]).matrix
    assert g[1, 1] == pytest.approx(0.2911202632325062, abs=1e-9)


def test_lco_frozen_metric_from_trajectory_oracle():
    frozen = np.array([[0.12900932, -0.11669675, -0.12660336],
                       [-0.11669675, 0.16863575, 0.10679014],
                       [-0.12660336, 0.10679014, 0.13275964]])
    g = classical_metric(lco_model(2.0, 1.0, 1.0), [0.8, 1.1]).matrix
    np.testing.assert_allclose(g, frozen, atol=1e-6)


def test_lco_geometry_matches_eigenproblem(rng):
    for _ in range(5):
        p = random_lco_params(rng)
        geo = lco_geometry(p["A"], p["B"], p["C"])
        K = np.array([[p["A"], p["C"] / 2], [p["C"] / 2, p["B"]]])
        np.testing.assert_allclose(sorted([geo.omega1 ** 2, geo.omega2 ** 2]),
                                   np.linalg.eigvalsh(K), rtol=1e-12)
        h = 1e-6
        for i, name in enumerate("ABC"):
            up = dict(p, **{name: p[name] + h})
            dn = dict(p, **{name: p[name] - h})
            ga, gb = lco_geometry(*up.values()), lco_geometry(*dn.values())
            assert geo.d_alpha[i] == pytest.approx((ga.alpha - gb.alpha) / (2 * h), abs=1e-7)
            assert geo.d_omega1[i] == pytest.approx((ga.omega1 - gb.omega1) / (2 * h), abs=1e-7)
        assert geo.mu == pytest.approx(np.cos(2 * geo.alpha))
        assert geo.nu == pytest.approx(np.sin(2 * geo.alpha))


def test_lco_reduces_to_uncoupled_limit():
    A, B, I1, I2 = 2.0, 1.0, 0.8, 1.1
    direct = np.diag([I1 ** 2 / (32 * A ** 2), I2 ** 2 / (32 * B ** 2),
                      I1 * I2 * (A + B) / (4 * np.sqrt(A * B) * (A - B) ** 2)])
    devs = [np.max(np.abs(classical_metric(lco_model(A, B, C), [I1, I2]).matrix - direct))
            for C in (1e-2, 1e-3, 1e-4)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 1e-4


def test_lco_guards():
    with pytest.raises(ParameterError):
        lco_model(1.0, 2.0, 0.0)
    with pytest.raises(ParameterError):
        lco_model(1.0, 1.0, 0.5)
    with pytest.raises(ParameterError):
        lco_model(1.0, 1.0, 3.0)


def test_lco_cross_terms_at_zero_action_have_no_bracket():
    m = lco_model(2.0, 1.0, 1.0)
    assert all(s.amp_dI is None for s in m.observables([1.0, 0.0])[2:])
    from psgeo.engine import classical_curvature
    with pytest.raises(CapabilityError):
        classical_curvature(m, [1.0, 0.0])


def test_gho_precondition_message():
    with pytest.raises(ParameterError, match="XZ - Y\\^2 must be positive"):
        build_model("gho", {"X": 1.0, "Y": 0.0, "Z": -1.0})


def test_factory_and_orders():
    for mid in MODEL_IDS:
        m = build_model(mid, DEFAULT_PARAMS[mid])
        assert m.id == mid
        assert canonical_order(mid, reversed(m.param_names)) == list(m.param_names)
    with pytest.raises(ParameterError):
        build_model("gho", {"X": 1.0})
    with pytest.raises(ParameterError):
        build_model("bogus", {})


def test_actions_validation():
    m = build_model("sco", DEFAULT_PARAMS["sco"])
    assert m.action_vector({"I1": 1.0, "I2": 2.0}).actions[1] == 2.0
    with pytest.raises(ParameterError):
        m.action_vector({"I1": 1.0})
    with pytest.raises(DimensionError):
        m.action_vector([1.0])
    with pytest.raises(ParameterError):
        m.action_vector([1.0, -0.1])


def test_with_params():
    m = build_model("gho", {"X": 1.0, "Y": 0.0, "Z": 1.0}).with_params(Y=0.5)
    assert m.params["Y"] == 0.5
    with pytest.raises(ParameterError):
        m.with_params(Q=1.0)


def test_spin_degenerate_field():
    with pytest.raises((ParameterError, DegeneracyError)):
        spin_model(B1=0.0, B2=0.0, B3=0.0)
    with pytest.raises(ParameterError):
        spin_model(B=1.0, theta=0.1)


def test_sco_registry_and_structure():
    m = build_model("sco", {"k": 1.0, "kp": 0.5})
    reg = m.registry(0.5)
    assert reg.value("I1^2") == pytest.approx(0.25)
    assert reg.value("I2") == pytest.approx(0.25)
    assert set(m.metric_structure()) <= set(reg.keys())
