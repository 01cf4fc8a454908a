import numpy as np
import pytest

from psgeo.core import ParameterError
from psgeo.quantum_ref import quantum_tensors, trigamma


def test_gho_ground_state():
    q = quantum_tensors("gho", {"X": 1.0, "Y": 0.0, "Z": 1.0})
    np.testing.assert_allclose(q.metric, np.array([[1, 0, -1], [0, 4, 0], [-1, 0, 1]]) / 32)
    assert q.curvature[0, 1] == pytest.approx(-1 / 8)
    assert q.curvature[1, 2] == pytest.approx(-1 / 8)


def test_sco_determinant():
    q = quantum_tensors("sco", {"k": 1.0, "kp": 0.5})
    w1, w2 = 1.0, np.sqrt(2.0)
    assert np.linalg.det(q.metric) == pytest.approx(1 / (256 * w1 ** 4 * w2 ** 4), rel=1e-12)


def test_singular_hbar_scaling():
    q = quantum_tensors("singular", {"omega": 1.0, "alpha": 2.0}, hbar=0.5)
    assert q.metric[1, 1] == pytest.approx(trigamma(5.0) / 1.0)
    assert q.metric[0, 1] == pytest.approx(-0.5)
    with pytest.raises(ParameterError):
        quantum_tensors("singular", {"omega": 1.0, "alpha": 0.0})


def test_spin_parametrizations_agree():
    B, th, ph = 1.7, 0.9, 0.3
    J = np.array([[np.sin(th) * np.cos(ph), B * np.cos(th) * np.cos(ph), -B * np.sin(th) * np.sin(ph)],
                  [np.sin(th) * np.sin(ph), B * np.cos(th) * np.sin(ph), B * np.sin(th) * np.cos(ph)],
                  [np.cos(th), -B * np.sin(th), 0.0]])
    cart = quantum_tensors("spin", dict(zip(("B1", "B2", "B3"), B * J[:, 0])), state="+")
    sph = quantum_tensors("spin", {"B": B, "theta": th, "phi": ph}, state="+")
    np.testing.assert_allclose(J.T @ cart.metric @ J, sph.metric, atol=1e-14)
    np.testing.assert_allclose(J.T @ cart.curvature @ J, sph.curvature, atol=1e-14)
    minus = quantum_tensors("spin", {"B": B, "theta": th, "phi": ph}, state="-")
    np.testing.assert_allclose(minus.curvature, -sph.curvature)


def test_invalid_inputs():
    with pytest.raises(ParameterError):
        quantum_tensors("nope", {})
    with pytest.raises(ParameterError):
        quantum_tensors("gho", {"X": 1.0, "Y": 2.0, "Z": 1.0})
    with pytest.raises(ParameterError):
        quantum_tensors("gho", {"X": 1.0, "Y": 0.0, "Z": 1.0}, hbar=0.0)
    with pytest.raises(ParameterError):
        quantum_tensors("spin", {"B": 1.0, "theta": 0.0, "phi": 0.0}, state="up")
