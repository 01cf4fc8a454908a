import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psgeo.core import DivergentDCError, ParameterError
from psgeo.harmonics import CorrelatorSeries
from psgeo.kernels import (KernelConfig, cos_product_kernel, damped_kernel,
                           integrate_correlator, quadrant_kernel, richardson_limit)


def test_quadrant_kernel_values():
    assert quadrant_kernel(2.0) == -0.25
    assert quadrant_kernel(-2.0) == -0.25
    with pytest.raises(DivergentDCError):
        quadrant_kernel(0.0)


@given(st.floats(min_value=0.05, max_value=20.0))
def test_cos_and_sin_identities(w):
    # cos(2 w t) -> -1/(4 w^2); sin(2 w t) -> 0
    cos = CorrelatorSeries([2 * w, -2 * w], [0.5, 0.5])
    sin = CorrelatorSeries([2 * w, -2 * w], [-0.5j, 0.5j])
    assert integrate_correlator(cos).real == pytest.approx(-1 / (4 * w * w), rel=1e-14)
    assert abs(integrate_correlator(sin)) < 1e-15 / w ** 2


@given(st.floats(min_value=0.1, max_value=5.0), st.floats(min_value=0.1, max_value=5.0))
def test_mixed_cos_identity(w1, w2):
    if abs(w1 - w2) < 1e-3:
        return
    expected = -(w1 ** 2 + w2 ** 2) / (w1 ** 2 - w2 ** 2) ** 2
    assert cos_product_kernel(w1, w2) == pytest.approx(expected, rel=1e-12)


def test_damped_kernel_limit():
    nu = np.array([0.7, -1.3, 2.0])
    np.testing.assert_allclose(damped_kernel(nu, 1e-9).real, -1 / nu ** 2, rtol=1e-8)


def test_richardson_recovers_polynomial_limit():
    eps = 0.1 * 0.5 ** np.arange(6)
    vals = 3.0 + 2 * eps - 5 * eps ** 2 + eps ** 3
    assert richardson_limit(eps, vals) == pytest.approx(3.0, abs=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0.3, 5.0), st.floats(-1, 1), st.floats(-1, 1)),
                min_size=1, max_size=4))
def test_damped_mode_agrees_with_analytic(terms):
    nus, amps = [], []
    for w, a, b in terms:
        nus += [w, -w]
        amps += [a + 1j * b, a - 1j * b]
    c = CorrelatorSeries(nus, amps)
    exact = integrate_correlator(c)
    damped = integrate_correlator(c, KernelConfig(0.1, "damped-numeric"))
    scale = max(abs(exact), np.sum(np.abs(amps)) / min(nus, key=abs) ** 2)
    assert abs(damped - exact) <= 1e-8 * scale


def test_dc_term_rejected_and_config_validated():
    with pytest.raises(DivergentDCError):
        integrate_correlator(CorrelatorSeries([0.0, 1.0], [1.0, 1.0]))
    with pytest.raises(ParameterError):
        KernelConfig(mode="bogus")
    with pytest.raises(ParameterError):
        KernelConfig(epsilon=-1.0, mode="damped-numeric")
    assert integrate_correlator(CorrelatorSeries([], [])) == 0
