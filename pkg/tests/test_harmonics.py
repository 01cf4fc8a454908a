import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psgeo.core import (CapabilityError, DimensionError, HarmonicTerm,
                        IncommensurateFrequencyError, NumericalQualityError, SecularTermError)
from psgeo.harmonics import (CorrelatorSeries, HarmonicSeries, angle_average, constant_series,
                             connected_correlator, make_series, poisson_bracket,
                             series_degree_total, series_product, trig_series)

OMEGA = np.array([1.0, np.sqrt(2.0)])


def grid(M, n):
    axis = 2 * np.pi * np.arange(M) / M
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def random_real_series(rng, n_terms=4, kmax=2, omega=OMEGA):
    n = omega.size
    ks, amps = [], []
    for _ in range(n_terms):
        k = rng.integers(-kmax, kmax + 1, size=n)
        a = complex(rng.normal(), rng.normal())
        if not np.any(k):
            a = a.real
        ks += [k, -k]
        amps += [a / 2, np.conj(a) / 2]
    ks = np.array(ks)
    return HarmonicSeries.from_arrays(ks, ks @ omega, amps, n_angles=n, frequencies=omega,
                                      real=True)


def test_merge_and_drop():
    terms = [HarmonicTerm((1,), 1.0, 0.5), HarmonicTerm((1,), 1.0, 0.25),
             HarmonicTerm((2,), 2.0, 1e-17), HarmonicTerm((0,), 0.0, 3.0)]
    s = make_series(terms, 1)
    assert len(s) == 2
    assert s.amp[np.argmax(s.k[:, 0])] == pytest.approx(0.75)


def test_small_amplitude_kept_when_derivative_is_not():
    s = make_series([HarmonicTerm((1,), 1.0, 0.0, amp_dI=(1.0,))], 1)
    assert len(s) == 1


def test_dimension_checks():
    with pytest.raises(DimensionError):
        make_series([HarmonicTerm((1, 0), 1.0, 1.0)], 1)
    a = trig_series(0, 1, 1.0, cos_amp=1.0)
    b = trig_series(0, 2, 1.0, cos_amp=1.0)
    with pytest.raises(DimensionError):
        connected_correlator(a, b)


def test_frequency_consistency_enforced():
    with pytest.raises(NumericalQualityError):
        HarmonicSeries.from_arrays([[1]], [1.5], [1.0], frequencies=[1.0])


def test_real_flag_requires_conjugates():
    with pytest.raises(NumericalQualityError):
        HarmonicSeries.from_arrays([[1]], [1.0], [1.0], real=True)


def test_trig_series_evaluates():
    s = trig_series(0, 1, 2.0, cos_amp=1.5, sin_amp=-0.5)
    t = np.linspace(0, 3, 7)
    phi = np.full((7, 1), 0.3)
    expected = 1.5 * np.cos(0.3 + 2 * t) - 0.5 * np.sin(0.3 + 2 * t)
    np.testing.assert_allclose(s.evaluate(t, phi).real, expected, atol=1e-14)
    np.testing.assert_allclose(s.evaluate(t, phi).imag, 0, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_product_is_pointwise(seed):
    rng = np.random.default_rng(seed)
    a, b = random_real_series(rng), random_real_series(rng)
    p = series_product(a, b)
    phi = rng.uniform(0, 2 * np.pi, size=(5, 2))
    t = rng.uniform(-3, 3, size=5)
    np.testing.assert_allclose(p.evaluate(t, phi), a.evaluate(t, phi) * b.evaluate(t, phi),
                               atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_angle_average_matches_grid_mean(seed):
    rng = np.random.default_rng(seed)
    s = series_product(random_real_series(rng), random_real_series(rng))
    phi = grid(16, 2)
    avg = angle_average(s)
    ref = s.evaluate(np.zeros(len(phi)), phi).mean()
    got = avg.amp.sum() if len(avg) else 0.0
    assert abs(got - ref) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_connected_correlator_matches_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    a, b = random_real_series(rng), random_real_series(rng)
    c = connected_correlator(a, b)
    phi = grid(12, 2)
    for t1, t2 in rng.uniform(-4, 4, size=(3, 2)):
        va = a.evaluate(np.full(len(phi), t1), phi)
        vb = b.evaluate(np.full(len(phi), t2), phi)
        ref = (va * vb).mean() - va.mean() * vb.mean()
        assert abs(c.evaluate(t1 - t2) - ref) < 1e-12
    assert c.is_real


def _action_series(I, shift_rate=0.0):
    """f = sqrt(I) cos(th) + I^2 sin(2 th) / 3 with th = phi + t, and its dI."""
    s = np.sqrt(I)
    return (trig_series(0, 1, 1.0, cos_amp=s, cos_dI=[0.5 / s], frequencies=[1.0])
            + HarmonicSeries.from_arrays([[2], [-2]], [2.0, -2.0],
                                         [-1j * I ** 2 / 6, 1j * I ** 2 / 6],
                                         [[-1j * I / 3], [1j * I / 3]], n_angles=1,
                                         frequencies=[1.0], real=True))


def _action_fn(t, phi, I):
    th = phi + t
    return np.sqrt(I) * np.cos(th) + I ** 2 * np.sin(2 * th) / 3


def test_poisson_bracket_matches_finite_differences():
    I = 0.8
    a = _action_series(I)
    b = _action_series(I).scale(2.0) + trig_series(0, 1, 1.0, sin_amp=I, sin_dI=[1.0],
                                                     frequencies=[1.0])
    c = poisson_bracket(a, b)
    phi = 2 * np.pi * np.arange(64) / 64
    h = 1e-5

    def fb(t, p, J):
        return 2 * _action_fn(t, p, J) + J * np.sin(p + t)

    for t1, t2 in [(0.3, -1.1), (2.0, 0.5)]:
        da_phi = (_action_fn(t1, phi + h, I) - _action_fn(t1, phi - h, I)) / (2 * h)
        da_I = (_action_fn(t1, phi, I + h) - _action_fn(t1, phi, I - h)) / (2 * h)
        db_phi = (fb(t2, phi + h, I) - fb(t2, phi - h, I)) / (2 * h)
        db_I = (fb(t2, phi, I + h) - fb(t2, phi, I - h)) / (2 * h)
        ref = np.mean(da_phi * db_I - da_I * db_phi)
        assert abs(c.evaluate(t1 - t2) - ref) < 1e-8


def test_bracket_gauge_invariant_under_action_dependent_shift():
    a = _action_series(0.8)
    b = _action_series(0.8).scale(-0.7)
    c0 = poisson_bracket(a, b)
    c1 = poisson_bracket(a.phase_shift([0.4], [[1.3]]), b.phase_shift([0.4], [[1.3]]))
    t = np.linspace(-2, 2, 5)
    np.testing.assert_allclose(c1.evaluate(t), c0.evaluate(t), atol=1e-14)


def test_bracket_errors():
    a = trig_series(0, 1, 1.0, cos_amp=1.0)
    with pytest.raises(CapabilityError):
        poisson_bracket(a, a)
    s = HarmonicSeries.from_arrays([[1], [-1]], [1.0, -1.0], [0.5, 0.5], [[0.1], [0.1]],
                                   n_angles=1, real=True, action_dependent=True)
    with pytest.raises(SecularTermError):
        poisson_bracket(s, s)


def test_incommensurate_pair_rejected():
    a = HarmonicSeries.from_arrays([[1]], [1.0], [1.0])
    b = HarmonicSeries.from_arrays([[-1]], [-1.5], [1.0])
    with pytest.raises(IncommensurateFrequencyError):
        connected_correlator(a, b)


def test_constant_series_has_empty_correlator():
    c = constant_series(2.0, 1)
    s = trig_series(0, 1, 1.0, cos_amp=1.0)
    assert len(connected_correlator(c, s)) == 0
    assert len(connected_correlator(c, c)) == 0


def test_correlator_series_merge_and_reverse():
    c = CorrelatorSeries([1.0, 1.0, -2.0], [0.5, 0.25, 1.0])
    assert len(c) == 2
    assert c.amplitude_at(1.0) == pytest.approx(0.75)
    r = c.reversed()
    assert r.evaluate(0.7) == pytest.approx(c.evaluate(-0.7))
    assert (c + c).amplitude_at(-2.0) == 2.0


def test_degree_bookkeeping():
    a = trig_series(0, 1, 1.0, cos_amp=1.0, degree=[0.5])
    assert series_degree_total(a)[0] == 0.5
    assert series_degree_total(series_product(a, a))[0] == 1
    assert series_degree_total(trig_series(0, 1, 1.0, cos_amp=1.0)) is None
