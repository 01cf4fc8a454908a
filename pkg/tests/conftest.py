import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_gho_params(rng):
    while True:
        X, Y, Z = rng.uniform(0.2, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.2, 2.0)
        if X * Z - Y * Y > 0.1:
            return {"X": X, "Y": Y, "Z": Z}


def random_sco_params(rng):
    return {"k": rng.uniform(0.5, 2.0), "kp": rng.uniform(0.1, 1.5)}


def random_lco_params(rng):
    while True:
        A, B = rng.uniform(0.5, 3.0, size=2)
        C = rng.uniform(-1.0, 1.0)
        if abs(A - B) > 0.2 and abs(C) > 0.1 and 4 * A * B - C * C > 0.5:
            return {"A": A, "B": B, "C": C}


def random_hermitian(rng, n=2):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
