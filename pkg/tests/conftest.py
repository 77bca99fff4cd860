import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_scores(rng, n, k, floor=0.0):
    """Positive random score vector summing to k."""
    v = rng.random(n) ** 3 + floor
    return v * (k / v.sum())


def spectral_gap_matrix(rng, m, n, spectrum):
    """m x n matrix with prescribed singular values and random singular vectors."""
    r = len(spectrum)
    U, _ = np.linalg.qr(rng.standard_normal((m, r)))
    V, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return (U * np.asarray(spectrum, dtype=float)) @ V.T


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
