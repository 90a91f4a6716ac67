import numpy as np
import pytest

from comfortloop.predictor import EnvSample, PhysioSample

TRUE_WEIGHTS = np.array([0.025, 0.15, 0.2, -0.1, 0.3, 0.25, 0.125, -0.4, 0.002])
TRUE_BIAS = -6.3


def random_features(rng, n):
    """Plausible, full-rank feature rows (9 columns)."""
    return np.column_stack([
        rng.uniform(60, 90, n),     # hr mean
        rng.uniform(0, 3, n),       # hr sd
        rng.uniform(1, 5, n),       # gsr mean
        rng.uniform(0, 0.5, n),     # gsr sd
        rng.uniform(0.3, 1.2, n),   # clo
        rng.uniform(0.9, 1.6, n),   # met
        rng.uniform(18, 30, n),     # air temp
        rng.uniform(0.05, 0.4, n),  # air velocity
        rng.uniform(30, 70, n),     # rel humidity
    ])


def linear_labels(X):
    return X @ TRUE_WEIGHTS + TRUE_BIAS


def normal_equations_oracle(X, y):
    """Unregularised least squares with intercept, solved on raw features."""
    A = np.column_stack([X, np.ones(len(X))])
    sol = np.linalg.solve(A.T @ A, A.T @ y)
    return sol[:-1], sol[-1]


@pytest.fixture
def linear_dataset():
    rng = np.random.default_rng(20240611)
    X = random_features(rng, 200)
    y = linear_labels(X)
    assert np.all(np.abs(y) < 3), "labels must stay inside the TCI scale"
    return X, y


def physio(t, hr=70.0, gsr=2.0, clo=0.5, met=1.2, oid="w-01"):
    return PhysioSample(oid, t, hr, gsr, clo, met)


def env(t, ta=23.0, rh=50.0, vel=0.1, mrt=None):
    return EnvSample(t, ta, ta if mrt is None else mrt, rh, vel)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, title, notes in sorted(RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title} | {notes}")
