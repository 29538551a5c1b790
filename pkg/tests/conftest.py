import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dhnn.basis import TestBasis
from dhnn.loss import HybridLoss
from dhnn.mesh import build_uniform_mesh
from dhnn.problems import make_experiment
from dhnn.quadrature import gauss_legendre

settings.register_profile(
    "dhnn", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("dhnn")

# acceptance lines collected by tests/test_acceptance.py, printed at session end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def rule30():
    return gauss_legendre(30)


def make_loss(name="poisson_hom", omega=None, N=3, M=10, order=30):
    prob = make_experiment(name, omega)
    mesh = build_uniform_mesh((0.0, 1.0), N)
    return HybridLoss(prob, mesh, TestBasis(mesh, M), gauss_legendre(order))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
