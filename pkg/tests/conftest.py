import numpy as np
import pytest

from nmcorr.channels import GadMap, GadParams
from nmcorr.nonmarkov import TimeGrid


@pytest.fixture(scope="session")
def gad():
    return GadMap(GadParams(omega=5.0, t_c=0.25))


@pytest.fixture(scope="session")
def grid():
    return TimeGrid(0.0, 1.0, 4000)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, dim=4, rank=None):
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "acceptance" in report.keywords:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance, key=lambda p: p[0]):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
